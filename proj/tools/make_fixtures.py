#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under data/.

    python3 tools/make_fixtures.py [data-dir]

Output is deterministic for a given seed.
"""

import csv
import json
import random
import sys
from pathlib import Path

HEADER = ["process_step", "failure_mode", "failure_effect", "severity", "failure_cause",
          "occurrence", "failure_measure", "detection", "rpn"]

STEPS = [
    ("Cell stacking", "stack"),
    ("Welding of cell contact system", "weld seam"),
    ("Module housing assembly", "housing"),
    ("Thermal paste application", "paste layer"),
    ("Busbar mounting", "busbar"),
    ("End-of-line testing", "test rig"),
    ("Cell surface cleaning", "cell surface"),
    ("Cooling plate bonding", "cooling plate"),
    ("Harness routing", "harness"),
    ("Lid sealing", "lid gasket"),
]
DEFECTS = ["Cracking", "Misplacement", "Contamination", "Deformation", "Omission"]

CONSEQUENCES = ["Overheating", "Short circuit", "Capacity loss", "Electrolyte leakage",
                "Insulation breakdown", "Vibration noise", "Corrosion", "Voltage drift",
                "Loose contact", "Delamination"]
COMPONENTS = ["module", "pack", "sensor line", "terminal", "enclosure"]

CAUSE_ADJ = ["Worn", "Misaligned", "Uncalibrated", "Dirty", "Overloaded", "Outdated",
             "Damaged", "Unstable", "Missing", "Defective"]
CAUSE_NOUN = ["gripper", "fixture", "dispenser", "torque tool", "nozzle"]

MEASURE_ACTION = ["Weekly calibration", "Camera inspection", "Ultrasonic check",
                  "Operator training", "Preventive maintenance", "Leak testing",
                  "Thermal imaging", "Torque logging", "Plasma pretreatment", "Gauge verification"]
MEASURE_OBJECT = ["at station entry", "after each shift", "per batch", "on every part",
                  "during setup"]


def rx(text):
    """Escape for an ECMAScript regular expression."""
    return "".join("\\" + c if c in ".^$|?*+()[]{}\\/" else c for c in text)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def fixture50(out, rng):
    effects = [f"{c} in {m}" for c in CONSEQUENCES for m in COMPONENTS]
    causes = [f"{a} {n}" for a in CAUSE_ADJ for n in CAUSE_NOUN]
    measures = [f"{a} {o}" for a in MEASURE_ACTION for o in MEASURE_OBJECT]
    for pool in (effects, causes, measures):
        rng.shuffle(pool)

    rows = []
    for si, (step, obj) in enumerate(STEPS):
        for di, defect in enumerate(DEFECTS):
            i = si * len(DEFECTS) + di
            s, o, d = rng.randint(2, 10), rng.randint(1, 9), rng.randint(1, 8)
            rows.append({"step": step, "mode": f"{defect} of {obj}", "effect": effects[i], "s": s,
                         "cause": causes[i], "o": o, "measure": measures[i], "d": d,
                         "rpn": s * o * d})
    write_csv(out / "fixture50.csv", HEADER,
              [[r["step"], r["mode"], r["effect"], r["s"], r["cause"], r["o"], r["measure"],
                r["d"], r["rpn"]] for r in rows])

    items, rules = [], []

    for t in (5, 7, 8):
        n = sum(1 for r in rows if r["s"] > t)
        alias = f"failure_effects_with_s_over_{t}"
        items.append({"question": f"How many failure effects with an S value of over {t} exist?",
                      "ground_truth": f"There are {n} failure effects with an S value of over {t}.",
                      "relevance_key": [alias]})
        rules.append([f"how many failure effects with an? s value of over {t}\\b",
                      f"MATCH (e:FailureEffect) WHERE e.S > {t} "
                      f"RETURN count(DISTINCT e) AS {alias}"])

    for t in (100, 200):
        n = sum(1 for r in rows if r["rpn"] > t)
        alias = f"failure_causes_with_rpn_over_{t}"
        items.append({"question": f"How many failure causes have an RPN greater than {t}?",
                      "ground_truth": f"There are {n} failure causes with an RPN over {t}.",
                      "relevance_key": [alias]})
        rules.append([f"how many failure causes have an rpn greater than {t}\\b",
                      f"MATCH (c:FailureCause) WHERE c.RPN > {t} "
                      f"RETURN count(DISTINCT c) AS {alias}"])

    top = max(r["rpn"] for r in rows)
    items.append({"question": "What is the highest RPN in the FMEA?",
                  "ground_truth": f"The highest RPN is {top}.",
                  "relevance_key": ["highest_rpn"]})
    rules.append(["highest rpn",
                  "MATCH (c:FailureCause) RETURN max(c.RPN) AS highest_rpn"])

    for step, _ in (STEPS[1], STEPS[4], STEPS[7]):
        ranked = sorted((r for r in rows if r["step"] == step), key=lambda r: -r["rpn"])
        items.append({
            "question": f"Rank the failure modes of the {step} process step by the risk "
                        f"priority number.",
            "ground_truth": f"{ranked[0]['mode']} ranks first with an RPN of {ranked[0]['rpn']}. "
                            f"{ranked[-1]['mode']} ranks last with an RPN of {ranked[-1]['rpn']}.",
            "relevance_key": [r["mode"] for r in ranked]})
        rules.append([f"rank the failure modes of the {rx(step)} process step",
                      f'MATCH (s:ProcessStep {{name: "{step}"}})<-[:occursAtProcessStep]-'
                      f"(m:FailureMode)-[:isDueToFailureCause]->(c:FailureCause) "
                      f"RETURN m.name AS failure_mode, c.RPN AS rpn ORDER BY rpn DESC"])

    picks = rng.sample(rows, 12)
    for r in picks[:8]:
        items.append({
            "question": f"How can we mitigate {r['mode'].lower()} in the {r['step']} process?",
            "ground_truth": f"{r['mode']} is mitigated by {r['measure'].lower()}.",
            "relevance_key": [r["measure"]]})
    for r in picks[8:]:
        items.append({
            "question": f"Is {r['mode'].lower()} caused by {r['cause'].lower()}?",
            "ground_truth": f"Yes, {r['mode'].lower()} is due to {r['cause'].lower()}.",
            "relevance_key": [r["cause"]]})

    with open(out / "fixture50_dataset.json", "w", encoding="utf-8") as f:
        json.dump({"items": items}, f, indent=2)
        f.write("\n")
    write_csv(out / "fixture50_mock.csv", ["pattern", "completion"], rules)


def severity_fixture(out, rng):
    # 20 effects, 14 of them with S above 5. No cell renders as the token 14.
    severities = [rng.randint(6, 10) for _ in range(14)] + [rng.randint(1, 5) for _ in range(6)]
    rng.shuffle(severities)
    rows = []
    for i, s in enumerate(severities):
        step, obj = STEPS[i % 4]
        while True:
            o, d = rng.randint(1, 9), rng.randint(1, 8)
            if s * o * d != 14:
                break
        effect = f"{CONSEQUENCES[i % 10]} in {COMPONENTS[i // 10 + i % 3]}"
        rows.append([step, f"{DEFECTS[i % 5]} of {obj} variant {chr(ord('A') + i)}", effect, s,
                     f"{CAUSE_ADJ[i % 10]} {CAUSE_NOUN[(i // 10 + i) % 5]}", o,
                     f"{MEASURE_ACTION[i % 10]} {MEASURE_OBJECT[(i // 10 + i) % 5]}", d,
                     s * o * d])
    write_csv(out / "severity_fixture.csv", HEADER, rows)


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    out.mkdir(parents=True, exist_ok=True)
    fixture50(out, random.Random(7))
    severity_fixture(out, random.Random(11))


if __name__ == "__main__":
    main()
