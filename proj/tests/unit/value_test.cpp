#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "generators.hpp"
#include "kgrag/text.hpp"
#include "kgrag/value.hpp"

using namespace kgrag;

TEST(TotalOrder, RanksKindsNullNumberTextVector) {
    const Value n = Null{}, i = std::int64_t{3}, s = std::string("a"), v = std::vector<double>{1.0};
    EXPECT_TRUE(total_order(n, i) < 0);
    EXPECT_TRUE(total_order(i, s) < 0);
    EXPECT_TRUE(total_order(s, v) < 0);
    EXPECT_TRUE(total_order(n, n) == 0);
}

TEST(TotalOrder, NumbersCompareByValue) {
    EXPECT_TRUE(total_order(std::int64_t{2}, 2.5) < 0);
    EXPECT_TRUE(total_order(3.0, std::int64_t{2}) > 0);
    // an integer sorts before an equal real
    EXPECT_TRUE(total_order(std::int64_t{2}, 2.0) < 0);
    EXPECT_TRUE(total_order(2.0, std::int64_t{2}) > 0);
}

TEST(TotalOrder, LargeIntegersCompareExactly) {
    const std::int64_t big = (std::int64_t{1} << 60) + 1;
    EXPECT_TRUE(total_order(big - 1, big) < 0);
}

TEST(TotalOrder, NanSortsAfterNumbers) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_TRUE(total_order(nan, 1e300) > 0);
    EXPECT_TRUE(total_order(nan, nan) == 0);
}

TEST(TotalOrder, IsAntisymmetricAndTransitive) {
    testgen::Rng rng(5);
    auto draw = [&]() -> Value {
        switch (rng.uniform(0, 4)) {
            case 0: return Null{};
            case 1: return rng.uniform(-3, 3);
            case 2: return static_cast<double>(rng.uniform(-6, 6)) / 2.0;
            case 3: return std::string(1, static_cast<char>('a' + rng.uniform(0, 3)));
            default: return std::vector<double>{static_cast<double>(rng.uniform(0, 2))};
        }
    };
    for (int t = 0; t < 2000; ++t) {
        const Value a = draw(), b = draw(), c = draw();
        EXPECT_EQ(total_order(a, b) < 0, total_order(b, a) > 0);
        if (total_order(a, b) <= 0 && total_order(b, c) <= 0) {
            EXPECT_TRUE(total_order(a, c) <= 0);
        }
    }
}

TEST(Comparable, OnlyLikeKinds) {
    EXPECT_TRUE(comparable(std::int64_t{1}, 2.0));
    EXPECT_TRUE(comparable(std::string("a"), std::string("b")));
    EXPECT_FALSE(comparable(std::string("7"), std::int64_t{7}));
    EXPECT_FALSE(comparable(Null{}, Null{}));
    EXPECT_FALSE(comparable(Null{}, std::int64_t{0}));
}

TEST(Display, IntegersAndReals) {
    EXPECT_EQ(to_display(std::int64_t{14}), "14");
    EXPECT_EQ(to_display(2.5), "2.5");
    EXPECT_EQ(to_display(3.0), "3.0");
    EXPECT_EQ(to_display(Null{}), "null");
    EXPECT_EQ(to_display(std::string("x y")), "x y");
}

TEST(FormatDouble, RoundTrips) {
    testgen::Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        const double d = rng.real(-1e6, 1e6);
        EXPECT_EQ(std::stod(format_double(d)), d);
    }
}

TEST(CanonicalText, TrimsAndCollapses) {
    EXPECT_EQ(canonical_text("  Weak \t weld\n joints  "), "Weak weld joints");
    EXPECT_EQ(canonical_text(""), "");
    EXPECT_EQ(canonical_text(" \t "), "");
    EXPECT_EQ(canonical_text("Schweißnaht  fehlt"), "Schweißnaht fehlt");
}

TEST(CanonicalText, IsIdempotent) {
    testgen::Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const std::string s = testgen::messy(rng, "a b  c\td");
        EXPECT_EQ(canonical_text(canonical_text(s)), canonical_text(s));
    }
}

TEST(WordTokens, LowercasesAndKeepsUtf8) {
    const auto t = word_tokens("S-value: 7, Schweißnaht!");
    ASSERT_EQ(t.size(), 4u);
    EXPECT_EQ(t[0], "s");
    EXPECT_EQ(t[1], "value");
    EXPECT_EQ(t[2], "7");
    EXPECT_EQ(t[3], "schweißnaht");
}

TEST(Contains, IgnoresAsciiCase) {
    EXPECT_TRUE(contains_case_insensitive("Weld Quality Checks", "quality"));
    EXPECT_FALSE(contains_case_insensitive("Weld", "welds"));
}
