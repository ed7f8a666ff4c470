#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "kgrag/error.hpp"
#include "kgrag/query.hpp"
#include "kgrag/text.hpp"

namespace kgrag::query {

namespace {

enum class Tok { Ident, String, Integer, Real, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t col = 1;
    std::int64_t ival = 0;
    double dval = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    t.text.push_back(advance());
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                lex_number(t);
            } else if (c == '"' || c == '\'') {
                lex_string(t);
            } else {
                t.kind = Tok::Punct;
                t.text.push_back(advance());
                if (pos_ < src_.size()) {
                    const char n = src_[pos_];
                    if ((c == '<' && (n == '=' || n == '>')) || (c == '>' && n == '=') ||
                        (c == '!' && n == '='))
                        t.text.push_back(advance());
                }
                static const std::set<std::string> known = {
                    "(", ")", "[", "]", "{", "}", ":", ",", ".", "-", ">", "<",
                    "=", "<>", "!=", "<=", ">=", ";"};
                if (!known.count(t.text))
                    throw SyntaxError(t.line, t.col, "unexpected character '" + t.text + "'");
            }
            out.push_back(std::move(t));
        }
    }

private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            advance();
    }

    bool digit_at(std::size_t p) const {
        return p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]));
    }

    void lex_number(Token& t) {
        bool real = false;
        while (digit_at(pos_)) t.text.push_back(advance());
        if (pos_ < src_.size() && src_[pos_] == '.' && digit_at(pos_ + 1)) {
            real = true;
            t.text.push_back(advance());
            while (digit_at(pos_)) t.text.push_back(advance());
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (digit_at(p)) {
                real = true;
                while (pos_ < p) t.text.push_back(advance());
                while (digit_at(pos_)) t.text.push_back(advance());
            }
        }
        const char* b = t.text.data();
        const char* e = b + t.text.size();
        if (real) {
            t.kind = Tok::Real;
            auto [p, ec] = std::from_chars(b, e, t.dval);
            if (ec != std::errc{} || p != e)
                throw SyntaxError(t.line, t.col, "invalid number '" + t.text + "'");
        } else {
            t.kind = Tok::Integer;
            auto [p, ec] = std::from_chars(b, e, t.ival);
            if (ec != std::errc{} || p != e)
                throw SyntaxError(t.line, t.col, "integer out of range '" + t.text + "'");
        }
    }

    void lex_string(Token& t) {
        const char quote = advance();
        t.kind = Tok::String;
        for (;;) {
            if (pos_ >= src_.size()) throw SyntaxError(t.line, t.col, "unterminated string");
            const char c = advance();
            if (c == quote) return;
            if (c == '\\') {
                if (pos_ >= src_.size()) throw SyntaxError(t.line, t.col, "unterminated string");
                const char e = advance();
                switch (e) {
                    case 'n': t.text.push_back('\n'); break;
                    case 't': t.text.push_back('\t'); break;
                    case 'r': t.text.push_back('\r'); break;
                    default: t.text.push_back(e); break;
                }
                continue;
            }
            t.text.push_back(c);
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

const std::set<std::string>& keywords() {
    static const std::set<std::string> k = {"match", "where", "and",  "return", "order",
                                            "by",    "asc",   "desc", "limit",  "as",
                                            "distinct", "count", "sum", "avg", "min", "max"};
    return k;
}

std::optional<Aggregate> aggregate_named(std::string_view s) {
    const std::string l = to_lower_ascii(s);
    if (l == "count") return Aggregate::Count;
    if (l == "sum") return Aggregate::Sum;
    if (l == "avg") return Aggregate::Avg;
    if (l == "min") return Aggregate::Min;
    if (l == "max") return Aggregate::Max;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

    QueryAst run() {
        QueryAst q;
        expect_keyword("MATCH");
        parse_pattern(q.pattern);
        if (accept_keyword("WHERE")) {
            do {
                q.where.push_back(parse_condition());
            } while (accept_keyword("AND"));
        }
        expect_keyword("RETURN");
        do {
            q.returns.push_back(parse_item());
        } while (accept_punct(","));
        if (accept_keyword("ORDER")) {
            expect_keyword("BY");
            order_tok_ = peek();
            OrderKey key;
            key.expr = parse_expression();
            if (accept_keyword("DESC")) key.descending = true;
            else accept_keyword("ASC");
            q.order = key;
        }
        if (accept_keyword("LIMIT")) {
            const Token& t = peek();
            if (t.kind != Tok::Integer) fail(t, "LIMIT expects a non-negative integer");
            q.limit = t.ival;
            ++pos_;
        }
        accept_punct(";");
        if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "'");
        validate(q);
        return q;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }

    [[noreturn]] static void fail(const Token& t, const std::string& msg) {
        throw SyntaxError(t.line, t.col, msg);
    }

    static bool is_keyword(const Token& t, std::string_view kw) {
        return t.kind == Tok::Ident && to_lower_ascii(t.text) == to_lower_ascii(kw);
    }

    bool accept_keyword(std::string_view kw) {
        if (!is_keyword(peek(), kw)) return false;
        ++pos_;
        return true;
    }

    void expect_keyword(std::string_view kw) {
        if (!accept_keyword(kw)) fail(peek(), "expected " + std::string(kw));
    }

    bool accept_punct(std::string_view p) {
        if (peek().kind != Tok::Punct || peek().text != p) return false;
        ++pos_;
        return true;
    }

    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) {
            const Token& t = peek();
            fail(t, "expected '" + std::string(p) + "'" +
                        (t.kind == Tok::End ? std::string(" at end of query")
                                            : ", found '" + t.text + "'"));
        }
    }

    std::string expect_ident(const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail(t, std::string("expected ") + what);
        ++pos_;
        return t.text;
    }

    std::string expect_variable() {
        const Token& t = peek();
        if (t.kind != Tok::Ident || keywords().count(to_lower_ascii(t.text)))
            fail(t, "expected a variable name");
        ++pos_;
        return t.text;
    }

    void parse_node(Pattern& p) {
        expect_punct("(");
        NodePattern n;
        n.var = expect_variable();
        if (accept_punct(":")) n.label = expect_ident("a node label");
        if (accept_punct("{")) {
            const Token& key = peek();
            if (expect_ident("a property name") != "name")
                fail(key, "only {name: \"...\"} filters are supported");
            expect_punct(":");
            const Token& v = peek();
            if (v.kind != Tok::String) fail(v, "expected a string");
            n.name = v.text;
            ++pos_;
            expect_punct("}");
        }
        expect_punct(")");
        p.nodes.push_back(std::move(n));
    }

    void parse_pattern(Pattern& p) {
        parse_node(p);
        for (;;) {
            EdgeStep e;
            if (accept_punct("-")) {
                expect_punct("[");
                expect_punct(":");
                e.type = expect_ident("a relation type");
                expect_punct("]");
                expect_punct("-");
                expect_punct(">");
                e.direction = Direction::Out;
            } else if (accept_punct("<")) {
                expect_punct("-");
                expect_punct("[");
                expect_punct(":");
                e.type = expect_ident("a relation type");
                expect_punct("]");
                expect_punct("-");
                e.direction = Direction::In;
            } else {
                return;
            }
            p.edges.push_back(std::move(e));
            parse_node(p);
        }
    }

    PropertyRef parse_ref() {
        ref_toks_.push_back(peek());
        PropertyRef r;
        r.var = expect_variable();
        if (accept_punct(".")) r.property = expect_ident("a property name");
        refs_.push_back(r);
        return r;
    }

    Operand parse_operand() {
        const Token& t = peek();
        if (t.kind == Tok::String) {
            ++pos_;
            return Value{t.text};
        }
        bool negative = false;
        if (t.kind == Tok::Punct && t.text == "-") {
            negative = true;
            ++pos_;
        }
        const Token& n = peek();
        if (n.kind == Tok::Integer) {
            ++pos_;
            return Value{negative ? -n.ival : n.ival};
        }
        if (n.kind == Tok::Real) {
            ++pos_;
            return Value{negative ? -n.dval : n.dval};
        }
        if (negative) fail(n, "expected a number after '-'");
        return parse_ref();
    }

    Condition parse_condition() {
        Condition c;
        c.lhs = parse_operand();
        const Token& t = peek();
        static const std::map<std::string, Comparator> ops = {
            {"=", Comparator::Eq},  {"<>", Comparator::Ne}, {"!=", Comparator::Ne},
            {"<", Comparator::Lt},  {"<=", Comparator::Le}, {">", Comparator::Gt},
            {">=", Comparator::Ge}};
        auto it = t.kind == Tok::Punct ? ops.find(t.text) : ops.end();
        if (it == ops.end()) fail(t, "expected a comparison operator");
        c.op = it->second;
        ++pos_;
        c.rhs = parse_operand();
        return c;
    }

    Expression parse_expression() {
        Expression e;
        const Token& t = peek();
        if (t.kind == Tok::Ident && peek(1).kind == Tok::Punct && peek(1).text == "(") {
            e.aggregate = aggregate_named(t.text);
            if (!e.aggregate) fail(t, "unknown function '" + t.text + "'");
            pos_ += 2;
            if (accept_keyword("DISTINCT")) e.distinct = true;
            e.ref = parse_ref();
            expect_punct(")");
            return e;
        }
        e.ref = parse_ref();
        return e;
    }

    ReturnItem parse_item() {
        item_toks_.push_back(peek());
        ReturnItem item;
        item.expr = parse_expression();
        if (accept_keyword("AS")) item.alias = expect_ident("an alias");
        return item;
    }

    void validate(QueryAst& q) {
        std::set<std::string> bound;
        for (const auto& n : q.pattern.nodes) bound.insert(n.var);

        std::set<std::string> aliases;
        for (const auto& r : q.returns)
            if (r.alias) aliases.insert(*r.alias);

        // An ORDER BY key written as a bare name that is not a variable but
        // is a RETURN alias refers to that column.
        if (q.order && !q.order->expr.aggregate && !q.order->expr.ref.property &&
            !bound.count(q.order->expr.ref.var) && aliases.count(q.order->expr.ref.var)) {
            q.order->by_alias = true;
            // the alias parsed as a ref; drop it before the bound check
            for (std::size_t i = refs_.size(); i-- > 0;) {
                if (refs_[i] == q.order->expr.ref) {
                    refs_.erase(refs_.begin() + static_cast<std::ptrdiff_t>(i));
                    ref_toks_.erase(ref_toks_.begin() + static_cast<std::ptrdiff_t>(i));
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < refs_.size(); ++i)
            if (!bound.count(refs_[i].var))
                throw UnboundVariable(ref_toks_[i].line, ref_toks_[i].col,
                                      "variable '" + refs_[i].var + "' is not bound in MATCH");

        const bool any_agg = std::any_of(q.returns.begin(), q.returns.end(),
                                         [](const ReturnItem& r) { return r.expr.aggregate; });
        for (std::size_t i = 0; i < q.returns.size(); ++i)
            if (any_agg != q.returns[i].expr.aggregate.has_value())
                throw MixedAggregate(item_toks_[i].line, item_toks_[i].col,
                                     "aggregates and plain values cannot be mixed in RETURN");

        if (q.order && !q.order->by_alias) {
            const bool in_returns =
                std::any_of(q.returns.begin(), q.returns.end(),
                            [&](const ReturnItem& r) { return r.expr == q.order->expr; });
            if (any_agg ? !in_returns : q.order->expr.aggregate.has_value())
                throw MixedAggregate(order_tok_.line, order_tok_.col,
                                     any_agg ? "ORDER BY of an aggregate query must name a "
                                               "returned aggregate"
                                             : "ORDER BY cannot aggregate in a plain query");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<PropertyRef> refs_;
    std::vector<Token> ref_toks_;
    std::vector<Token> item_toks_;
    Token order_tok_;
};

std::string quote_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out + "\"";
}

std::string print_ref(const PropertyRef& r) {
    return r.property ? r.var + "." + *r.property : r.var;
}

std::string print_operand(const Operand& o) {
    if (const auto* r = std::get_if<PropertyRef>(&o)) return print_ref(*r);
    const Value& v = std::get<Value>(o);
    if (const auto* s = std::get_if<std::string>(&v)) return quote_string(*s);
    return to_display(v);
}

}  // namespace

std::string_view to_string(Aggregate agg) {
    switch (agg) {
        case Aggregate::Count: return "count";
        case Aggregate::Sum: return "sum";
        case Aggregate::Avg: return "avg";
        case Aggregate::Min: return "min";
        case Aggregate::Max: return "max";
    }
    return "?";
}

std::string_view to_string(Comparator op) {
    switch (op) {
        case Comparator::Eq: return "=";
        case Comparator::Ne: return "<>";
        case Comparator::Lt: return "<";
        case Comparator::Le: return "<=";
        case Comparator::Gt: return ">";
        case Comparator::Ge: return ">=";
    }
    return "?";
}

std::string to_string(const Expression& e) {
    if (!e.aggregate) return print_ref(e.ref);
    return std::string(to_string(*e.aggregate)) + "(" + (e.distinct ? "DISTINCT " : "") +
           print_ref(e.ref) + ")";
}

std::string ReturnItem::column_name() const { return alias ? *alias : to_string(expr); }

bool QueryAst::is_aggregate() const {
    return std::any_of(returns.begin(), returns.end(),
                       [](const ReturnItem& r) { return r.expr.aggregate.has_value(); });
}

QueryAst parse_query(std::string_view text) { return Parser(text).run(); }

std::string print_query(const QueryAst& q) {
    std::string out = "MATCH ";
    for (std::size_t i = 0; i < q.pattern.nodes.size(); ++i) {
        if (i > 0) {
            const EdgeStep& e = q.pattern.edges[i - 1];
            out += e.direction == Direction::Out ? "-[:" + e.type + "]->" : "<-[:" + e.type + "]-";
        }
        const NodePattern& n = q.pattern.nodes[i];
        out += "(" + n.var;
        if (n.label) out += ":" + *n.label;
        if (n.name) out += " {name: " + quote_string(*n.name) + "}";
        out += ")";
    }
    for (std::size_t i = 0; i < q.where.size(); ++i) {
        out += i == 0 ? " WHERE " : " AND ";
        const Condition& c = q.where[i];
        out += print_operand(c.lhs) + " " + std::string(to_string(c.op)) + " " +
               print_operand(c.rhs);
    }
    out += " RETURN ";
    for (std::size_t i = 0; i < q.returns.size(); ++i) {
        if (i) out += ", ";
        out += to_string(q.returns[i].expr);
        if (q.returns[i].alias) out += " AS " + *q.returns[i].alias;
    }
    if (q.order) {
        out += " ORDER BY " + to_string(q.order->expr);
        if (q.order->descending) out += " DESC";
    }
    if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
    return out;
}

}  // namespace kgrag::query
