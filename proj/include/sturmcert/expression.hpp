#pragma once

// Small arithmetic expression language used by problem configs.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary (('^' | '**') unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: exp log abs sqrt sin cos pow min max. Constant: pi.
// Predicates are conjunctions ('&&' or 'and') of possibly chained comparisons
// (<, <=, >, >=, ==, !=); an empty predicate or 'true' always holds.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sturmcert/error.hpp"

namespace sturmcert {

namespace detail {

enum class NodeKind { constant, variable, neg, add, sub, mul, div, pow, call };

enum class Builtin { exp, log, abs, sqrt, sin, cos, pow, min, max };

struct ExprNode {
    NodeKind kind = NodeKind::constant;
    double value = 0.0;
    std::size_t var = 0;
    Builtin fn = Builtin::exp;
    std::vector<std::size_t> args;
};

/// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

class Expression {
public:
    Expression() : nodes_{detail::ExprNode{}}, source_("0") {}

    static Expression parse(std::string_view text, std::vector<std::string> variables) {
        Expression e;
        e.source_ = detail::trim(text);
        e.variables_ = std::move(variables);
        e.nodes_.clear();
        Parser p{e, e.source_, 0};
        e.root_ = p.parse_expr();
        p.skip_ws();
        if (p.pos != e.source_.size())
            p.fail("unexpected '" + std::string(1, e.source_[p.pos]) + "'");
        return e;
    }

    static Expression constant(double v) {
        Expression e;
        e.nodes_ = {detail::ExprNode{detail::NodeKind::constant, v, 0, detail::Builtin::exp, {}}};
        e.root_ = 0;
        e.source_ = detail::format_number(v);
        return e;
    }

    double operator()(std::span<const double> vars) const { return eval(root_, vars); }

    double operator()(std::initializer_list<double> vars) const {
        return eval(root_, std::span<const double>(vars.begin(), vars.size()));
    }

    const std::string& source() const noexcept { return source_; }
    const std::vector<std::string>& variables() const noexcept { return variables_; }

    bool operator==(const Expression& o) const {
        return source_ == o.source_ && variables_ == o.variables_;
    }

private:
    friend class Predicate;

    struct Parser {
        Expression& e;
        const std::string& s;
        std::size_t pos;

        [[noreturn]] void fail(const std::string& msg) const {
            throw ConfigError("expression '" + s + "' at column " + std::to_string(pos + 1) +
                              ": " + msg);
        }

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }

        bool accept(std::string_view tok) {
            skip_ws();
            if (s.compare(pos, tok.size(), tok) == 0) {
                pos += tok.size();
                return true;
            }
            return false;
        }

        std::size_t push(detail::ExprNode n) {
            e.nodes_.push_back(std::move(n));
            return e.nodes_.size() - 1;
        }

        std::size_t binary(detail::NodeKind k, std::size_t l, std::size_t r) {
            return push({k, 0.0, 0, detail::Builtin::exp, {l, r}});
        }

        std::size_t parse_expr() {
            auto lhs = parse_term();
            for (;;) {
                if (accept("+"))
                    lhs = binary(detail::NodeKind::add, lhs, parse_term());
                else if (accept("-"))
                    lhs = binary(detail::NodeKind::sub, lhs, parse_term());
                else
                    return lhs;
            }
        }

        std::size_t parse_term() {
            auto lhs = parse_unary();
            for (;;) {
                skip_ws();
                if (s.compare(pos, 2, "**") == 0) return lhs;  // handled by parse_power
                if (accept("*"))
                    lhs = binary(detail::NodeKind::mul, lhs, parse_unary());
                else if (accept("/"))
                    lhs = binary(detail::NodeKind::div, lhs, parse_unary());
                else
                    return lhs;
            }
        }

        std::size_t parse_unary() {
            if (accept("-")) return push({detail::NodeKind::neg, 0.0, 0, detail::Builtin::exp, {parse_unary()}});
            if (accept("+")) return parse_unary();
            return parse_power();
        }

        std::size_t parse_power() {
            auto base = parse_primary();
            if (accept("**") || accept("^")) return binary(detail::NodeKind::pow, base, parse_unary());
            return base;
        }

        std::size_t parse_primary() {
            skip_ws();
            if (pos >= s.size()) fail("unexpected end of expression");
            char ch = s[pos];
            if (ch == '(') {
                ++pos;
                auto inner = parse_expr();
                if (!accept(")")) fail("expected ')'");
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
                const char* begin = s.c_str() + pos;
                char* end = nullptr;
                double v = std::strtod(begin, &end);
                if (end == begin) fail("malformed number");
                pos += static_cast<std::size_t>(end - begin);
                return push({detail::NodeKind::constant, v, 0, detail::Builtin::exp, {}});
            }
            if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                std::size_t start = pos;
                while (pos < s.size() &&
                       (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                    ++pos;
                std::string name = s.substr(start, pos - start);
                skip_ws();
                if (pos < s.size() && s[pos] == '(') {
                    ++pos;
                    return parse_call(name);
                }
                if (name == "pi")
                    return push({detail::NodeKind::constant, std::numbers::pi, 0, detail::Builtin::exp, {}});
                auto it = std::find(e.variables_.begin(), e.variables_.end(), name);
                if (it == e.variables_.end()) {
                    pos = start;
                    fail("unknown variable '" + name + "'");
                }
                return push({detail::NodeKind::variable, 0.0,
                             static_cast<std::size_t>(it - e.variables_.begin()),
                             detail::Builtin::exp, {}});
            }
            fail("unexpected '" + std::string(1, ch) + "'");
        }

        std::size_t parse_call(const std::string& name) {
            static const std::pair<std::string_view, detail::Builtin> table[] = {
                {"exp", detail::Builtin::exp},   {"log", detail::Builtin::log},
                {"abs", detail::Builtin::abs},   {"sqrt", detail::Builtin::sqrt},
                {"sin", detail::Builtin::sin},   {"cos", detail::Builtin::cos},
                {"pow", detail::Builtin::pow},   {"min", detail::Builtin::min},
                {"max", detail::Builtin::max}};
            auto it = std::find_if(std::begin(table), std::end(table),
                                   [&](const auto& p) { return p.first == name; });
            if (it == std::end(table)) fail("unknown function '" + name + "'");
            std::vector<std::size_t> args{parse_expr()};
            while (accept(",")) args.push_back(parse_expr());
            if (!accept(")")) fail("expected ')' after arguments of " + name);
            std::size_t want_min = 1, want_max = 1;
            if (it->second == detail::Builtin::pow) want_min = want_max = 2;
            if (it->second == detail::Builtin::min || it->second == detail::Builtin::max) {
                want_min = 2;
                want_max = static_cast<std::size_t>(-1);
            }
            if (args.size() < want_min || args.size() > want_max)
                fail("wrong number of arguments to " + name);
            return push({detail::NodeKind::call, 0.0, 0, it->second, std::move(args)});
        }
    };

    double eval(std::size_t i, std::span<const double> vars) const {
        const auto& n = nodes_[i];
        using K = detail::NodeKind;
        switch (n.kind) {
        case K::constant: return n.value;
        case K::variable: return n.var < vars.size() ? vars[n.var] : 0.0;
        case K::neg: return -eval(n.args[0], vars);
        case K::add: return eval(n.args[0], vars) + eval(n.args[1], vars);
        case K::sub: return eval(n.args[0], vars) - eval(n.args[1], vars);
        case K::mul: return eval(n.args[0], vars) * eval(n.args[1], vars);
        case K::div: return eval(n.args[0], vars) / eval(n.args[1], vars);
        case K::pow: return std::pow(eval(n.args[0], vars), eval(n.args[1], vars));
        case K::call: break;
        }
        using B = detail::Builtin;
        double a0 = eval(n.args[0], vars);
        switch (n.fn) {
        case B::exp: return std::exp(a0);
        case B::log: return std::log(a0);
        case B::abs: return std::abs(a0);
        case B::sqrt: return std::sqrt(a0);
        case B::sin: return std::sin(a0);
        case B::cos: return std::cos(a0);
        case B::pow: return std::pow(a0, eval(n.args[1], vars));
        case B::min:
        case B::max: {
            double r = a0;
            for (std::size_t k = 1; k < n.args.size(); ++k) {
                double v = eval(n.args[k], vars);
                r = n.fn == B::min ? std::min(r, v) : std::max(r, v);
            }
            return r;
        }
        }
        return 0.0;
    }

    std::vector<detail::ExprNode> nodes_;
    std::size_t root_ = 0;
    std::string source_;
    std::vector<std::string> variables_;
};

/// Conjunction of (chained) comparisons between expressions.
class Predicate {
public:
    static Predicate parse(std::string_view text, const std::vector<std::string>& variables) {
        Predicate p;
        p.source_ = detail::trim(text);
        p.variables_ = variables;
        if (p.source_.empty() || p.source_ == "true") return p;
        for (const auto& clause : split_conjunction(p.source_)) p.parse_clause(clause, variables);
        return p;
    }

    bool operator()(std::span<const double> vars) const {
        for (const auto& c : chains_) {
            double lhs = c.operands.front()(vars);
            for (std::size_t k = 0; k < c.ops.size(); ++k) {
                double rhs = c.operands[k + 1](vars);
                if (!compare(c.ops[k], lhs, rhs)) return false;
                lhs = rhs;
            }
        }
        return true;
    }

    bool operator()(std::initializer_list<double> vars) const {
        return (*this)(std::span<const double>(vars.begin(), vars.size()));
    }

    const std::string& source() const noexcept { return source_; }

    bool operator==(const Predicate& o) const {
        return source_ == o.source_ && variables_ == o.variables_;
    }

private:
    enum class Cmp { lt, le, gt, ge, eq, ne };

    struct Chain {
        std::vector<Expression> operands;
        std::vector<Cmp> ops;
    };

    static bool compare(Cmp op, double l, double r) {
        switch (op) {
        case Cmp::lt: return l < r;
        case Cmp::le: return l <= r;
        case Cmp::gt: return l > r;
        case Cmp::ge: return l >= r;
        case Cmp::eq: return l == r;
        case Cmp::ne: return l != r;
        }
        return false;
    }

    static std::vector<std::string> split_conjunction(const std::string& s) {
        std::vector<std::string> out;
        std::size_t start = 0;
        for (std::size_t i = 0; i < s.size();) {
            std::size_t skip = 0;
            if (s.compare(i, 2, "&&") == 0) {
                skip = 2;
            } else if (s.compare(i, 3, "and") == 0 &&
                       (i == 0 || !std::isalnum(static_cast<unsigned char>(s[i - 1]))) &&
                       (i + 3 >= s.size() || !std::isalnum(static_cast<unsigned char>(s[i + 3])))) {
                skip = 3;
            }
            if (skip) {
                out.push_back(s.substr(start, i - start));
                i += skip;
                start = i;
            } else {
                ++i;
            }
        }
        out.push_back(s.substr(start));
        return out;
    }

    void parse_clause(const std::string& clause, const std::vector<std::string>& variables) {
        Chain chain;
        std::size_t start = 0;
        for (std::size_t i = 0; i < clause.size();) {
            Cmp op{};
            std::size_t len = 0;
            if (clause.compare(i, 2, "<=") == 0) { op = Cmp::le; len = 2; }
            else if (clause.compare(i, 2, ">=") == 0) { op = Cmp::ge; len = 2; }
            else if (clause.compare(i, 2, "==") == 0) { op = Cmp::eq; len = 2; }
            else if (clause.compare(i, 2, "!=") == 0) { op = Cmp::ne; len = 2; }
            else if (clause[i] == '<') { op = Cmp::lt; len = 1; }
            else if (clause[i] == '>') { op = Cmp::gt; len = 1; }
            if (len == 0) {
                ++i;
                continue;
            }
            chain.operands.push_back(Expression::parse(clause.substr(start, i - start), variables));
            chain.ops.push_back(op);
            i += len;
            start = i;
        }
        if (chain.ops.empty())
            throw ConfigError("predicate clause '" + detail::trim(clause) + "' has no comparison");
        chain.operands.push_back(Expression::parse(clause.substr(start), variables));
        chains_.push_back(std::move(chain));
    }

    std::vector<Chain> chains_;
    std::string source_;
    std::vector<std::string> variables_;
};

}  // namespace sturmcert
