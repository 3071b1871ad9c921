#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "cmq/cylinder.hpp"
#include "cmq/errors.hpp"
#include "cmq/trivariate.hpp"

namespace cmq {

namespace expr_detail {

struct Lexer {
    std::string src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= src.size();
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    bool consume(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    bool number(double& out) {
        skip_ws();
        const char* start = src.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        if (end == start) return false;
        // reject if this is actually an identifier like "x1"
        if (std::isalpha(static_cast<unsigned char>(*start))) return false;
        pos += static_cast<std::size_t>(end - start);
        out = v;
        return true;
    }

    bool identifier(std::string& out) {
        skip_ws();
        if (pos >= src.size() || !std::isalpha(static_cast<unsigned char>(src[pos]))) return false;
        std::size_t start = pos;
        while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])))) ++pos;
        out = src.substr(start, pos - start);
        return true;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw ArgumentError("expression parse error at offset " + std::to_string(pos) + ": " + what);
    }
};

// Recursive-descent parser over a small value concept: Traits must provide
// value_type, from_number, from_variable, add, sub, mul.
template <typename Traits>
class Parser {
public:
    using V = typename Traits::value_type;

    explicit Parser(std::string src) { lex_.src = std::move(src); }

    V parse() {
        V v = expression();
        if (!lex_.eof()) lex_.fail("trailing input");
        return v;
    }

private:
    V expression() {
        V acc = lex_.consume('-') ? neg(term()) : term();
        for (;;) {
            if (lex_.consume('+'))
                acc = Traits::add(acc, term());
            else if (lex_.consume('-'))
                acc = Traits::sub(acc, term());
            else
                return acc;
        }
    }

    V term() {
        V acc = factor();
        for (;;) {
            if (lex_.consume('*')) {
                acc = Traits::mul(acc, factor());
            } else {
                // implicit multiplication: "2 x", "3x1", "x z"
                const char c = lex_.peek();
                if (std::isalnum(static_cast<unsigned char>(c)) || c == '(')
                    acc = Traits::mul(acc, factor());
                else
                    return acc;
            }
        }
    }

    V factor() {
        V base = primary();
        if (lex_.consume('^')) {
            double e = 0.0;
            bool negative = lex_.consume('-');
            if (!lex_.number(e)) lex_.fail("expected integer exponent");
            if (negative || e < 0.0 || e != std::floor(e))
                lex_.fail("exponents must be nonnegative integers");
            const int n = static_cast<int>(e);
            V acc = Traits::from_number(1.0);
            for (int k = 0; k < n; ++k) acc = Traits::mul(acc, base);
            return acc;
        }
        return base;
    }

    V primary() {
        if (lex_.consume('(')) {
            V v = expression();
            if (!lex_.consume(')')) lex_.fail("expected ')'");
            return v;
        }
        double num;
        if (lex_.number(num)) return Traits::from_number(num);
        std::string id;
        if (lex_.identifier(id)) return Traits::from_variable(id, lex_);
        lex_.fail("expected number, variable or '('");
    }

    V neg(V v) { return Traits::sub(Traits::from_number(0.0), v); }

    Lexer lex_;
};

struct CylinderTraits {
    using value_type = CylinderObservable;
    static value_type from_number(double v) { return CylinderObservable::constant(cxd(v, 0.0)); }
    static value_type from_variable(const std::string& id, Lexer& lex) {
        if (id == "x") return CylinderObservable::position();
        if (id == "z") return CylinderObservable::z_power(1);
        if (id == "zbar") return CylinderObservable::z_power(-1);
        lex.fail("unknown variable '" + id + "' (expected x, z, zbar)");
    }
    static value_type add(value_type a, const value_type& b) { return a + b; }
    static value_type sub(value_type a, const value_type& b) { return a - b; }
    static value_type mul(const value_type& a, const value_type& b) { return a * b; }
};

struct TriTraits {
    using value_type = TriPoly;
    static value_type from_number(double v) { return TriPoly::constant(v); }
    static value_type from_variable(const std::string& id, Lexer& lex) {
        if (id == "x1") return TriPoly::coordinate(1);
        if (id == "x2") return TriPoly::coordinate(2);
        if (id == "x3") return TriPoly::coordinate(3);
        if (id == "C") return TriPoly::casimir();
        lex.fail("unknown variable '" + id + "' (expected x1, x2, x3, C)");
    }
    static value_type add(value_type a, const value_type& b) { return a + b; }
    static value_type sub(value_type a, const value_type& b) { return a - b; }
    static value_type mul(const value_type& a, const value_type& b) { return a * b; }
};

}  // namespace expr_detail

/// Parses expressions over x, z, zbar with +, -, *, integer powers and real
/// coefficients into a cylinder observable.
inline CylinderObservable parse_cylinder_observable(const std::string& src) {
    return expr_detail::Parser<expr_detail::CylinderTraits>(src).parse();
}

/// Parses expressions over x1, x2, x3, C into a polynomial on su(2)^*.
inline TriPoly parse_tripoly(const std::string& src) {
    return expr_detail::Parser<expr_detail::TriTraits>(src).parse();
}

/// Integer sweep lists: explicit commas plus the doubling shorthand
/// "4,..,1024" (and "4,8,...,1024").
inline std::vector<std::size_t> parse_size_list(const std::string& src) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    bool pending_fill = false;
    while (pos <= src.size()) {
        const std::size_t comma = std::min(src.find(',', pos), src.size());
        std::string tok = src.substr(pos, comma - pos);
        // trim
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.erase(tok.begin());
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.pop_back();
        if (tok == ".." || tok == "...") {
            if (out.empty()) throw ArgumentError("list shorthand needs a starting value");
            pending_fill = true;
        } else if (!tok.empty()) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
            if (end == tok.c_str() || *end != '\0')
                throw ArgumentError("bad integer in list: '" + tok + "'");
            if (pending_fill) {
                while (out.back() * 2 <= v) out.push_back(out.back() * 2);
                if (out.back() != v) out.push_back(v);
                pending_fill = false;
            } else {
                out.push_back(v);
            }
        }
        if (comma == src.size()) break;
        pos = comma + 1;
    }
    if (pending_fill) throw ArgumentError("list shorthand needs a closing value");
    if (out.empty()) throw ArgumentError("empty list");
    return out;
}

/// Real sweep lists; the shorthand doubles toward a larger bound or halves
/// toward a smaller one: "0.2,..,0.025" -> 0.2, 0.1, 0.05, 0.025.
inline std::vector<double> parse_real_list(const std::string& src) {
    std::vector<double> out;
    std::size_t pos = 0;
    bool pending_fill = false;
    while (pos <= src.size()) {
        const std::size_t comma = std::min(src.find(',', pos), src.size());
        std::string tok = src.substr(pos, comma - pos);
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.erase(tok.begin());
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.pop_back();
        if (tok == ".." || tok == "...") {
            if (out.empty()) throw ArgumentError("list shorthand needs a starting value");
            pending_fill = true;
        } else if (!tok.empty()) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw ArgumentError("bad number in list: '" + tok + "'");
            if (pending_fill) {
                if (v > out.back())
                    while (out.back() * 2.0 < v * (1.0 - 1e-12)) out.push_back(out.back() * 2.0);
                else
                    while (out.back() * 0.5 > v * (1.0 + 1e-12)) out.push_back(out.back() * 0.5);
                out.push_back(v);
                pending_fill = false;
            } else {
                out.push_back(v);
            }
        }
        if (comma == src.size()) break;
        pos = comma + 1;
    }
    if (pending_fill) throw ArgumentError("list shorthand needs a closing value");
    if (out.empty()) throw ArgumentError("empty list");
    return out;
}

}  // namespace cmq
