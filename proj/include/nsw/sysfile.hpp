#pragma once

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nsw/exponents.hpp"
#include "nsw/profile.hpp"

namespace nsw {

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(int line_, int col_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

/// Parsed system-definition file: an optional vector-field system, an
/// optional linear substitution, and raw index-set charts.
struct SystemFile {
    std::optional<VectorFieldSystem> system;
    std::optional<Matrix> subst;
    std::vector<IndexPairSet> charts;
};

namespace detail {

struct Token {
    enum class Kind { Number, Ident, Symbol, End } kind;
    std::string text;
    int col;
};

inline std::vector<Token> tokenize_line(const std::string& line, int lineno) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (std::isspace((unsigned char)c)) {
            ++i;
            continue;
        }
        int col = (int)i + 1;
        if (std::isdigit((unsigned char)c)) {
            std::size_t j = i;
            while (j < line.size() && std::isdigit((unsigned char)line[j])) ++j;
            out.push_back({Token::Kind::Number, line.substr(i, j - i), col});
            i = j;
        } else if (std::isalpha((unsigned char)c) || c == '_') {
            std::size_t j = i;
            while (j < line.size() &&
                   (std::isalnum((unsigned char)line[j]) || line[j] == '_'))
                ++j;
            out.push_back({Token::Kind::Ident, line.substr(i, j - i), col});
            i = j;
        } else if (std::string("+-*/^=;").find(c) != std::string::npos) {
            out.push_back({Token::Kind::Symbol, std::string(1, c), col});
            ++i;
        } else {
            throw ParseError(lineno, col, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Token::Kind::End, "", (int)line.size() + 1});
    return out;
}

// Cursor over one line's tokens.
struct Cursor {
    const std::vector<Token>& toks;
    std::size_t pos = 0;
    int lineno;

    const Token& peek() const { return toks[pos]; }
    const Token& next() { return toks[pos++]; }
    bool at_end() const { return toks[pos].kind == Token::Kind::End; }

    bool accept_symbol(const std::string& s) {
        if (toks[pos].kind == Token::Kind::Symbol && toks[pos].text == s) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(lineno, toks[pos].col, msg);
    }

    long expect_integer(const std::string& what) {
        if (toks[pos].kind != Token::Kind::Number) fail("expected " + what);
        try {
            return std::stol(next().text);
        } catch (const std::out_of_range&) {
            --pos;
            fail("integer literal out of range");
        }
    }

    Rational expect_rational(const std::string& what) {
        bool neg = accept_symbol("-");
        if (toks[pos].kind != Token::Kind::Number) fail("expected " + what);
        std::string num = next().text;
        std::string den = "1";
        if (accept_symbol("/")) {
            if (toks[pos].kind != Token::Kind::Number) fail("expected denominator");
            den = next().text;
            if (den == "0") fail("zero denominator");
        }
        Rational r = Rational::from_string(num + "/" + den);
        return neg ? -r : r;
    }
};

// index of "x<k>" or "d<j>" references, 1-based in the text
inline int ref_index(const std::string& text, char prefix) {
    if (text.size() < 2 || text[0] != prefix) return -1;
    for (std::size_t i = 1; i < text.size(); ++i)
        if (!std::isdigit((unsigned char)text[i])) return -1;
    return std::stoi(text.substr(1));
}

inline bool is_keyword(const std::string& s) {
    return s == "dim" || s == "weights" || s == "field" || s == "subst" || s == "chart" ||
           s == "pair" || s == "b";
}

// One summand of a field expression: an optional rational coefficient and
// variable powers multiplied together, ending in exactly one d<j> factor.
inline void parse_field_term(Cursor& cur, int n, int sign, std::vector<Poly>& coeffs) {
    Rational coef(sign);
    Exponent expo(n, 0);
    int dindex = -1;
    bool any = false;
    for (;;) {
        const Token& t = cur.peek();
        if (t.kind == Token::Kind::Number) {
            coef *= cur.expect_rational("coefficient");
            any = true;
        } else if (t.kind == Token::Kind::Ident) {
            int xi = ref_index(t.text, 'x');
            int di = ref_index(t.text, 'd');
            if (xi > 0) {
                if (xi > n) cur.fail("variable x" + std::to_string(xi) + " out of range");
                cur.next();
                int e = 1;
                if (cur.accept_symbol("^")) e = (int)cur.expect_integer("exponent");
                expo[xi - 1] += e;
            } else if (di > 0) {
                if (di > n) cur.fail("direction d" + std::to_string(di) + " out of range");
                if (dindex >= 0) cur.fail("term has more than one d factor");
                cur.next();
                dindex = di - 1;
            } else {
                cur.fail("expected x<k>, d<j> or a number");
            }
            any = true;
        } else {
            cur.fail("expected a factor");
        }
        if (!cur.accept_symbol("*")) break;
    }
    if (!any) cur.fail("empty term");
    if (dindex < 0) cur.fail("term lacks a d<j> factor");
    coeffs[dindex].add_term(std::move(expo), coef);
}

inline std::vector<Poly> parse_field_expr(Cursor& cur, int n) {
    std::vector<Poly> coeffs(n, Poly::zero(n));
    int sign = 1;
    if (cur.accept_symbol("-")) sign = -1;
    else cur.accept_symbol("+");
    for (;;) {
        parse_field_term(cur, n, sign, coeffs);
        if (cur.accept_symbol("+")) sign = 1;
        else if (cur.accept_symbol("-")) sign = -1;
        else break;
    }
    if (!cur.at_end()) cur.fail("trailing tokens after field expression");
    return coeffs;
}

struct ChartDraft {
    int n = 0;
    int lineno = 0;
    std::vector<IndexPair> pairs;
    std::optional<std::vector<int>> b;
};

inline IndexPairSet finish_chart(const ChartDraft& draft) {
    if (draft.pairs.empty())
        throw ParseError(draft.lineno, 1, "chart has no pairs");
    return IndexPairSet(draft.n, draft.pairs,
                        draft.b ? *draft.b : std::vector<int>(draft.n, 0));
}

} // namespace detail

/// Parses the line-oriented system grammar:
///   dim <n>
///   weights <a1> ... <an>
///   field <name> = <sum of poly-terms ending in d<j>>
///   subst <row> ; <row> ; ...        (optional, v x v rationals)
///   chart <N> / pair <a1..aN> <s> / b <b1..bN>   (optional, repeatable)
/// '#' starts a comment; lines are whitespace-insensitive.
inline SystemFile parse_system(const std::string& text) {
    SystemFile out;
    int dim = 0;
    std::optional<DilationWeights> weights;
    std::vector<std::string> names;
    std::vector<VectorField> fields;
    std::optional<detail::ChartDraft> chart;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    int last_line = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::tokenize_line(line, lineno);
        detail::Cursor cur{toks, 0, lineno};
        if (cur.at_end()) continue;
        last_line = lineno;
        if (cur.peek().kind != detail::Token::Kind::Ident) cur.fail("expected a directive");
        std::string kw = cur.next().text;

        if (kw == "dim") {
            if (dim > 0) cur.fail("duplicate dim");
            long v = cur.expect_integer("dimension");
            if (v < 1 || v > 8) cur.fail("dim must be between 1 and 8");
            if (!cur.at_end()) cur.fail("trailing tokens after dim");
            dim = (int)v;
        } else if (kw == "weights") {
            if (dim == 0) cur.fail("weights before dim");
            if (weights) cur.fail("duplicate weights");
            std::vector<int> alpha;
            while (!cur.at_end()) alpha.push_back((int)cur.expect_integer("weight"));
            if ((int)alpha.size() != dim) cur.fail("expected exactly dim weights");
            try {
                weights.emplace(std::move(alpha));
            } catch (const std::invalid_argument& e) {
                throw ParseError(lineno, 1, e.what());
            }
        } else if (kw == "field") {
            if (!weights) cur.fail("field before weights");
            if (cur.peek().kind != detail::Token::Kind::Ident) cur.fail("expected field name");
            std::string name = cur.next().text;
            if (detail::is_keyword(name)) cur.fail("field name clashes with a keyword");
            for (const auto& existing : names)
                if (existing == name) cur.fail("duplicate field name " + name);
            if (!cur.accept_symbol("=")) cur.fail("expected '='");
            std::vector<Poly> coeffs = detail::parse_field_expr(cur, dim);
            VectorField vf(std::move(coeffs));
            if (vf.is_zero()) throw ParseError(lineno, 1, "field " + name + " is identically zero");
            if (!field_is_homogeneous(vf, *weights, 1))
                throw ParseError(lineno, 1,
                                 "field " + name + " is not delta_t-homogeneous of degree 1");
            names.push_back(std::move(name));
            fields.push_back(std::move(vf));
        } else if (kw == "subst") {
            if (out.subst) cur.fail("duplicate subst");
            Matrix m;
            std::vector<Rational> row;
            while (!cur.at_end()) {
                if (cur.accept_symbol(";")) {
                    if (row.empty()) cur.fail("empty matrix row");
                    m.push_back(std::move(row));
                    row.clear();
                } else {
                    row.push_back(cur.expect_rational("matrix entry"));
                }
            }
            if (!row.empty()) m.push_back(std::move(row));
            if (m.empty()) cur.fail("empty substitution matrix");
            for (const auto& rw : m)
                if (rw.size() != m.size()) cur.fail("substitution matrix must be square");
            out.subst = std::move(m);
        } else if (kw == "chart") {
            if (chart) out.charts.push_back(detail::finish_chart(*chart));
            long v = cur.expect_integer("chart dimension");
            if (v < 1 || v > 7) cur.fail("chart dimension must be between 1 and 7");
            if (!cur.at_end()) cur.fail("trailing tokens after chart");
            chart = detail::ChartDraft{(int)v, lineno, {}, std::nullopt};
        } else if (kw == "pair") {
            if (!chart) cur.fail("pair outside a chart block");
            std::vector<long> nums;
            while (!cur.at_end()) nums.push_back(cur.expect_integer("pair entry"));
            if ((int)nums.size() != chart->n + 1)
                cur.fail("pair needs " + std::to_string(chart->n) + " exponents and one power");
            IndexPair p;
            for (int i = 0; i < chart->n; ++i) {
                if (nums[i] < 0) cur.fail("negative exponent");
                p.a.push_back((int)nums[i]);
            }
            if (nums.back() < 0) cur.fail("negative power");
            p.s = (int)nums.back();
            chart->pairs.push_back(std::move(p));
        } else if (kw == "b") {
            if (!chart) cur.fail("b outside a chart block");
            if (chart->b) cur.fail("duplicate b in chart");
            std::vector<int> b;
            while (!cur.at_end()) {
                long v = cur.expect_integer("b entry");
                if (v < 0) cur.fail("negative b entry");
                b.push_back((int)v);
            }
            if ((int)b.size() != chart->n) cur.fail("b needs exactly " + std::to_string(chart->n) + " entries");
            chart->b = std::move(b);
        } else {
            cur.fail("unknown directive '" + kw + "'");
        }
    }
    if (chart) out.charts.push_back(detail::finish_chart(*chart));

    if (dim > 0 || weights || !fields.empty()) {
        if (dim == 0 || !weights) throw ParseError(last_line, 1, "incomplete system: need dim and weights");
        if (fields.empty()) throw ParseError(last_line, 1, "empty field list");
        out.system.emplace(*weights, std::move(fields), std::move(names));
    }
    if (!out.system && out.charts.empty())
        throw ParseError(std::max(last_line, 1), 1, "input defines neither a system nor a chart");
    return out;
}

namespace detail {

inline std::string field_expr_string(const VectorField& f) {
    std::ostringstream os;
    bool first = true;
    for (int j = 0; j < f.nvars(); ++j) {
        for (const auto& [e, c] : f.coeff(j).terms()) {
            Rational a = c.abs();
            if (first) {
                if (c.sign() < 0) os << "-";
                first = false;
            } else {
                os << (c.sign() < 0 ? " - " : " + ");
            }
            bool has_vars = Poly::total_degree(e) > 0;
            if (!has_vars || a != Rational(1)) {
                os << a.str();
                os << "*";
            }
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                os << "x" << (i + 1);
                if (e[i] > 1) os << "^" << e[i];
                os << "*";
            }
            os << "d" << (j + 1);
        }
    }
    return os.str();
}

} // namespace detail

/// Canonical text form; parsing it back reproduces the same SystemFile.
inline std::string print_system(const SystemFile& sf) {
    std::ostringstream os;
    if (sf.system) {
        const auto& sys = *sf.system;
        os << "dim " << sys.n() << "\n";
        os << "weights";
        for (int a : sys.weights().all()) os << " " << a;
        os << "\n";
        for (int i = 0; i < sys.m(); ++i)
            os << "field " << sys.name(i) << " = " << detail::field_expr_string(sys.field(i)) << "\n";
    }
    if (sf.subst) {
        os << "subst";
        for (std::size_t i = 0; i < sf.subst->size(); ++i) {
            if (i > 0) os << " ;";
            for (const auto& x : (*sf.subst)[i]) os << " " << x.str();
        }
        os << "\n";
    }
    for (const auto& chart : sf.charts) {
        os << "chart " << chart.N() << "\n";
        for (const auto& p : chart.pairs()) {
            os << "pair";
            for (int a : p.a) os << " " << a;
            os << " " << p.s << "\n";
        }
        os << "b";
        for (int x : chart.b()) os << " " << x;
        os << "\n";
    }
    return os.str();
}

} // namespace nsw
