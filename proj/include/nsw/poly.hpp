#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsw/linalg.hpp"
#include "nsw/rational.hpp"

namespace nsw {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Exponent multi-index, stored densely (one entry per variable).
using Exponent = std::vector<int>;

/// Graded-lexicographic order: total degree first, then lexicographic.
struct GradedLexLess {
    bool operator()(const Exponent& a, const Exponent& b) const {
        long da = std::accumulate(a.begin(), a.end(), 0L);
        long db = std::accumulate(b.begin(), b.end(), 0L);
        if (da != db) return da < db;
        return a < b;
    }
};

/// Multivariate polynomial with exact rational coefficients.
/// Invariant: no stored coefficient is zero; the zero polynomial has an
/// empty term map.
class Poly {
public:
    using TermMap = std::map<Exponent, Rational, GradedLexLess>;

    explicit Poly(int nvars) : nvars_(nvars) {
        if (nvars < 1) throw std::invalid_argument("Poly: nvars must be positive");
    }

    static Poly zero(int nvars) { return Poly(nvars); }

    static Poly constant(int nvars, const Rational& c) {
        Poly p(nvars);
        p.add_term(Exponent(nvars, 0), c);
        return p;
    }

    static Poly variable(int nvars, int j) {
        if (j < 0 || j >= nvars) throw DimensionMismatch("Poly: variable index out of range");
        Exponent e(nvars, 0);
        e[j] = 1;
        Poly p(nvars);
        p.add_term(e, Rational(1));
        return p;
    }

    static Poly monomial(int nvars, Exponent e, const Rational& c) {
        if ((int)e.size() != nvars) throw DimensionMismatch("Poly: exponent length mismatch");
        for (int x : e)
            if (x < 0) throw std::invalid_argument("Poly: negative exponent");
        Poly p(nvars);
        p.add_term(std::move(e), c);
        return p;
    }

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    void add_term(Exponent e, const Rational& c) {
        if ((int)e.size() != nvars_) throw DimensionMismatch("Poly: exponent length mismatch");
        if (c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(std::move(e), c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        a.check_same(b);
        Poly r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, c);
        return r;
    }

    friend Poly operator-(const Poly& a, const Poly& b) {
        a.check_same(b);
        Poly r = a;
        for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
        return r;
    }

    Poly operator-() const {
        Poly r(nvars_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_same(b);
        Poly r(a.nvars_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                Exponent e(a.nvars_);
                for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
                r.add_term(std::move(e), ca * cb);
            }
        }
        return r;
    }

    friend Poly operator*(const Poly& a, const Rational& c) {
        Poly r(a.nvars_);
        if (c.is_zero()) return r;
        for (const auto& [e, coef] : a.terms_) r.terms_.emplace(e, coef * c);
        return r;
    }
    friend Poly operator*(const Rational& c, const Poly& a) { return a * c; }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Partial derivative (total: the derivative of a constant is zero).
    Poly derivative(int j) const {
        if (j < 0 || j >= nvars_) throw DimensionMismatch("Poly: derivative index out of range");
        Poly r(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[j] == 0) continue;
            Exponent d = e;
            d[j] -= 1;
            r.add_term(std::move(d), c * Rational(e[j]));
        }
        return r;
    }

    Rational eval(const std::vector<Rational>& x) const {
        if ((int)x.size() != nvars_) throw DimensionMismatch("Poly: evaluation point length mismatch");
        Rational sum(0);
        for (const auto& [e, c] : terms_) {
            Rational t = c;
            for (int i = 0; i < nvars_; ++i)
                if (e[i] != 0) t *= x[i].pow(e[i]);
            sum += t;
        }
        return sum;
    }

    double eval_double(const std::vector<double>& x) const {
        if ((int)x.size() != nvars_) throw DimensionMismatch("Poly: evaluation point length mismatch");
        double sum = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = c.to_double();
            for (int i = 0; i < nvars_; ++i)
                for (int k = 0; k < e[i]; ++k) t *= x[i];
            sum += t;
        }
        return sum;
    }

    bool is_constant() const {
        if (terms_.empty()) return true;
        return terms_.size() == 1 && total_degree(terms_.begin()->first) == 0;
    }

    bool is_monomial() const { return terms_.size() == 1; }

    /// Constant value; only meaningful when is_constant().
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_constant()) throw std::logic_error("Poly: not a constant");
        return terms_.begin()->second;
    }

    /// 0-based indices of the variables that actually appear.
    std::set<int> variables_used() const {
        std::set<int> used;
        for (const auto& [e, c] : terms_)
            for (int i = 0; i < nvars_; ++i)
                if (e[i] > 0) used.insert(i);
        return used;
    }

    /// Leading term in graded-lex order (largest). Poly must be nonzero.
    std::pair<Exponent, Rational> leading_term() const {
        if (terms_.empty()) throw std::logic_error("Poly: zero polynomial has no leading term");
        auto it = std::prev(terms_.end());
        return {it->first, it->second};
    }

    /// Scaled so the leading coefficient is 1; used to compare polynomials
    /// up to a scalar multiple.
    Poly monic() const {
        if (terms_.empty()) return *this;
        return *this * leading_term().second.reciprocal();
    }

    /// Human-readable canonical form, highest graded-lex term first,
    /// e.g. "2*x1^3 - 1/3*x2".
    std::string str() const {
        std::vector<std::string> names;
        names.reserve(nvars_);
        for (int i = 0; i < nvars_; ++i) names.push_back("x" + std::to_string(i + 1));
        return str(names);
    }

    /// Same with caller-supplied variable names (one per variable).
    std::string str(const std::vector<std::string>& names) const {
        if ((int)names.size() != nvars_) throw DimensionMismatch("Poly: name list length mismatch");
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            Rational a = c.abs();
            if (first) {
                if (c.sign() < 0) os << "-";
                first = false;
            } else {
                os << (c.sign() < 0 ? " - " : " + ");
            }
            bool has_vars = total_degree(e) > 0;
            if (!has_vars || a != Rational(1)) {
                os << a.str();
                if (has_vars) os << "*";
            }
            bool first_var = true;
            for (int i = 0; i < nvars_; ++i) {
                if (e[i] == 0) continue;
                if (!first_var) os << "*";
                first_var = false;
                os << names[i];
                if (e[i] > 1) os << "^" << e[i];
            }
        }
        return os.str();
    }

    static long total_degree(const Exponent& e) {
        return std::accumulate(e.begin(), e.end(), 0L);
    }

private:
    void check_same(const Poly& o) const {
        if (nvars_ != o.nvars_) throw DimensionMismatch("Poly: mixed variable counts");
    }

    int nvars_;
    TermMap terms_;
};

/// Anisotropic dilation weights 1 = alpha_1 <= ... <= alpha_n.
class DilationWeights {
public:
    explicit DilationWeights(std::vector<int> alpha) : alpha_(std::move(alpha)) {
        if (alpha_.empty()) throw std::invalid_argument("DilationWeights: empty");
        if (alpha_[0] != 1) throw std::invalid_argument("DilationWeights: alpha_1 must be 1");
        for (std::size_t i = 0; i < alpha_.size(); ++i) {
            if (alpha_[i] < 1) throw std::invalid_argument("DilationWeights: weights must be >= 1");
            if (i > 0 && alpha_[i] < alpha_[i - 1])
                throw std::invalid_argument("DilationWeights: weights must be non-decreasing");
        }
    }

    int n() const { return (int)alpha_.size(); }
    int alpha(int j) const { return alpha_.at(j); }
    const std::vector<int>& all() const { return alpha_; }
    int max_alpha() const { return alpha_.back(); }

    /// Homogeneous dimension: the sum of the weights.
    int Q() const { return std::accumulate(alpha_.begin(), alpha_.end(), 0); }

    long weighted_degree_of(const Exponent& e) const {
        long d = 0;
        for (std::size_t i = 0; i < alpha_.size(); ++i) d += (long)alpha_[i] * e[i];
        return d;
    }

    friend bool operator==(const DilationWeights& a, const DilationWeights& b) {
        return a.alpha_ == b.alpha_;
    }

private:
    std::vector<int> alpha_;
};

struct WeightedDegree {
    enum class Kind { Zero, Homogeneous, NotHomogeneous } kind;
    long degree = 0; // valid when Homogeneous

    bool is_homogeneous(long sigma) const {
        return kind == Kind::Homogeneous && degree == sigma;
    }
};

/// Classifies a polynomial under the dilation: Zero, Homogeneous(sigma)
/// when every term has the same weighted degree, NotHomogeneous otherwise.
inline WeightedDegree weighted_degree(const Poly& p, const DilationWeights& w) {
    if (p.nvars() != w.n()) throw DimensionMismatch("weighted_degree: dimension mismatch");
    if (p.is_zero()) return {WeightedDegree::Kind::Zero, 0};
    long deg = -1;
    for (const auto& [e, c] : p.terms()) {
        long d = w.weighted_degree_of(e);
        if (deg == -1) deg = d;
        else if (d != deg) return {WeightedDegree::Kind::NotHomogeneous, 0};
    }
    return {WeightedDegree::Kind::Homogeneous, deg};
}

/// Composes p with the dilation delta_t for a fixed rational t > 0.
inline Poly dilate(const Poly& p, const DilationWeights& w, const Rational& t) {
    if (p.nvars() != w.n()) throw DimensionMismatch("dilate: dimension mismatch");
    Poly r(p.nvars());
    for (const auto& [e, c] : p.terms()) r.add_term(e, c * t.pow(w.weighted_degree_of(e)));
    return r;
}

/// Substitutes x_i = sum_j M[i][j] * u_j (exact linear change of variables).
inline Poly compose_linear(const Poly& p, const Matrix& m) {
    const int n = p.nvars();
    if ((int)m.size() != n) throw DimensionMismatch("compose_linear: matrix size mismatch");
    for (const auto& row : m)
        if ((int)row.size() != n) throw DimensionMismatch("compose_linear: matrix size mismatch");
    std::vector<Poly> forms;
    forms.reserve(n);
    for (int i = 0; i < n; ++i) {
        Poly f(n);
        for (int j = 0; j < n; ++j)
            if (!m[i][j].is_zero()) f = f + m[i][j] * Poly::variable(n, j);
        forms.push_back(f);
    }
    Poly r(n);
    for (const auto& [e, c] : p.terms()) {
        Poly t = Poly::constant(n, c);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < e[i]; ++k) t = t * forms[i];
        r = r + t;
    }
    return r;
}

} // namespace nsw
