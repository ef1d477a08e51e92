#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "nsw/poly.hpp"

namespace nsw {

/// Polynomial vector field Y = sum_j mu_j(x) d/dx_j on R^n.
class VectorField {
public:
    explicit VectorField(std::vector<Poly> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw std::invalid_argument("VectorField: empty");
        const int n = coeffs_[0].nvars();
        if ((int)coeffs_.size() != n)
            throw DimensionMismatch("VectorField: need exactly nvars coefficients");
        for (const auto& p : coeffs_)
            if (p.nvars() != n) throw DimensionMismatch("VectorField: mixed variable counts");
    }

    static VectorField zero(int n) { return VectorField(std::vector<Poly>(n, Poly::zero(n))); }

    /// d/dx_j as a field.
    static VectorField coordinate(int n, int j) {
        std::vector<Poly> c(n, Poly::zero(n));
        c.at(j) = Poly::constant(n, Rational(1));
        return VectorField(std::move(c));
    }

    int nvars() const { return (int)coeffs_.size(); }
    const Poly& coeff(int j) const { return coeffs_.at(j); }
    const std::vector<Poly>& coeffs() const { return coeffs_; }

    bool is_zero() const {
        for (const auto& p : coeffs_)
            if (!p.is_zero()) return false;
        return true;
    }

    /// Applies the field to a polynomial: Y(f) = sum_j mu_j * df/dx_j.
    Poly apply(const Poly& f) const {
        if (f.nvars() != nvars()) throw DimensionMismatch("VectorField: apply dimension mismatch");
        Poly r(nvars());
        for (int j = 0; j < nvars(); ++j) {
            if (coeffs_[j].is_zero()) continue;
            r = r + coeffs_[j] * f.derivative(j);
        }
        return r;
    }

    friend VectorField operator*(const VectorField& y, const Rational& c) {
        std::vector<Poly> r;
        r.reserve(y.coeffs_.size());
        for (const auto& p : y.coeffs_) r.push_back(p * c);
        return VectorField(std::move(r));
    }

    friend bool operator==(const VectorField& a, const VectorField& b) {
        return a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const VectorField& a, const VectorField& b) { return !(a == b); }

private:
    std::vector<Poly> coeffs_;
};

/// Exact commutator [Y,Z] with j-th coefficient Y(mu_j^Z) - Z(mu_j^Y).
inline VectorField lie_bracket(const VectorField& y, const VectorField& z) {
    if (y.nvars() != z.nvars()) throw DimensionMismatch("lie_bracket: dimension mismatch");
    std::vector<Poly> c;
    c.reserve(y.nvars());
    for (int j = 0; j < y.nvars(); ++j) c.push_back(y.apply(z.coeff(j)) - z.apply(y.coeff(j)));
    return VectorField(std::move(c));
}

/// True iff every nonzero mu_j is delta_t-homogeneous of degree alpha_j - sigma
/// (which forces mu_j = 0 whenever alpha_j < sigma).
inline bool field_is_homogeneous(const VectorField& y, const DilationWeights& w, long sigma) {
    if (y.nvars() != w.n()) throw DimensionMismatch("field_is_homogeneous: dimension mismatch");
    for (int j = 0; j < y.nvars(); ++j) {
        const Poly& mu = y.coeff(j);
        if (mu.is_zero()) continue;
        long want = (long)w.alpha(j) - sigma;
        if (want < 0) return false;
        auto d = weighted_degree(mu, w);
        if (!d.is_homogeneous(want)) return false;
    }
    return true;
}

/// If z == c*y for a rational c (y nonzero), returns c.
inline std::optional<Rational> proportionality(const VectorField& y, const VectorField& z) {
    if (y.nvars() != z.nvars()) return std::nullopt;
    if (y.is_zero()) return std::nullopt;
    std::optional<Rational> c;
    for (int j = 0; j < y.nvars() && !c; ++j) {
        const Poly& p = y.coeff(j);
        if (p.is_zero()) continue;
        const auto& [e, coef] = *p.terms().begin();
        auto it = z.coeff(j).terms().find(e);
        if (it == z.coeff(j).terms().end()) {
            c = Rational(0);
        } else {
            c = it->second / coef;
        }
    }
    if (!c) return std::nullopt;
    for (int j = 0; j < y.nvars(); ++j)
        if (y.coeff(j) * *c != z.coeff(j)) return std::nullopt;
    return c;
}

namespace detail {

// Cofactor expansion over the remaining column mask; rows are consumed in
// order, so the mask determines the row index. Memoized per mask.
inline Poly det_rec(const std::vector<std::vector<const Poly*>>& b, std::uint32_t mask, int row,
                    std::unordered_map<std::uint32_t, Poly>& memo, int n) {
    if (mask == 0) return Poly::constant(n, Rational(1));
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    Poly acc(n);
    int pos = 0;
    for (int k = 0; k < n; ++k) {
        if (!(mask & (1u << k))) continue;
        const Poly& entry = *b[row][k];
        if (!entry.is_zero()) {
            Poly sub = det_rec(b, mask & ~(1u << k), row + 1, memo, n);
            Poly term = entry * sub;
            acc = (pos % 2 == 0) ? acc + term : acc - term;
        }
        ++pos;
    }
    memo.emplace(mask, acc);
    return acc;
}

} // namespace detail

/// Determinant of the coefficient matrix of n fields on R^n, row j holding
/// the coefficients of the j-th field.
inline Poly det_fields(const std::vector<VectorField>& fields) {
    if (fields.empty()) throw std::invalid_argument("det_fields: empty");
    const int n = fields[0].nvars();
    if ((int)fields.size() != n) throw DimensionMismatch("det_fields: need exactly n fields");
    std::vector<std::vector<const Poly*>> b(n, std::vector<const Poly*>(n));
    for (int j = 0; j < n; ++j) {
        if (fields[j].nvars() != n) throw DimensionMismatch("det_fields: dimension mismatch");
        for (int k = 0; k < n; ++k) b[j][k] = &fields[j].coeff(k);
    }
    std::unordered_map<std::uint32_t, Poly> memo;
    return detail::det_rec(b, (n == 32) ? ~0u : ((1u << n) - 1u), 0, memo, n);
}

} // namespace nsw
