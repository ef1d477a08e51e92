#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "nsw/rational.hpp"

namespace nsw {

using Matrix = std::vector<std::vector<Rational>>;

/// Exact rank over the rationals by fraction-free (Bareiss) elimination.
/// Rows are first scaled to integers, so all intermediate values stay integral.
inline int rank(Matrix m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    for (auto& row : m) {
        if (row.size() != cols) throw std::invalid_argument("rank: ragged matrix");
        mpz_class lcm = 1;
        for (const auto& x : row) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.raw().get_den().get_mpz_t());
        if (lcm != 1) {
            Rational f{mpq_class(lcm)};
            for (auto& x : row) x *= f;
        }
    }
    Rational prev(1);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pivot = r;
        while (pivot < rows && m[pivot][c].is_zero()) ++pivot;
        if (pivot == rows) continue;
        std::swap(m[r], m[pivot]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j)
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev;
            m[i][c] = Rational(0);
        }
        prev = m[r][c];
        ++r;
    }
    return (int)r;
}

/// Exact inverse via Gauss-Jordan; nullopt when the matrix is singular.
inline std::optional<Matrix> inverse(Matrix m) {
    const std::size_t n = m.size();
    for (auto& row : m)
        if (row.size() != n) throw std::invalid_argument("inverse: not square");
    Matrix inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        while (pivot < n && m[pivot][c].is_zero()) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(m[c], m[pivot]);
        std::swap(inv[c], inv[pivot]);
        Rational d = m[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            m[c][j] /= d;
            inv[c][j] /= d;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || m[i][c].is_zero()) continue;
            Rational f = m[i][c];
            for (std::size_t j = 0; j < n; ++j) {
                m[i][j] -= f * m[c][j];
                inv[i][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

} // namespace nsw
