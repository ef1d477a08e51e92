// Brute-force vertex-enumeration oracle for small linear programs, shared by
// the unit and acceptance suites.
#pragma once

#include <optional>
#include <random>
#include <vector>

#include "nsw/polyhedron.hpp"

namespace lp_brute {

using namespace nsw;

inline Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// solve M x = rhs exactly; nullopt when singular
inline std::optional<std::vector<Rational>> solve_square(Matrix m, std::vector<Rational> rhs) {
    const std::size_t n = m.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m[p][c].is_zero()) ++p;
        if (p == n) return std::nullopt;
        std::swap(m[c], m[p]);
        std::swap(rhs[c], rhs[p]);
        Rational d = m[c][c];
        for (auto& v : m[c]) v /= d;
        rhs[c] /= d;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || m[i][c].is_zero()) continue;
            Rational f = m[i][c];
            for (std::size_t j = 0; j < n; ++j) m[i][j] -= f * m[c][j];
            rhs[i] -= f * rhs[c];
        }
    }
    return rhs;
}

// all vertices of P as solutions of N-subsets of tight constraints
inline std::vector<std::vector<Rational>> enumerate_vertices(const RationalPolyhedron& p) {
    std::vector<std::pair<std::vector<Rational>, Rational>> cons = p.rows;
    for (int j = 0; j < p.N; ++j) {
        std::vector<Rational> e(p.N, Rational(0));
        e[j] = Rational(-1);
        cons.emplace_back(std::move(e), Rational(0));
    }
    std::vector<std::vector<Rational>> vertices;
    std::vector<int> pick(p.N);
    auto rec = [&](auto&& self, int pos, int start) -> void {
        if (pos == p.N) {
            Matrix m;
            std::vector<Rational> rhs;
            for (int i : pick) {
                m.push_back(cons[i].first);
                rhs.push_back(cons[i].second);
            }
            auto x = solve_square(std::move(m), std::move(rhs));
            if (x && p.contains(*x)) vertices.push_back(*x);
            return;
        }
        for (int i = start; i < (int)cons.size(); ++i) {
            pick[pos] = i;
            self(self, pos + 1, i + 1);
        }
    };
    rec(rec, 0, 0);
    return vertices;
}

inline RationalPolyhedron random_polyhedron(std::mt19937& rng) {
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_int_distribution<int> nrows(0, 6);
    std::uniform_int_distribution<long> entry(-4, 4);
    std::uniform_int_distribution<long> rhs(-4, 6);
    RationalPolyhedron p(dim(rng));
    int m = nrows(rng);
    for (int i = 0; i < m; ++i) {
        std::vector<Rational> normal(p.N);
        for (auto& v : normal) v = Rational(entry(rng));
        p.add_row(std::move(normal), Rational(rhs(rng)));
    }
    return p;
}

// true iff the simplex outcome is consistent with the enumeration oracle
inline bool agrees_with_enumeration(const RationalPolyhedron& p, const std::vector<Rational>& c) {
    LPOutcome out = lp_maximize(p, c);
    auto vertices = enumerate_vertices(p);
    if (out.status == LPStatus::Infeasible) return vertices.empty();
    if (!p.contains(out.witness)) return false;
    if (out.status == LPStatus::Unbounded) {
        if (out.direction.size() != (std::size_t)p.N) return false;
        for (const auto& v : out.direction)
            if (v.sign() < 0) return false;
        for (const auto& [normal, rhs] : p.rows)
            if (dot(normal, out.direction).sign() > 0) return false;
        return dot(c, out.direction).sign() > 0;
    }
    if (dot(c, out.witness) != out.value) return false;
    if (vertices.empty()) return false;
    Rational best = dot(c, vertices[0]);
    for (const auto& v : vertices) best = std::max(best, dot(c, v));
    return out.value == best;
}

} // namespace lp_brute
