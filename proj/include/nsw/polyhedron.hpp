#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "nsw/linalg.hpp"
#include "nsw/rational.hpp"

namespace nsw {

struct InconsistentInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// H-representation of a polyhedron in [0,inf)^N: rows normal . y <= rhs,
/// with the componentwise bounds y >= 0 always implied.
struct RationalPolyhedron {
    int N = 0;
    std::vector<std::pair<std::vector<Rational>, Rational>> rows;

    RationalPolyhedron(int n, std::vector<std::pair<std::vector<Rational>, Rational>> r = {})
        : N(n), rows(std::move(r)) {
        if (N < 1) throw std::invalid_argument("RationalPolyhedron: N must be >= 1");
        for (const auto& [normal, rhs] : rows)
            if ((int)normal.size() != N)
                throw std::invalid_argument("RationalPolyhedron: normal length mismatch");
    }

    void add_row(std::vector<Rational> normal, Rational rhs) {
        if ((int)normal.size() != N)
            throw std::invalid_argument("RationalPolyhedron: normal length mismatch");
        rows.emplace_back(std::move(normal), std::move(rhs));
    }

    bool contains(const std::vector<Rational>& y) const {
        if ((int)y.size() != N) return false;
        for (const auto& v : y)
            if (v.sign() < 0) return false;
        for (const auto& [normal, rhs] : rows) {
            Rational dot(0);
            for (int j = 0; j < N; ++j) dot += normal[j] * y[j];
            if (dot > rhs) return false;
        }
        return true;
    }
};

enum class LPStatus { Optimal, Unbounded, Infeasible };

struct LPOutcome {
    LPStatus status;
    Rational value;                      // attained maximum, when Optimal
    std::vector<Rational> witness;       // optimizer when Optimal, feasible point when Unbounded
    std::vector<Rational> direction;     // recession direction with c . d > 0, when Unbounded
};

namespace detail {

// Dense-tableau primal simplex over exact rationals, two phases, Bland's
// anti-cycling rule. Variable order: structurals, slacks, artificials; Bland
// picks the smallest improving index, so runs are deterministic.
class Simplex {
public:
    Simplex(const RationalPolyhedron& p, const std::vector<Rational>& c) : n_(p.N) {
        const int m = (int)p.rows.size();
        nslack_ = m;
        cols_ = n_ + nslack_;
        rows_.reserve(m);
        basis_.reserve(m);
        std::vector<int> art_rows;
        for (int i = 0; i < m; ++i) {
            Row row;
            row.a.assign(cols_, Rational(0));
            for (int j = 0; j < n_; ++j) row.a[j] = p.rows[i].first[j];
            row.a[n_ + i] = Rational(1);
            row.rhs = p.rows[i].second;
            if (row.rhs.sign() < 0) {
                for (auto& v : row.a) v = -v;
                row.rhs = -row.rhs;
                art_rows.push_back(i);
            }
            rows_.push_back(std::move(row));
            basis_.push_back(n_ + i);
        }
        nart_ = (int)art_rows.size();
        if (nart_ > 0) {
            int base = cols_;
            cols_ += nart_;
            for (auto& row : rows_) row.a.resize(cols_, Rational(0));
            for (int k = 0; k < nart_; ++k) {
                rows_[art_rows[k]].a[base + k] = Rational(1);
                basis_[art_rows[k]] = base + k;
            }
        }
        objective_ = c;
        objective_.resize(cols_, Rational(0));
    }

    LPOutcome solve() {
        if (nart_ > 0) {
            std::vector<Rational> phase1(cols_, Rational(0));
            for (int j = cols_ - nart_; j < cols_; ++j) phase1[j] = Rational(-1);
            load_objective(phase1);
            int unb = iterate();
            (void)unb; // phase 1 is bounded above by zero
            if (zval_.sign() < 0) return {LPStatus::Infeasible, Rational(0), {}, {}};
            purge_artificials();
        }
        load_objective(objective_);
        int entering = iterate();
        if (entering >= 0) {
            LPOutcome out{LPStatus::Unbounded, Rational(0), witness(), {}};
            out.direction.assign(n_, Rational(0));
            if (entering < n_) out.direction[entering] = Rational(1);
            for (std::size_t i = 0; i < rows_.size(); ++i)
                if (basis_[i] < n_) out.direction[basis_[i]] = -rows_[i].a[entering];
            return out;
        }
        return {LPStatus::Optimal, zval_, witness(), {}};
    }

private:
    struct Row {
        std::vector<Rational> a;
        Rational rhs;
    };

    void load_objective(const std::vector<Rational>& c) {
        z_ = c;
        zval_ = Rational(0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const Rational& cb = c[basis_[i]];
            if (cb.is_zero()) continue;
            for (int j = 0; j < cols_; ++j) z_[j] -= cb * rows_[i].a[j];
            zval_ += cb * rows_[i].rhs;
        }
    }

    // Runs Bland pivots until optimal (returns -1) or an unbounded entering
    // column is found (returns its index).
    int iterate() {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < cols_; ++j) {
                if (blocked_ && j >= cols_ - nart_) break; // artificials never re-enter
                if (z_[j].sign() > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return -1;
            int leave = -1;
            Rational best(0);
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                if (rows_[i].a[enter].sign() <= 0) continue;
                Rational ratio = rows_[i].rhs / rows_[i].a[enter];
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis_[i] < basis_[leave])) {
                    leave = (int)i;
                    best = ratio;
                }
            }
            if (leave < 0) return enter;
            pivot(leave, enter);
        }
    }

    void pivot(int r, int e) {
        Row& row = rows_[r];
        Rational d = row.a[e];
        for (auto& v : row.a) v /= d;
        row.rhs /= d;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if ((int)i == r) continue;
            Rational f = rows_[i].a[e];
            if (f.is_zero()) continue;
            for (int j = 0; j < cols_; ++j) rows_[i].a[j] -= f * row.a[j];
            rows_[i].rhs -= f * row.rhs;
        }
        Rational zf = z_[e];
        if (!zf.is_zero()) {
            for (int j = 0; j < cols_; ++j) z_[j] -= zf * row.a[j];
            zval_ += zf * row.rhs;
        }
        basis_[r] = e;
    }

    // After phase 1 all artificials sit at zero; pivot basic ones out on any
    // non-artificial column, dropping rows that turn out redundant.
    void purge_artificials() {
        const int art_base = cols_ - nart_;
        for (std::size_t i = 0; i < rows_.size();) {
            if (basis_[i] < art_base) {
                ++i;
                continue;
            }
            int col = -1;
            for (int j = 0; j < art_base; ++j) {
                if (!rows_[i].a[j].is_zero()) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                pivot((int)i, col);
                ++i;
            } else {
                rows_.erase(rows_.begin() + (long)i);
                basis_.erase(basis_.begin() + (long)i);
            }
        }
        blocked_ = true;
    }

    std::vector<Rational> witness() const {
        std::vector<Rational> x(n_, Rational(0));
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (basis_[i] < n_) x[basis_[i]] = rows_[i].rhs;
        return x;
    }

    int n_;
    int nslack_ = 0;
    int nart_ = 0;
    int cols_ = 0;
    bool blocked_ = false;
    std::vector<Row> rows_;
    std::vector<int> basis_;
    std::vector<Rational> objective_;
    std::vector<Rational> z_;
    Rational zval_;
};

} // namespace detail

/// Exact maximization of c . y over P (with y >= 0). All three statuses are
/// valid outcomes; Optimal carries an exact optimizer, Unbounded a feasible
/// point plus an improving recession direction.
inline LPOutcome lp_maximize(const RationalPolyhedron& p, const std::vector<Rational>& c) {
    if ((int)c.size() != p.N) throw std::invalid_argument("lp_maximize: objective length mismatch");
    detail::Simplex s(p, c);
    return s.solve();
}

/// True iff P has a point satisfying every inequality strictly, including
/// y > 0 componentwise. Decided by maximizing a common slack t <= 1.
inline bool is_full_dim(const RationalPolyhedron& p) {
    RationalPolyhedron aux(p.N + 1);
    for (const auto& [normal, rhs] : p.rows) {
        std::vector<Rational> row = normal;
        row.push_back(Rational(1));
        aux.add_row(std::move(row), rhs);
    }
    for (int j = 0; j < p.N; ++j) {
        std::vector<Rational> row(p.N + 1, Rational(0));
        row[j] = Rational(-1);
        row[p.N] = Rational(1);
        aux.add_row(std::move(row), Rational(0));
    }
    {
        std::vector<Rational> row(p.N + 1, Rational(0));
        row[p.N] = Rational(1);
        aux.add_row(std::move(row), Rational(1));
    }
    std::vector<Rational> c(p.N + 1, Rational(0));
    c[p.N] = Rational(1);
    LPOutcome out = lp_maximize(aux, c);
    return out.status == LPStatus::Optimal && out.value.sign() > 0;
}

struct FaceInfo {
    int dim;
    bool bounded;
};

/// Dimension and boundedness of the optimal face F = P intersected with
/// {c . y = m}. The implicit equality system of F is found by one exact LP
/// per constraint; dim = N - rank of its normals; boundedness is a recession
/// cone test.
inline FaceInfo optimal_face(const RationalPolyhedron& p, const std::vector<Rational>& c,
                             const Rational& m) {
    if ((int)c.size() != p.N) throw std::invalid_argument("optimal_face: objective length mismatch");
    RationalPolyhedron face = p;
    std::vector<Rational> neg(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) neg[j] = -c[j];
    face.add_row(c, m);
    face.add_row(neg, -m);

    std::vector<Rational> zero(p.N, Rational(0));
    if (lp_maximize(face, zero).status == LPStatus::Infeasible)
        throw InconsistentInput("optimal_face: face is empty; wrong optimum passed");

    Matrix implicit;
    for (const auto& [normal, rhs] : face.rows) {
        // max of (rhs - normal . y) over F; zero means the row is tight on F
        std::vector<Rational> obj(normal.size());
        for (std::size_t j = 0; j < normal.size(); ++j) obj[j] = -normal[j];
        LPOutcome out = lp_maximize(face, obj);
        if (out.status == LPStatus::Optimal && out.value + rhs == Rational(0))
            implicit.push_back(normal);
    }
    for (int j = 0; j < p.N; ++j) {
        std::vector<Rational> obj(p.N, Rational(0));
        obj[j] = Rational(1);
        LPOutcome out = lp_maximize(face, obj);
        if (out.status == LPStatus::Optimal && out.value.is_zero()) {
            std::vector<Rational> normal(p.N, Rational(0));
            normal[j] = Rational(1);
            implicit.push_back(std::move(normal));
        }
    }
    int dim = p.N - (implicit.empty() ? 0 : rank(implicit));

    // recession cone of F: z >= 0, rows . z <= 0 (the two face rows force
    // c . z = 0); bounded iff max of sum z_i capped at 1 is zero
    RationalPolyhedron cone(p.N);
    for (const auto& [normal, rhs] : face.rows) cone.add_row(normal, Rational(0));
    cone.add_row(std::vector<Rational>(p.N, Rational(1)), Rational(1));
    LPOutcome rec = lp_maximize(cone, std::vector<Rational>(p.N, Rational(1)));
    bool bounded = rec.status == LPStatus::Optimal && rec.value.is_zero();
    return {dim, bounded};
}

/// True iff the recession cone {z >= 0 : rows . z <= 0} of P is trivial.
inline bool is_bounded(const RationalPolyhedron& p) {
    RationalPolyhedron cone(p.N);
    for (const auto& [normal, rhs] : p.rows) cone.add_row(normal, Rational(0));
    cone.add_row(std::vector<Rational>(p.N, Rational(1)), Rational(1));
    LPOutcome rec = lp_maximize(cone, std::vector<Rational>(p.N, Rational(1)));
    return rec.status == LPStatus::Optimal && rec.value.is_zero();
}

} // namespace nsw
