#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsw/polyhedron.hpp"
#include "nsw/profile.hpp"

namespace nsw {

struct SingularMatrix : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ImpossibleProfile : std::logic_error {
    using std::logic_error::logic_error;
};

struct EmptyGandedSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One index pair (a, s): the monomial exponent a and the r-power s of a
/// denominator term x^a r^s.
struct IndexPair {
    std::vector<int> a;
    int s = 0;

    friend bool operator==(const IndexPair& x, const IndexPair& y) {
        return x.a == y.a && x.s == y.s;
    }
    friend bool operator<(const IndexPair& x, const IndexPair& y) {
        if (x.a != y.a) return x.a < y.a;
        return x.s < y.s;
    }
};

/// Finite index-pair collection with a Jacobian multi-index b; the
/// combinatorial input of the polyhedral engine.
class IndexPairSet {
public:
    IndexPairSet(int n, std::vector<IndexPair> pairs, std::vector<int> b)
        : N_(n), pairs_(std::move(pairs)), b_(std::move(b)) {
        if (N_ < 1) throw std::invalid_argument("IndexPairSet: N must be >= 1");
        if (pairs_.empty()) throw std::invalid_argument("IndexPairSet: no pairs");
        if (b_.empty()) b_.assign(N_, 0);
        if ((int)b_.size() != N_) throw std::invalid_argument("IndexPairSet: b length mismatch");
        for (int x : b_)
            if (x < 0) throw std::invalid_argument("IndexPairSet: negative b entry");
        for (const auto& p : pairs_) {
            if ((int)p.a.size() != N_) throw std::invalid_argument("IndexPairSet: pair length mismatch");
            if (p.s < 0) throw std::invalid_argument("IndexPairSet: negative exponent s");
            for (int x : p.a)
                if (x < 0) throw std::invalid_argument("IndexPairSet: negative multi-index entry");
        }
        std::sort(pairs_.begin(), pairs_.end());
        pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
    }

    int N() const { return N_; }
    const std::vector<IndexPair>& pairs() const { return pairs_; }
    const std::vector<int>& b() const { return b_; }

    /// P_{a,s}: the region where the pair (a, s) dominates every other pair
    /// in exponential coordinates.
    RationalPolyhedron polyhedron_of(const IndexPair& pair) const {
        RationalPolyhedron p(N_);
        for (const auto& other : pairs_) {
            if (other == pair) continue;
            std::vector<Rational> normal(N_);
            for (int j = 0; j < N_; ++j) normal[j] = Rational(pair.a[j] - other.a[j]);
            p.add_row(std::move(normal), Rational(other.s - pair.s));
        }
        return p;
    }

private:
    int N_;
    std::vector<IndexPair> pairs_;
    std::vector<int> b_;
};

enum class PairStatus { SkippedNotFullDim, Counted };

struct PairContribution {
    IndexPair pair;
    PairStatus status;
    Rational m; // valid when Counted
    int d = 0;  // valid when Counted
};

enum class Derivation { TrivialCase, SingleComponent, MonomialLP, UserChart };

inline const char* derivation_name(Derivation d) {
    switch (d) {
        case Derivation::TrivialCase: return "TrivialCase";
        case Derivation::SingleComponent: return "SingleComponent";
        case Derivation::MonomialLP: return "MonomialLP";
        case Derivation::UserChart: return "UserChart";
    }
    return "?";
}

struct ExponentResult {
    Rational Q0;
    int d0 = 0;
    std::vector<PairContribution> contributions; // empty in the closed-form paths
    Derivation derivation = Derivation::TrivialCase;
};

/// Reduction of a profile onto its degenerate variables.
struct ReducedLambda {
    Poly poly; // in the v degenerate variables
    int dI;
};

struct Reduction {
    enum class Kind { Trivial, Single, Multi } kind;
    int single_var = -1;          // original 0-based index, Single only
    int v = 0;                    // number of degenerate variables
    std::vector<int> var_map;     // original indices of the kept variables
    std::vector<ReducedLambda> lambdas; // populated for Single and Multi
};

inline Reduction reduce_profile(const NSWProfile& profile) {
    Reduction red;
    const auto& deg = profile.degenerate_vars();
    red.v = (int)deg.size();
    red.var_map.assign(deg.begin(), deg.end());
    if (red.v == 0) {
        red.kind = Reduction::Kind::Trivial;
        return red;
    }
    red.kind = red.v == 1 ? Reduction::Kind::Single : Reduction::Kind::Multi;
    if (red.v == 1) red.single_var = red.var_map[0];
    std::vector<int> pos(profile.n(), -1);
    for (int k = 0; k < red.v; ++k) pos[red.var_map[k]] = k;
    for (const auto& l : profile.lambdas()) {
        Poly q(red.v);
        for (const auto& [e, c] : l.poly.terms()) {
            Exponent re(red.v, 0);
            for (int i = 0; i < profile.n(); ++i) {
                if (e[i] == 0) continue;
                if (pos[i] < 0)
                    throw std::logic_error("reduce_profile: lambda depends on a non-degenerate variable");
                re[pos[i]] = e[i];
            }
            q.add_term(std::move(re), c);
        }
        red.lambdas.push_back({std::move(q), l.dI});
    }
    return red;
}

/// w = Q case: the profile is x-independent and the rate is exactly Q.
inline ExponentResult exponents_trivial(const NSWProfile& profile) {
    return {Rational(profile.Q()), 0, {}, Derivation::TrivialCase};
}

/// Single degenerate variable x_j: closed form Q0 = Q - alpha_j with a log
/// factor exactly when Q - w = alpha_j. Q - w < alpha_j cannot occur for a
/// valid profile.
inline ExponentResult exponents_single(const NSWProfile& profile, int j) {
    const int aj = profile.weights().alpha(j);
    const int gap = profile.Q() - profile.w();
    if (gap < aj)
        throw ImpossibleProfile("exponents_single: Q - w < alpha_j, profile is inconsistent");
    ExponentResult res;
    res.Q0 = Rational(profile.Q() - aj);
    res.d0 = (gap == aj) ? 1 : 0;
    res.derivation = Derivation::SingleComponent;
    return res;
}

struct BuildResult {
    std::optional<IndexPairSet> set;
    std::vector<Poly> offending; // non-monomial reduced polynomials
};

/// Succeeds when every reduced lambda is a single monomial; coefficients are
/// dropped and identical (a, s) pairs merged. Otherwise reports the
/// polynomials that block the monomial form.
inline BuildResult build_index_set(const std::vector<ReducedLambda>& lambdas, int v) {
    BuildResult out;
    std::vector<IndexPair> pairs;
    for (const auto& l : lambdas) {
        if (l.poly.is_zero()) continue;
        if (!l.poly.is_monomial()) {
            out.offending.push_back(l.poly);
            continue;
        }
        const auto& [e, c] = *l.poly.terms().begin();
        pairs.push_back({e, l.dI});
    }
    if (!out.offending.empty()) return out;
    out.set.emplace(v, std::move(pairs), std::vector<int>(v, 0));
    return out;
}

/// Rewrites every reduced lambda in the coordinates u = T x (T invertible
/// over Q); the Jacobian is constant so the index-set b stays zero.
inline std::vector<ReducedLambda> apply_substitution(const std::vector<ReducedLambda>& lambdas,
                                                     int v, const Matrix& t) {
    if ((int)t.size() != v) throw SingularMatrix("substitution matrix must be v x v");
    for (const auto& row : t)
        if ((int)row.size() != v) throw SingularMatrix("substitution matrix must be v x v");
    auto inv = inverse(t);
    if (!inv) throw SingularMatrix("substitution matrix is singular");
    std::vector<ReducedLambda> out;
    out.reserve(lambdas.size());
    for (const auto& l : lambdas) out.push_back({compose_linear(l.poly, *inv), l.dI});
    return out;
}

struct IndexSetOutcome {
    std::optional<ExponentResult> result;
    std::optional<IndexPair> divergent_witness;

    bool ok() const { return result.has_value(); }
};

/// The polyhedral procedure: per pair, full-dimensionality filter, then the
/// linear program max <a-b-1, y> over P_{a,s}. Each counted pair contributes
/// the rate s + m with log power d; the result takes the maximal rate and
/// the maximal log power among pairs attaining it. A pair whose maximum is
/// unattained or whose optimal face is unbounded certifies divergence of the
/// underlying integral.
inline IndexSetOutcome exponents_from_index_set(const IndexPairSet& g,
                                                Derivation tag = Derivation::MonomialLP) {
    const int n = g.N();
    IndexSetOutcome out;
    std::vector<PairContribution> contributions;
    bool any = false;
    Rational best_rate(0);
    int best_d = 0;
    for (const auto& pair : g.pairs()) {
        RationalPolyhedron p = g.polyhedron_of(pair);
        if (!is_full_dim(p)) {
            contributions.push_back({pair, PairStatus::SkippedNotFullDim, Rational(0), 0});
            continue;
        }
        std::vector<Rational> c(n);
        bool czero = true;
        for (int j = 0; j < n; ++j) {
            c[j] = Rational(pair.a[j] - g.b()[j] - 1);
            if (!c[j].is_zero()) czero = false;
        }
        Rational m(0);
        int d = 0;
        if (czero) {
            if (!is_bounded(p)) {
                out.divergent_witness = pair;
                return out;
            }
            d = n;
        } else {
            LPOutcome lp = lp_maximize(p, c);
            if (lp.status != LPStatus::Optimal) {
                out.divergent_witness = pair;
                return out;
            }
            FaceInfo face = optimal_face(p, c, lp.value);
            if (!face.bounded) {
                out.divergent_witness = pair;
                return out;
            }
            m = lp.value;
            d = face.dim;
        }
        contributions.push_back({pair, PairStatus::Counted, m, d});
        Rational rate = Rational(pair.s) + m;
        if (!any || rate > best_rate) {
            any = true;
            best_rate = rate;
            best_d = d;
        } else if (rate == best_rate) {
            best_d = std::max(best_d, d);
        }
    }
    if (!any) throw EmptyGandedSet("every index pair was skipped as not full-dimensional");
    out.result = ExponentResult{best_rate, best_d, std::move(contributions), tag};
    return out;
}

/// Dominant rate across charts: the largest Q0, breaking ties by the larger
/// log power.
inline std::pair<Rational, int> combine_charts(const std::vector<std::pair<Rational, int>>& charts) {
    if (charts.empty()) throw std::invalid_argument("combine_charts: empty");
    Rational q0 = charts[0].first;
    int d0 = charts[0].second;
    for (const auto& [q, d] : charts) {
        if (q > q0) {
            q0 = q;
            d0 = d;
        } else if (q == q0) {
            d0 = std::max(d0, d);
        }
    }
    return {q0, d0};
}

/// Eigenvalue growth and counting laws derived from (Q0, d0).
struct AsymptoticLaw {
    Rational counting_exponent; // Q0 / 2
    int counting_log_power;     // d0
    Rational eigen_exponent;    // 2 / Q0
    Rational eigen_log_power;   // -2 d0 / Q0
};

inline AsymptoticLaw eigen_law(const ExponentResult& res) {
    if (res.Q0.sign() <= 0)
        throw std::domain_error("eigen_law: Q0 must be positive");
    AsymptoticLaw law;
    law.counting_exponent = res.Q0 / Rational(2);
    law.counting_log_power = res.d0;
    law.eigen_exponent = Rational(2) / res.Q0;
    law.eigen_log_power = Rational(-2 * res.d0) / res.Q0;
    return law;
}

/// Outcome of the full profile-to-exponents pipeline.
struct ProfileExponents {
    std::optional<ExponentResult> result;
    std::vector<Poly> needs_resolution;       // nonempty: user must supply a substitution
    std::optional<IndexPair> divergent;       // cannot occur for profile-derived sets
    std::vector<int> var_map;                 // original indices of the reduced variables
};

/// Drives reduce -> (trivial | single | monomial LP) with an optional linear
/// substitution for the multi-variable case, and checks the rate bounds that
/// every valid degenerate profile must satisfy.
inline ProfileExponents exponents_for_profile(const NSWProfile& profile,
                                              const std::optional<Matrix>& subst = std::nullopt) {
    ProfileExponents out;
    Reduction red = reduce_profile(profile);
    out.var_map = red.var_map;
    if (subst && (int)subst->size() != red.v)
        throw SingularMatrix("substitution matrix must be " + std::to_string(red.v) + " x " +
                             std::to_string(red.v) + " for this system");
    switch (red.kind) {
        case Reduction::Kind::Trivial:
            out.result = exponents_trivial(profile);
            break;
        case Reduction::Kind::Single: {
            out.result = exponents_single(profile, red.single_var);
            break;
        }
        case Reduction::Kind::Multi: {
            std::vector<ReducedLambda> lambdas = red.lambdas;
            if (subst) lambdas = apply_substitution(lambdas, red.v, *subst);
            BuildResult built = build_index_set(lambdas, red.v);
            if (!built.set) {
                out.needs_resolution = std::move(built.offending);
                return out;
            }
            IndexSetOutcome o = exponents_from_index_set(*built.set, Derivation::MonomialLP);
            if (!o.ok()) {
                out.divergent = o.divergent_witness;
                return out;
            }
            out.result = std::move(o.result);
            break;
        }
    }
    if (out.result && !profile.degenerate_vars().empty()) {
        const Rational q0 = out.result->Q0;
        const int v = (int)profile.degenerate_vars().size();
        const Rational lower(std::max(profile.w(), profile.Q() - profile.alphaX()));
        if (q0 < lower || q0 > Rational(profile.Q() - 1) || out.result->d0 > v)
            throw ImpossibleProfile("computed exponents violate the rate bounds");
    }
    return out;
}

} // namespace nsw
