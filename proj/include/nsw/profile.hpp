#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "nsw/linalg.hpp"
#include "nsw/vector_field.hpp"

namespace nsw {

struct HomogeneityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HoermanderViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LinearDependence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A system of polynomial vector fields, each delta_t-homogeneous of degree 1
/// and jointly linearly independent over Q as differential operators.
class VectorFieldSystem {
public:
    VectorFieldSystem(DilationWeights weights, std::vector<VectorField> fields,
                      std::vector<std::string> names)
        : weights_(std::move(weights)), fields_(std::move(fields)), names_(std::move(names)) {
        if (fields_.empty()) throw std::invalid_argument("VectorFieldSystem: no fields");
        if (names_.size() != fields_.size())
            throw std::invalid_argument("VectorFieldSystem: name/field count mismatch");
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            if (fields_[i].nvars() != weights_.n())
                throw DimensionMismatch("VectorFieldSystem: field dimension mismatch");
            if (fields_[i].is_zero())
                throw HomogeneityViolation("field " + names_[i] + " is identically zero");
            if (!field_is_homogeneous(fields_[i], weights_, 1))
                throw HomogeneityViolation("field " + names_[i] +
                                           " is not delta_t-homogeneous of degree 1");
        }
        check_independent();
    }

    int n() const { return weights_.n(); }
    int m() const { return (int)fields_.size(); }
    const DilationWeights& weights() const { return weights_; }
    const std::vector<VectorField>& fields() const { return fields_; }
    const VectorField& field(int i) const { return fields_.at(i); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(int i) const { return names_.at(i); }

private:
    // Exact rank of the fields viewed as vectors of polynomial coefficients.
    void check_independent() const {
        std::map<std::pair<int, Exponent>, int> cols;
        for (const auto& f : fields_)
            for (int j = 0; j < n(); ++j)
                for (const auto& [e, c] : f.coeff(j).terms())
                    cols.emplace(std::make_pair(j, e), 0);
        int idx = 0;
        for (auto& [key, v] : cols) v = idx++;
        Matrix mat(fields_.size(), std::vector<Rational>(cols.size(), Rational(0)));
        for (std::size_t i = 0; i < fields_.size(); ++i)
            for (int j = 0; j < n(); ++j)
                for (const auto& [e, c] : fields_[i].coeff(j).terms())
                    mat[i][cols.at({j, e})] = c;
        if (rank(std::move(mat)) < (int)fields_.size())
            throw LinearDependence("fields are linearly dependent");
    }

    DilationWeights weights_;
    std::vector<VectorField> fields_;
    std::vector<std::string> names_;
};

struct CommutatorEntry {
    VectorField field;
    int degree;       // bracket length; equals the homogeneity degree
    std::string word; // bracket word over the field names, e.g. "[X1,[X1,X2]]"
};

struct CommutatorBasis {
    std::vector<CommutatorEntry> entries;

    std::size_t size() const { return entries.size(); }
    const CommutatorEntry& operator[](std::size_t i) const { return entries[i]; }
};

struct EnumerationLimits {
    int max_basis = 40;
    long max_tuples = 2'000'000;
};

/// All nonzero nested commutators X_J with |J| <= alpha_n, deduplicated up to
/// an exact scalar multiple; verifies the homogeneity degree of every entry
/// and that all commutators of length alpha_n + 1 vanish.
inline CommutatorBasis enumerate_commutators(const VectorFieldSystem& sys,
                                             const EnumerationLimits& limits = {}) {
    CommutatorBasis basis;
    // entries of the previous length; raw, without dedup, so that every
    // nested bracket shape gets extended
    std::vector<std::pair<VectorField, std::string>> prev;
    for (int i = 0; i < sys.m(); ++i) {
        basis.entries.push_back({sys.field(i), 1, sys.name(i)});
        prev.emplace_back(sys.field(i), sys.name(i));
    }
    const int top = sys.weights().max_alpha();
    for (int len = 2; len <= top + 1; ++len) {
        std::vector<std::pair<VectorField, std::string>> cur;
        for (int i = 0; i < sys.m(); ++i) {
            for (const auto& [z, zword] : prev) {
                VectorField br = lie_bracket(sys.field(i), z);
                if (br.is_zero()) continue;
                std::string word = "[" + sys.name(i) + "," + zword + "]";
                if (len > top)
                    throw HomogeneityViolation("nonzero commutator " + word + " of length " +
                                               std::to_string(len) + " exceeds alpha_n");
                if (!field_is_homogeneous(br, sys.weights(), len))
                    throw HomogeneityViolation("commutator " + word +
                                               " is not homogeneous of degree " +
                                               std::to_string(len));
                cur.emplace_back(br, word);
                bool dup = false;
                for (const auto& e : basis.entries) {
                    if (e.degree != len) continue;
                    if (proportionality(e.field, br)) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) {
                    basis.entries.push_back({br, len, word});
                    if ((int)basis.entries.size() > limits.max_basis)
                        throw ResourceLimit("commutator basis exceeds cap of " +
                                            std::to_string(limits.max_basis));
                }
            }
        }
        prev = std::move(cur);
        if (prev.empty()) break;
    }
    return basis;
}

struct LambdaEntry {
    std::vector<int> tuple; // indices into the basis, strictly increasing
    int dI;                 // sum of the bracket lengths over the tuple
    Poly poly;              // the determinant, nonzero
};

/// Determinants over n-element basis subsets with d(I) <= Q, deduplicated up
/// to a scalar multiple per formal degree. Tuples with d(I) > Q are skipped
/// without computing the determinant (they vanish identically).
inline std::vector<LambdaEntry> assemble_lambdas(const CommutatorBasis& basis,
                                                 const VectorFieldSystem& sys,
                                                 const EnumerationLimits& limits = {}) {
    if (basis.entries.empty()) throw std::invalid_argument("assemble_lambdas: empty basis");
    const int n = sys.n();
    const int Q = sys.weights().Q();
    const int q = (int)basis.size();
    std::vector<LambdaEntry> out;
    if (q < n) return out;

    // suffix-minimal degree sums for pruning
    std::vector<int> degs(q);
    for (int i = 0; i < q; ++i) degs[i] = basis[i].degree;

    long visited = 0;
    std::vector<int> tuple(n);
    // key: (dI, monic normal form) -> representative already stored
    std::vector<std::pair<int, Poly>> seen;

    auto rec = [&](auto&& self, int pos, int start, int degsum) -> void {
        if (++visited > limits.max_tuples)
            throw ResourceLimit("tuple enumeration exceeds cap of " +
                                std::to_string(limits.max_tuples));
        if (pos == n) {
            std::vector<VectorField> rows;
            rows.reserve(n);
            for (int i : tuple) rows.push_back(basis[i].field);
            Poly det = det_fields(rows);
            if (det.is_zero()) return;
            Poly normal = det.monic();
            for (const auto& [d, p] : seen)
                if (d == degsum && p == normal) return;
            seen.emplace_back(degsum, normal);
            out.push_back({tuple, degsum, det});
            return;
        }
        int remaining = n - pos;
        for (int i = start; i + remaining <= q; ++i) {
            int d = degsum + degs[i];
            // remaining-1 further entries each have degree >= degs[i]
            if (d + (long)(remaining - 1) * degs[i] > Q) break;
            tuple[pos] = i;
            self(self, pos + 1, i + 1, d);
        }
    };
    rec(rec, 0, 0, 0);

    std::sort(out.begin(), out.end(), [](const LambdaEntry& a, const LambdaEntry& b) {
        if (a.dI != b.dI) return a.dI < b.dI;
        return a.tuple < b.tuple;
    });
    return out;
}

/// The Nagel-Stein-Wainger profile of a system: the lambda determinant family
/// with formal degrees, plus the derived scalars.
class NSWProfile {
public:
    NSWProfile(const VectorFieldSystem& sys, std::vector<LambdaEntry> lambdas)
        : weights_(sys.weights()), lambdas_(std::move(lambdas)) {
        const int Q = weights_.Q();
        if (lambdas_.empty())
            throw HoermanderViolation(
                "no nonzero lambda determinant: Hoermander's condition fails at the origin");
        w_ = lambdas_.front().dI;
        Rational fq0(0);
        bool have_const_at_q = false;
        for (const auto& l : lambdas_) {
            w_ = std::min(w_, l.dI);
            // structural self-checks implied by homogeneity
            auto deg = weighted_degree(l.poly, weights_);
            if (!deg.is_homogeneous(Q - l.dI))
                throw HomogeneityViolation("lambda determinant fails the scaling identity");
            if (l.dI == Q) {
                if (!l.poly.is_constant())
                    throw HomogeneityViolation("lambda with d(I) = Q is not constant");
                have_const_at_q = true;
                fq0 += l.poly.constant_value().abs();
            }
            for (int v : l.poly.variables_used()) degenerate_vars_.insert(v);
        }
        if (!have_const_at_q)
            throw HoermanderViolation(
                "no constant lambda at degree Q: Hoermander's condition fails at the origin");
        fQ0_ = fq0;
        if (degenerate_vars_.count(weights_.n() - 1))
            throw HomogeneityViolation("last variable appears in the profile");
        alphaX_ = 0;
        for (int v : degenerate_vars_) alphaX_ += weights_.alpha(v);
    }

    int n() const { return weights_.n(); }
    const DilationWeights& weights() const { return weights_; }
    const std::vector<LambdaEntry>& lambdas() const { return lambdas_; }
    int Q() const { return weights_.Q(); }
    int w() const { return w_; }
    int hoermander_index() const { return weights_.max_alpha(); }
    const std::set<int>& degenerate_vars() const { return degenerate_vars_; } // 0-based
    int alphaX() const { return alphaX_; }
    const Rational& fQ0() const { return fQ0_; }

    /// Lambda(x, r) evaluated in floating point.
    double lambda_value(const std::vector<double>& x, double r) const {
        double sum = 0.0;
        for (const auto& l : lambdas_)
            sum += std::abs(l.poly.eval_double(x)) * std::pow(r, l.dI);
        return sum;
    }

private:
    DilationWeights weights_;
    std::vector<LambdaEntry> lambdas_;
    int w_ = 0;
    std::set<int> degenerate_vars_;
    int alphaX_ = 0;
    Rational fQ0_;
};

inline NSWProfile nsw_profile(const VectorFieldSystem& sys, const EnumerationLimits& limits = {}) {
    CommutatorBasis basis = enumerate_commutators(sys, limits);
    return NSWProfile(sys, assemble_lambdas(basis, sys, limits));
}

/// nu(x): the smallest formal degree whose lambda does not vanish at x.
inline int pointwise_dimension(const NSWProfile& profile, const std::vector<Rational>& x) {
    int best = profile.Q();
    for (const auto& l : profile.lambdas()) {
        if (l.dI >= best) continue;
        if (!l.poly.eval(x).is_zero()) best = l.dI;
    }
    return best;
}

struct Classification {
    bool degenerate;
    int v; // number of degenerate components when degenerate

    friend bool operator==(const Classification& a, const Classification& b) {
        return a.degenerate == b.degenerate && a.v == b.v;
    }
};

inline Classification classify(const NSWProfile& profile) {
    if (profile.degenerate_vars().empty()) return {false, 0};
    return {true, (int)profile.degenerate_vars().size()};
}

} // namespace nsw
