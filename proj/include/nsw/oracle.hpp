#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "nsw/exponents.hpp"
#include "nsw/profile.hpp"

namespace nsw {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct DegenerateDesign : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
    int nodes_per_axis = 256;
};

/// Numerical value of I(r) = integral over (0,1]^N of x^b / sum x^a r^s,
/// computed in the exponential coordinates y = -ln x by composite-midpoint
/// tensor quadrature on [0, L]^N. The truncation L grows with |ln r| so the
/// discarded tail is negligible against the integrand's peak scale.
inline double eval_I(const IndexPairSet& g, double r, const QuadratureOptions& opts = {}) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("eval_I: r must lie in (0,1)");
    const int n = g.N();
    if (n > 3) throw DomainError("eval_I: tensor quadrature supports N <= 3");
    const int m = opts.nodes_per_axis;
    if (m < 2) throw DomainError("eval_I: need at least 2 nodes per axis");

    long max_a = 0;
    for (const auto& p : g.pairs()) {
        long s = 0;
        for (int x : p.a) s += x;
        max_a = std::max(max_a, s);
    }
    const double l
        = std::max(50.0, 3.0 * std::log(1.0 / r) * (double)max_a + 50.0);
    const double h = l / m;

    const std::size_t np = g.pairs().size();
    // per-axis factor tables: exp(-a_i y_k) for the pairs, exp(-(b_i+1) y_k)
    // for the numerator
    std::vector<std::vector<std::vector<double>>> den(np,
        std::vector<std::vector<double>>(n, std::vector<double>(m)));
    std::vector<std::vector<double>> num(n, std::vector<double>(m));
    std::vector<double> rs(np);
    for (std::size_t p = 0; p < np; ++p) rs[p] = std::pow(r, (double)g.pairs()[p].s);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            double y = (k + 0.5) * h;
            num[i][k] = std::exp(-(double)(g.b()[i] + 1) * y);
            for (std::size_t p = 0; p < np; ++p)
                den[p][i][k] = std::exp(-(double)g.pairs()[p].a[i] * y);
        }
    }

    double sum = 0.0;
    if (n == 1) {
        for (int k = 0; k < m; ++k) {
            double d = 0.0;
            for (std::size_t p = 0; p < np; ++p) d += den[p][0][k] * rs[p];
            sum += num[0][k] / d;
        }
    } else if (n == 2) {
        for (int k1 = 0; k1 < m; ++k1) {
            for (int k2 = 0; k2 < m; ++k2) {
                double d = 0.0;
                for (std::size_t p = 0; p < np; ++p) d += den[p][0][k1] * den[p][1][k2] * rs[p];
                sum += num[0][k1] * num[1][k2] / d;
            }
        }
    } else {
        for (int k1 = 0; k1 < m; ++k1) {
            for (int k2 = 0; k2 < m; ++k2) {
                for (int k3 = 0; k3 < m; ++k3) {
                    double d = 0.0;
                    for (std::size_t p = 0; p < np; ++p)
                        d += den[p][0][k1] * den[p][1][k2] * den[p][2][k3] * rs[p];
                    sum += num[0][k1] * num[1][k2] * num[2][k3] / d;
                }
            }
        }
    }
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale *= h;
    return sum * scale;
}

namespace detail {

// pairwise reduction in a fixed tree order, independent of any blocking
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double uniform01(std::mt19937_64& rng) {
    return (double)(rng() >> 11) * 0x1.0p-53;
}

} // namespace detail

struct McEstimate {
    double mean;
    double std_error;
};

/// Monte-Carlo estimate of J(r) = integral over (-1,1)^v of 1/Lambda(x,r),
/// restricted to the degenerate variables. The seed fully determines the
/// sample stream and the summation order is fixed.
inline McEstimate eval_J_estimate(const NSWProfile& profile, double r, long n_samples,
                                  std::uint64_t seed) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("eval_J: r must lie in (0,1)");
    if (n_samples < 10000) throw DomainError("eval_J: need at least 10^4 samples");
    Reduction red = reduce_profile(profile);
    if (red.v == 0) {
        double lam = profile.fQ0().to_double() * std::pow(r, (double)profile.Q());
        return {1.0 / lam, 0.0};
    }
    std::mt19937_64 rng(seed);
    std::vector<double> vals((std::size_t)n_samples);
    std::vector<double> x(red.v);
    for (long s = 0; s < n_samples; ++s) {
        for (int i = 0; i < red.v; ++i) x[i] = 2.0 * detail::uniform01(rng) - 1.0;
        double lam = 0.0;
        for (const auto& l : red.lambdas)
            lam += std::abs(l.poly.eval_double(x)) * std::pow(r, (double)l.dI);
        vals[(std::size_t)s] = 1.0 / lam;
    }
    double mean = detail::pairwise_sum(vals, 0, vals.size()) / (double)n_samples;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= (double)(n_samples - 1);
    double volume = std::pow(2.0, red.v);
    return {mean * volume, std::sqrt(var / (double)n_samples) * volume};
}

inline double eval_J(const NSWProfile& profile, double r, long n_samples, std::uint64_t seed) {
    return eval_J_estimate(profile, r, n_samples, seed).mean;
}

struct FitResult {
    double Q0_hat;
    double d0_hat;
    double residual;             // root-mean-square in the log domain
    std::vector<double> r_grid;  // strictly decreasing
};

/// Least-squares fit of ln(value) = Q0 ln(1/r) + d0 ln ln(1/r) + const.
/// d0_hat is reported unrounded; the log-log design is nearly collinear, so
/// it corroborates rather than decides.
inline FitResult fit_exponents(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 4) throw DegenerateDesign("fit_exponents: need at least 4 samples");
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto [r, v] = samples[i];
        if (!(r > 0.0 && r < 1.0)) throw DomainError("fit_exponents: r must lie in (0,1)");
        if (!(v > 0.0)) throw DomainError("fit_exponents: values must be positive");
        if (i > 0 && r == samples[i - 1].first)
            throw DegenerateDesign("fit_exponents: duplicate r values");
    }

    const std::size_t n = samples.size();
    long double a[3][3] = {};
    long double rhs[3] = {};
    for (const auto& [r, v] : samples) {
        long double f0 = std::log(1.0L / r);
        long double f1 = std::log(f0);
        long double f2 = 1.0L;
        long double y = std::log((long double)v);
        long double f[3] = {f0, f1, f2};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) a[i][j] += f[i] * f[j];
            rhs[i] += f[i] * y;
        }
    }
    long double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                      a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                      a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (!(std::abs((double)det) > 0.0) || !std::isfinite((double)det))
        throw DegenerateDesign("fit_exponents: rank-deficient design");
    auto solve3 = [&](int col) {
        long double b[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) b[i][j] = (j == col) ? rhs[i] : a[i][j];
        long double d = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                        b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                        b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        return (double)(d / det);
    };
    FitResult fit;
    fit.Q0_hat = solve3(0);
    fit.d0_hat = solve3(1);
    double c = solve3(2);
    double ss = 0.0;
    fit.r_grid.reserve(n);
    for (const auto& [r, v] : samples) {
        fit.r_grid.push_back(r);
        double pred = fit.Q0_hat * std::log(1.0 / r) + fit.d0_hat * std::log(std::log(1.0 / r)) + c;
        double e = std::log(v) - pred;
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / (double)n);
    return fit;
}

} // namespace nsw
