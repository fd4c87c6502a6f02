#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbp/quadrature.hpp"

namespace fbp {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/*
 * Piecewise-linear constitutive law of cubic type:
 *
 *   v = phi(u) = gamma_1 u + delta_1   for u <= b      (rising)
 *              = gamma_0 u + delta_0   for b < u < c   (falling)
 *              = gamma_2 u + delta_2   for u >= c      (rising)
 *
 * with local maximum B = phi(b), local minimum A = phi(c), A < B.
 * The middle segment carries the unstable phase.
 */
struct PhaseLaw {
    double gamma0, gamma1, gamma2;
    double delta0, delta1, delta2;
    double b, c;

    double critical_low() const { return gamma2 * c + delta2; }   // A
    double critical_high() const { return gamma1 * b + delta1; }  // B

    void validate() const {
        const double A = critical_low(), B = critical_high();
        auto fail = [](const std::string& msg) { throw ValidationError("PhaseLaw: " + msg); };
        if (!(gamma1 > 0.0)) fail("gamma1 must be positive");
        if (!(gamma2 > 0.0)) fail("gamma2 must be positive");
        if (!(gamma0 < 0.0)) fail("gamma0 must be negative");
        if (!(b < c)) fail("b < c required");
        if (!(A < B)) fail("A < B required");
        const double scale = std::max({1.0, std::abs(A), std::abs(B)});
        if (std::abs((gamma1 * b + delta1) - (gamma0 * b + delta0)) > 1e-12 * scale)
            fail("discontinuous at u = b");
        if (std::abs((gamma0 * c + delta0) - (gamma2 * c + delta2)) > 1e-12 * scale)
            fail("discontinuous at u = c");
        if (std::abs(gamma0 - (A - B) / (c - b)) > 1e-10 * std::max(1.0, std::abs(gamma0)))
            fail("gamma0 inconsistent with (A - B)/(c - b)");
    }
};

/// Canonical test law: b=0, c=1, A=0, B=1, all slopes of unit magnitude.
inline PhaseLaw make_reference_law() {
    PhaseLaw law;
    law.gamma1 = 1.0;
    law.delta1 = 1.0;
    law.gamma0 = -1.0;
    law.delta0 = 1.0;
    law.gamma2 = 1.0;
    law.delta2 = -1.0;
    law.b = 0.0;
    law.c = 1.0;
    law.validate();
    return law;
}

inline double phi(const PhaseLaw& law, double u) {
    if (u <= law.b) return law.gamma1 * u + law.delta1;
    if (u >= law.c) return law.gamma2 * u + law.delta2;
    return law.gamma0 * u + law.delta0;
}

/// The three monotone branches of v = phi(u). Branch 1 covers u <= b,
/// branch 0 the falling middle piece, branch 2 covers u >= c.
struct Branch {
    int index;
    double u_lo, u_hi;  // domain (inf allowed)
    double v_lo, v_hi;  // range
};

inline Branch branch(const PhaseLaw& law, int i) {
    const double inf = std::numeric_limits<double>::infinity();
    const double A = law.critical_low(), B = law.critical_high();
    switch (i) {
        case 1: return {1, -inf, law.b, -inf, B};
        case 0: return {0, law.b, law.c, A, B};
        case 2: return {2, law.c, inf, A, inf};
        default: throw DomainError("branch index must be 0, 1 or 2");
    }
}

inline double branch_slope(const PhaseLaw& law, int i) {
    switch (i) {
        case 0: return law.gamma0;
        case 1: return law.gamma1;
        case 2: return law.gamma2;
        default: throw DomainError("branch index must be 0, 1 or 2");
    }
}

inline double branch_intercept(const PhaseLaw& law, int i) {
    switch (i) {
        case 0: return law.delta0;
        case 1: return law.delta1;
        case 2: return law.delta2;
        default: throw DomainError("branch index must be 0, 1 or 2");
    }
}

/// Inverse of branch i: u with phi(u) = v. Throws outside the branch range.
inline double branch_inverse(const PhaseLaw& law, int i, double v) {
    const Branch br = branch(law, i);
    double scale = 1.0;
    if (std::isfinite(br.v_lo)) scale = std::max(scale, std::abs(br.v_lo));
    if (std::isfinite(br.v_hi)) scale = std::max(scale, std::abs(br.v_hi));
    const double pad = 1e-12 * scale;
    if (v < br.v_lo - pad || v > br.v_hi + pad)
        throw DomainError("branch_inverse: v = " + std::to_string(v) + " outside range [" +
                          std::to_string(br.v_lo) + ", " + std::to_string(br.v_hi) +
                          "] of branch " + std::to_string(i));
    return (v - branch_intercept(law, i)) / branch_slope(law, i);
}

/// Nondecreasing test function used in the entropy machinery; piecewise
/// linear through (x_i, y_i), constant beyond the sampled range.
struct MonotoneTestFunction {
    std::vector<double> x;
    std::vector<double> y;

    void validate() const {
        if (x.size() != y.size() || x.size() < 2)
            throw ValidationError("MonotoneTestFunction: need matching samples");
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            if (!(x[i + 1] > x[i])) throw ValidationError("MonotoneTestFunction: x not increasing");
            if (y[i + 1] < y[i] - 1e-14 * std::max(1.0, std::abs(y[i])))
                throw ValidationError("MonotoneTestFunction: values must be nondecreasing");
        }
    }

    double operator()(double s) const {
        if (s <= x.front()) return y.front();
        if (s >= x.back()) return y.back();
        auto it = std::upper_bound(x.begin(), x.end(), s);
        const std::size_t j = static_cast<std::size_t>(it - x.begin());
        const double w = (s - x[j - 1]) / (x[j] - x[j - 1]);
        return (1.0 - w) * y[j - 1] + w * y[j];
    }

    static MonotoneTestFunction constant(double v, double lo, double hi) {
        return {{lo, hi}, {v, v}};
    }
    static MonotoneTestFunction identity(double lo, double hi) { return {{lo, hi}, {lo, hi}}; }
    /// max(s - w, 0) sampled on [lo, hi].
    static MonotoneTestFunction ramp(double w, double lo, double hi) {
        if (w <= lo || w >= hi) throw ValidationError("ramp kink must be interior");
        return {{lo, w, hi}, {0.0, 0.0, hi - w}};
    }
};

namespace detail {

// Checks a scalar function for monotonicity on [lo,hi] by dense sampling.
template <class G>
void require_nondecreasing(G&& g, double lo, double hi) {
    const int n = 512;
    double prev = g(lo);
    for (int i = 1; i <= n; ++i) {
        const double s = lo + (hi - lo) * i / n;
        const double cur = g(s);
        if (cur < prev - 1e-10 * std::max(1.0, std::abs(prev)))
            throw ValidationError("entropy test function is not nondecreasing");
        prev = cur;
    }
}

}  // namespace detail

namespace detail {

inline void phi_range(const PhaseLaw& law, double lo, double hi, double& vmin, double& vmax) {
    vmin = std::min(phi(law, lo), phi(law, hi));
    vmax = std::max(phi(law, lo), phi(law, hi));
    for (double kink : {law.b, law.c}) {
        if (kink > lo && kink < hi) {
            vmin = std::min(vmin, phi(law, kink));
            vmax = std::max(vmax, phi(law, kink));
        }
    }
}

}  // namespace detail

/*
 * Entropy primitive G(u) = int_k^u g(phi(s)) ds.
 *
 * phi is piecewise linear, so g(phi(s)) is g composed with an affine map on
 * each segment. Generic g is integrated adaptively (rel 1e-10); monotonicity
 * of g is checked by sampling over the phi-range touched.
 */
template <class G>
double entropy_primitive(const PhaseLaw& law, G&& g, double k, double u) {
    if (k == u) return 0.0;
    const double lo = std::min(k, u), hi = std::max(k, u);
    double vmin, vmax;
    detail::phi_range(law, lo, hi, vmin, vmax);
    if (vmax > vmin) detail::require_nondecreasing(g, vmin, vmax);
    std::vector<double> cuts{lo};
    if (law.b > lo && law.b < hi) cuts.push_back(law.b);
    if (law.c > lo && law.c < hi) cuts.push_back(law.c);
    cuts.push_back(hi);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += integrate_adaptive([&](double s) { return g(phi(law, s)); }, cuts[i], cuts[i + 1],
                                  1e-10);
    return (u >= k) ? acc : -acc;
}

/// Piecewise-linear g: split at kink preimages and integrate segment-exactly.
inline double entropy_primitive(const PhaseLaw& law, const MonotoneTestFunction& g, double k,
                                double u) {
    g.validate();
    if (k == u) return 0.0;
    const double lo = std::min(k, u), hi = std::max(k, u);
    std::vector<double> cuts{lo, hi};
    for (double kink : {law.b, law.c})
        if (kink > lo && kink < hi) cuts.push_back(kink);
    // preimages of g's kinks under each affine branch
    for (double w : g.x) {
        for (int i : {0, 1, 2}) {
            const Branch br = branch(law, i);
            if (w < br.v_lo || w > br.v_hi) continue;
            const double s = (w - branch_intercept(law, i)) / branch_slope(law, i);
            if (s > lo && s < hi) cuts.push_back(s);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // g(phi(.)) is linear on the piece; 2-point Gauss is exact
        acc += integrate_cell([&](double s) { return g(phi(law, s)); }, cuts[i], cuts[i + 1], 0.0,
                              0.0, 2);
    }
    return (u >= k) ? acc : -acc;
}

/// Primitive F(v) = int_base^v g of the test function itself.
template <class G>
double test_function_primitive(G&& g, double base, double v) {
    if (v == base) return 0.0;
    const double lo = std::min(base, v), hi = std::max(base, v);
    const double acc = integrate_adaptive([&](double s) { return g(s); }, lo, hi, 1e-10);
    return (v >= base) ? acc : -acc;
}

}  // namespace fbp
