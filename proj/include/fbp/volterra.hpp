#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fbp/interface_curve.hpp"
#include "fbp/quadrature.hpp"
#include "fbp/side_data.hpp"

namespace fbp {

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.7724538509055160273;

/*
 * Boundary-flux Volterra equation of the half-line heat problem in a moving
 * domain x > xi(t):
 *
 *   pi f(t) = N(t) + int_0^t K(t,s) f(s) ds
 *
 * with the weakly singular kernel
 *
 *   K(t,s) = (sqrt(pi)/2) * (xi(t)-xi(s))/(t-s) * exp(-(xi(t)-xi(s))^2/(4(t-s)))
 *            * (t-s)^{-1/2},   0 < s < t,
 *
 * written here as K(t,s) = kernel_bounded(t,s) * (t-s)^{-1/2}.
 */

/// Bounded kernel factor; near the diagonal the difference quotient is
/// replaced by xi'(t) (valid for C^{1+beta} curves, avoids 0/0 noise).
inline double kernel_bounded(const InterfaceCurve& xi, double t, double s,
                             double diag_tol = 0.0) {
    const double dt = t - s;
    double quotient;
    if (dt <= diag_tol || dt <= 0.0)
        quotient = xi.derivative(t);
    else
        quotient = (xi(t) - xi(s)) / dt;
    const double expo = (dt > 0.0) ? std::exp(-quotient * quotient * dt / 4.0) : 1.0;
    return 0.5 * kSqrtPi * quotient * expo;
}

/// Full weakly singular kernel K(t,s); domain error on s >= t.
inline double moving_boundary_kernel(const InterfaceCurve& xi, double t, double s) {
    if (!(s < t)) throw DomainError("moving_boundary_kernel requires s < t");
    return kernel_bounded(xi, t, s) / std::sqrt(t - s);
}

/*
 * Forcing functional
 *
 *   N(t) = sqrt(pi) [ (1/sqrt t) int_0^inf exp(-(xi(t)-x)^2/(4t)) q0'(x) dx
 *                     - int_0^t exp(-(xi(t)-xi(s))^2/(4(t-s))) (t-s)^{-1/2} g0'(s) ds ].
 *
 * The spatial integral is evaluated in the similarity variable
 * y = (x - xi(t)) / (2 sqrt t) and truncated where exp(-y^2) drops below
 * 1e-16 of its peak. The boundary convolution is weakly singular at s = t and
 * integrated cellwise with a Jacobi endpoint rule.
 */
struct ForcingOptions {
    int gauss_points_space = 24;
    int space_panels = 4;
    int gauss_points_time = 12;
    double tail_cut = 6.1;  // exp(-6.1^2) ~ 6e-17
};

/// (1/sqrt t) * int_0^inf exp(-(xi_t - x)^2 / (4 t)) q0'(x) dx
template <class DQ0>
double gaussian_data_term(double xi_t, double t, DQ0&& q0_prime, const ForcingOptions& opt = {}) {
    if (!(t > 0.0)) throw DomainError("gaussian_data_term requires t > 0");
    const double root_t = std::sqrt(t);
    const double y0 = -xi_t / (2.0 * root_t);  // x = 0 maps here; xi <= 0 so y0 >= 0
    const double y1 = std::sqrt(y0 * y0 + opt.tail_cut * opt.tail_cut);
    double acc = 0.0;
    const double panel = (y1 - y0) / opt.space_panels;
    for (int p = 0; p < opt.space_panels; ++p) {
        const double a = y0 + p * panel, b = a + panel;
        acc += integrate_cell(
            [&](double y) { return std::exp(-y * y) * q0_prime(xi_t + 2.0 * root_t * y); }, a, b,
            0.0, 0.0, opt.gauss_points_space);
    }
    return 2.0 * acc;
}

/// N(t) against an explicit time grid used to split the boundary convolution.
template <class DQ0, class DG0>
double dtn_forcing(const InterfaceCurve& xi, DQ0&& q0_prime, DG0&& g0_prime, double t,
                   const std::vector<double>& grid, const ForcingOptions& opt = {}) {
    if (!(t > 0.0)) throw DomainError("dtn_forcing requires t > 0");
    const double data_term = gaussian_data_term(xi(t), t, q0_prime, opt);

    double boundary = 0.0;
    // cells of the grid clipped to [0, t]; the cell touching t gets the
    // (t-s)^{-1/2} endpoint treated by a Jacobi rule
    for (std::size_t j = 0; j + 1 < grid.size() && grid[j] < t; ++j) {
        const double a = grid[j];
        const double b = std::min(grid[j + 1], t);
        if (!(b > a)) continue;
        auto smooth = [&](double s) {
            const double q = (t - s > 0) ? (xi(t) - xi(s)) / (t - s) : xi.derivative(t);
            return std::exp(-q * q * (t - s) / 4.0) * g0_prime(s);
        };
        if (b >= t * (1.0 - 1e-14)) {
            boundary += integrate_cell(smooth, a, t, 0.0, -0.5, opt.gauss_points_time);
        } else {
            boundary += integrate_cell([&](double s) { return smooth(s) / std::sqrt(t - s); }, a,
                                       b, 0.0, 0.0, opt.gauss_points_time);
        }
    }
    return kSqrtPi * (data_term - boundary);
}

/// Assembled problem: bounded kernel factor, forcing samples and grid.
struct VolterraProblem {
    std::vector<double> grid;                          // 0 = tau_0 < ... < tau_N
    std::function<double(double, double)> kappa;       // bounded kernel part, s <= t
    std::vector<double> forcing;                       // N(tau_i); forcing[0] = limit at 0+
};

/*
 * Marching product-integration solve of pi f = N + int K f. On each cell the
 * product kappa(t_i, s) f(s) is interpolated linearly between its nodal values
 * and integrated exactly against (t_i - s)^{-1/2}:
 *
 *   m0 = int_a^b (t-s)^{-1/2} ds = 2 (sqrt(t-a) - sqrt(t-b))
 *   m1 = int_a^b (s-a) (t-s)^{-1/2} ds = (t-a) m0 - (2/3)((t-a)^{3/2} - (t-b)^{3/2})
 *
 * The scheme is lower triangular; each step divides by (pi - w_ii).
 */
inline std::vector<double> solve_volterra_marching(const VolterraProblem& p) {
    const std::size_t n = p.grid.size();
    if (n < 2) throw ValidationError("volterra: need at least 2 grid nodes");
    if (p.forcing.size() != n) throw ValidationError("volterra: forcing size mismatch");

    std::vector<double> f(n, 0.0);
    f[0] = p.forcing[0] / kPi;

    for (std::size_t i = 1; i < n; ++i) {
        const double t = p.grid[i];
        double known = p.forcing[i];
        double diag_w = 0.0;
        for (std::size_t j = 0; j + 1 <= i; ++j) {
            const double a = p.grid[j], b = p.grid[j + 1];
            const double ra = std::sqrt(t - a);
            const double rb = std::sqrt(std::max(0.0, t - b));
            const double m0 = 2.0 * (ra - rb);
            const double m1 = (t - a) * m0 - (2.0 / 3.0) * (ra * ra * ra - rb * rb * rb);
            const double w_left = m0 - m1 / (b - a);
            const double w_right = m1 / (b - a);
            const double g_left = p.kappa(t, a) * f[j];
            if (j + 1 == i) {
                known += w_left * g_left;
                diag_w = w_right * p.kappa(t, b);
            } else {
                known += w_left * g_left + w_right * p.kappa(t, b) * f[j + 1];
            }
        }
        const double denom = kPi - diag_w;
        if (std::abs(denom) < 1e-12)
            throw NumericsError("volterra marching breakdown: singular diagonal at step " +
                                std::to_string(i));
        f[i] = known / denom;
    }
    return f;
}

/// Weak-singularity sanity: |K(t,s)| sqrt(t-s) bounded over grid pairs.
inline double kernel_singularity_bound(const VolterraProblem& p) {
    double m = 0.0;
    for (std::size_t i = 1; i < p.grid.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            m = std::max(m, std::abs(p.kappa(p.grid[i], p.grid[j])));
    return m;
}

}  // namespace fbp
