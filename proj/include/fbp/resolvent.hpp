#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fbp/mesh.hpp"
#include "fbp/quadrature.hpp"
#include "fbp/volterra.hpp"

namespace fbp {

/*
 * Resolvent machinery for the second-kind operator L x = x - int_0^t B(t,s) x(s) ds
 * with a weakly singular kernel B(t,s) = kb(t,s) (t-s)^{-1/2}. The inverse is
 *
 *   x(t) = L x(t) + int_0^t H(t,s) L x(s) ds,   H = B + G,
 *
 * where G = sum_{m>=2} H_m is built from the iterated kernels
 * H_1 = B, H_m(t,s) = int_s^t H_{m-1}(t,z) H_1(z,s) dz. With
 * M = sup |kb| the iterates obey
 *
 *   |H_m(t,s)| <= M^m pi^{m/2} / Gamma(m/2) * (t-s)^{(m-2)/2},  m >= 2,
 *
 * which controls the truncation.
 */

/// Gamma-function tail bound for the m-th iterated kernel.
inline double iterate_bound(int m, double M, double dt) {
    if (m < 2) throw DomainError("iterate_bound defined for m >= 2");
    return std::pow(M, m) * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m) *
           std::pow(dt, 0.5 * (m - 2));
}

struct ResolventOptions {
    int grid_n = 161;       // nodes of the square evaluation grid
    int quad_n = 24;        // points per composition integral
    int max_terms = 12;     // hard cap on the Neumann series
    double tail_tol = 1e-13;
};

class ResolventTable {
  public:
    using Options = ResolventOptions;

    ResolventTable(std::function<double(double, double)> kb, double horizon,
                   ResolventOptions opt = ResolventOptions())
        : kb_(std::move(kb)), horizon_(horizon), opt_(opt) {
        build();
    }

    double horizon() const { return horizon_; }
    int terms_used() const { return terms_used_; }
    double bound_constant() const { return m_est_; }
    bool series_converged() const { return converged_; }

    /// G(t,s) = sum_{m>=2} H_m(t,s), bilinear from the precomputed tables.
    double value(double t, double s) const {
        if (s >= t) return (s <= t + 1e-15) ? interp(sum_, t, t) : 0.0;
        return interp(sum_, t, s);
    }

    /// Direct (table-free) evaluation of the m-th iterated kernel at (t,s),
    /// composed by doubling so only exact kernel values enter.
    double iterate_direct(int m, double t, double s) const {
        if (!(s < t)) throw DomainError("iterate_direct requires s < t");
        switch (m) {
            case 1: return kb_(t, s) / std::sqrt(t - s);
            case 2: return h2(t, s);
            case 3: return compose_left_singular(m, t, s);
            case 4: return compose_bounded([&](double a, double b) { return h2(a, b); },
                                           [&](double a, double b) { return h2(a, b); }, t, s);
            case 5: return compose_left_singular(m, t, s);
            case 6: return compose_bounded([&](double a, double b) { return iterate_direct(4, a, b); },
                                           [&](double a, double b) { return h2(a, b); }, t, s);
            case 7: return compose_bounded([&](double a, double b) { return iterate_direct(4, a, b); },
                                           [&](double a, double b) { return iterate_direct(3, a, b); },
                                           t, s);
            case 8: return compose_bounded([&](double a, double b) { return iterate_direct(4, a, b); },
                                           [&](double a, double b) { return iterate_direct(4, a, b); },
                                           t, s);
            default: throw DomainError("iterate_direct supports m <= 8");
        }
    }

    /// sup |kb| over the evaluation grid (estimate of the bound constant M).
    double estimate_M() const { return m_est_; }

  private:
    using Table = std::vector<std::vector<double>>;  // [i][j] at (t_i, s_j), j <= i

    void build() {
        const int n = opt_.grid_n;
        grid_.resize(n);
        for (int i = 0; i < n; ++i) grid_[i] = horizon_ * i / (n - 1.0);

        m_est_ = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                m_est_ = std::max(m_est_, std::abs(kb_(grid_[i], grid_[j])));

        Table prev = make_h2_table();
        sum_ = prev;
        terms_used_ = 2;
        converged_ = false;
        double scale = table_max(prev) + 1e-300;
        for (int m = 3; m <= opt_.max_terms; ++m) {
            Table next = compose_with_b(prev);
            add_into(sum_, next);
            prev = std::move(next);
            terms_used_ = m;
            const double bound = iterate_bound(m + 1, m_est_, horizon_);
            if (table_max(prev) < opt_.tail_tol * scale && bound < opt_.tail_tol * scale) {
                converged_ = true;
                break;
            }
        }
        if (!converged_) {
            // series still decaying? compare the last two analytic bounds
            converged_ = iterate_bound(terms_used_ + 1, m_est_, horizon_) <
                         iterate_bound(terms_used_, m_est_, horizon_) + 1e-300;
        }
    }

    Table make_h2_table() const {
        const int n = static_cast<int>(grid_.size());
        Table h(n);
        for (int i = 0; i < n; ++i) {
            h[i].resize(i + 1);
            for (int j = 0; j <= i; ++j)
                h[i][j] = (i == j) ? kPi * kb_(grid_[i], grid_[i]) * kb_(grid_[i], grid_[i])
                                   : h2(grid_[i], grid_[j]);
        }
        return h;
    }

    Table compose_with_b(const Table& hm) const {
        const int n = static_cast<int>(grid_.size());
        Table out(n);
        for (int i = 0; i < n; ++i) {
            out[i].assign(i + 1, 0.0);
            for (int j = 0; j < i; ++j) {
                const double t = grid_[i], s = grid_[j];
                out[i][j] = integrate_cell(
                    [&](double z) { return row_interp(hm, i, z) * kb_(z, s); }, s, t, -0.5, 0.0,
                    opt_.quad_n);
            }
            out[i][i] = 0.0;  // H_m vanishes on the diagonal for m >= 3
        }
        return out;
    }

    // H2 by Chebyshev-Gauss (both endpoints carry a -1/2 power)
    double h2(double t, double s) const {
        if (!(s < t)) return kPi * kb_(t, t) * kb_(t, t);
        const QuadRule& rule = detail::cached_rule(opt_.quad_n, -0.5, -0.5);
        const double half = 0.5 * (t - s), mid = 0.5 * (t + s);
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double z = mid + half * rule.nodes[q];
            acc += rule.weights[q] * kb_(t, z) * kb_(z, s);
        }
        return acc;  // the (t-s)-powers cancel: weight integrates to pi
    }

    // int_s^t F(t,z) Gsec(z,s) dz for bounded factors, sin^2 substitution
    template <class F1, class F2>
    double compose_bounded(F1&& upper, F2&& lower, double t, double s) const {
        return integrate_sinsq([&](double z) { return upper(t, z) * lower(z, s); }, s, t,
                               opt_.quad_n);
    }

    // H_m = int H_{m-1}(t,z) B(z,s) dz with the (z-s)^{-1/2} endpoint explicit
    double compose_left_singular(int m, double t, double s) const {
        return integrate_cell(
            [&](double z) { return iterate_direct(m - 1, t, z) * kb_(z, s); }, s, t, -0.5, 0.0,
            opt_.quad_n);
    }

    double row_interp(const Table& h, int i, double z) const {
        // linear interpolation inside row i (arguments (t_i, z), z <= t_i)
        const double dz = grid_[1] - grid_[0];
        double pos = z / dz;
        int j = static_cast<int>(pos);
        if (j < 0) j = 0;
        if (j >= i) return h[i][i];
        const double w = pos - j;
        const double right = (j + 1 <= i) ? h[i][j + 1] : h[i][i];
        return (1.0 - w) * h[i][j] + w * right;
    }

    double interp(const Table& h, double t, double s) const {
        const int n = static_cast<int>(grid_.size());
        const double dz = grid_[1] - grid_[0];
        double pos = t / dz;
        int i = static_cast<int>(pos);
        if (i < 0) i = 0;
        if (i >= n - 1) i = n - 2;
        const double wt = pos - i;
        const double lo = row_value(h, i, s);
        const double hi = row_value(h, i + 1, s);
        return (1.0 - wt) * lo + wt * hi;
    }

    double row_value(const Table& h, int i, double s) const {
        if (i == 0) return h[0][0];
        double smax = grid_[i];
        if (s >= smax) return h[i][i];
        return row_interp(h, i, s);
    }

    static double table_max(const Table& h) {
        double m = 0.0;
        for (const auto& row : h)
            for (double v : row) m = std::max(m, std::abs(v));
        return m;
    }
    static void add_into(Table& acc, const Table& inc) {
        for (std::size_t i = 0; i < acc.size(); ++i)
            for (std::size_t j = 0; j < acc[i].size(); ++j) acc[i][j] += inc[i][j];
    }

    std::function<double(double, double)> kb_;
    double horizon_;
    Options opt_;
    std::vector<double> grid_;
    Table sum_;
    double m_est_ = 0.0;
    int terms_used_ = 0;
    bool converged_ = false;
};

/*
 * Second solution path for pi f = N + int K f: with B = K/pi and l = N/pi,
 *
 *   f(t) = l(t) + int_0^t (B + G_B)(t,s) l(s) ds.
 *
 * Cross-checks the marching solver; the Neumann series converges slowly for
 * large M sqrt(T), in which case series_converged() reports false.
 */
inline std::vector<double> solve_via_resolvent(const VolterraProblem& p,
                                               const ResolventTable& table) {
    const std::size_t n = p.grid.size();
    std::vector<double> ell(n);
    for (std::size_t i = 0; i < n; ++i) ell[i] = p.forcing[i] / kPi;

    std::vector<double> f(n);
    f[0] = ell[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double t = p.grid[i];
        double acc = ell[i];
        // singular part: product integration of kappa/pi * ell (piecewise linear)
        for (std::size_t j = 0; j < i; ++j) {
            const double a = p.grid[j], b = p.grid[j + 1];
            const double ra = std::sqrt(t - a), rb = std::sqrt(std::max(0.0, t - b));
            const double m0 = 2.0 * (ra - rb);
            const double m1 = (t - a) * m0 - (2.0 / 3.0) * (ra * ra * ra - rb * rb * rb);
            const double w_left = m0 - m1 / (b - a), w_right = m1 / (b - a);
            acc += (w_left * p.kappa(t, a) * ell[j] + w_right * p.kappa(t, b) * ell[j + 1]) / kPi;
        }
        // bounded resolvent tail
        acc += integrate_adaptive(
            [&](double s) {
                return table.value(t, s) * pl_interp(p.grid, ell, s);
            },
            0.0, t, 1e-9, 18);
        f[i] = acc;
    }
    return f;
}

}  // namespace fbp
