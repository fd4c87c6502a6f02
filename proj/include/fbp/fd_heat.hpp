#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fbp/interface_curve.hpp"

namespace fbp {

/*
 * Independent verification oracle: Crank-Nicolson solve of
 *
 *   w_t = gamma w_yy + a(t) w_y,   y in (0, Y),
 *   w(0,t) = g(t),  w_y(Y,t) = 0,  w(y,0) = w0(y),
 *
 * i.e. a moving half-line domain mapped to a fixed one (y = x - xi(t) makes
 * a(t) = xi'(t) appear). The scheme is implicit and time-centered; each step
 * is one tridiagonal solve. The boundary flux w_y(0,t) is read off with a
 * one-sided second-order stencil.
 */

struct FdGrid {
    double y_max = 0.0;      // 0 = choose automatically from the data
    int ny = 512;            // space cells
    int nt = 512;            // time steps
    int store_stride = 0;    // 0 = keep only flux and final field
};

struct FdHeatResult {
    std::vector<double> times;
    std::vector<double> flux;  // w_y(0, t_n)
    std::vector<double> y;
    std::vector<double> final_field;
    std::vector<double> field_times;
    std::vector<std::vector<double>> fields;
    bool peclet_advisory = false;
};

namespace detail {

inline void thomas_solve(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                         std::vector<double>& rhs) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
}

}  // namespace detail

/// Picks a far-field width: decay point of the datum plus the advective
/// displacement plus eight diffusion lengths.
template <class W0>
double choose_far_boundary(W0&& w0, double gamma, double max_advection, double horizon,
                           double tol = 1e-12) {
    const double w_inf = w0(1e6);
    double y = 1.0;
    while (y < 1e5 && std::abs(w0(y) - w_inf) > tol) y *= 2.0;
    return y + max_advection * horizon + 8.0 * std::sqrt(gamma * horizon);
}

template <class A, class G, class W0>
FdHeatResult fd_heat_solve(double gamma, A&& advect, G&& g, W0&& w0, double horizon,
                           FdGrid grid) {
    if (!(gamma > 0.0)) throw ValidationError("fd_heat_solve: gamma must be positive");
    if (grid.ny < 8 || grid.nt < 2) throw ValidationError("fd_heat_solve: grid too small");

    double max_a = 0.0;
    for (int n = 0; n <= grid.nt; ++n)
        max_a = std::max(max_a, std::abs(advect(horizon * n / grid.nt)));
    const double y_max =
        grid.y_max > 0.0 ? grid.y_max : choose_far_boundary(w0, gamma, max_a, horizon);

    const int M = grid.ny;
    const double dy = y_max / M;
    const double dt = horizon / grid.nt;

    FdHeatResult out;
    out.peclet_advisory = (max_a * dy / gamma > 2.0);
    out.y.resize(M + 1);
    for (int j = 0; j <= M; ++j) out.y[j] = j * dy;

    std::vector<double> w(M + 1), wn(M + 1);
    for (int j = 0; j <= M; ++j) w[j] = w0(out.y[j]);
    w[0] = g(0.0);

    out.times.resize(grid.nt + 1);
    out.flux.resize(grid.nt + 1);
    auto boundary_flux = [&](const std::vector<double>& v) {
        return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dy);
    };
    out.times[0] = 0.0;
    out.flux[0] = boundary_flux(w);
    if (grid.store_stride > 0) {
        out.fields.push_back(w);
        out.field_times.push_back(0.0);
    }

    const double rd = gamma * dt / (2.0 * dy * dy);
    std::vector<double> lo(M + 1), di(M + 1), up(M + 1), rhs(M + 1);

    for (int n = 0; n < grid.nt; ++n) {
        const double t0 = n * dt, t1 = (n + 1) * dt;
        const double a0 = advect(t0), a1 = advect(t1);
        const double rc0 = a0 * dt / (4.0 * dy), rc1 = a1 * dt / (4.0 * dy);

        // Dirichlet row
        lo[0] = 0.0;
        di[0] = 1.0;
        up[0] = 0.0;
        rhs[0] = g(t1);
        for (int j = 1; j < M; ++j) {
            lo[j] = -(rd - rc1);
            di[j] = 1.0 + 2.0 * rd;
            up[j] = -(rd + rc1);
            rhs[j] = w[j] + rd * (w[j + 1] - 2.0 * w[j] + w[j - 1]) + rc0 * (w[j + 1] - w[j - 1]);
        }
        // Neumann row via ghost reflection (advection term vanishes there)
        lo[M] = -2.0 * rd;
        di[M] = 1.0 + 2.0 * rd;
        up[M] = 0.0;
        rhs[M] = w[M] + 2.0 * rd * (w[M - 1] - w[M]);

        wn = rhs;
        detail::thomas_solve(lo, di, up, wn);
        w.swap(wn);

        out.times[n + 1] = t1;
        out.flux[n + 1] = boundary_flux(w);
        if (grid.store_stride > 0 && ((n + 1) % grid.store_stride == 0 || n + 1 == grid.nt)) {
            out.fields.push_back(w);
            out.field_times.push_back(t1);
        }
    }
    out.final_field = w;
    return out;
}

/// Moving-frame convenience wrapper: the advection speed is the derivative of
/// the supplied curve.
template <class G, class W0>
FdHeatResult fd_heat_solve_moving(double gamma, const InterfaceCurve& frame, G&& g, W0&& w0,
                                  FdGrid grid) {
    auto adv = frame.derivative_fn();
    return fd_heat_solve(gamma, [adv](double t) { return adv(t); }, std::forward<G>(g),
                         std::forward<W0>(w0), frame.horizon(), grid);
}

}  // namespace fbp
