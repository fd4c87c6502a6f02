#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "fbp/interface_curve.hpp"
#include "fbp/phase_law.hpp"
#include "fbp/resolvent.hpp"
#include "fbp/side_data.hpp"
#include "fbp/volterra.hpp"

namespace fbp {

/// One-sided boundary flux sampled on the interface time grid.
struct FluxTrace {
    std::vector<double> times;
    std::vector<double> values;
};

namespace detail {

inline std::function<double(double, double)> make_kappa(const InterfaceCurve& curve,
                                                        double diag_tol) {
    return [curve, diag_tol](double t, double s) { return kernel_bounded(curve, t, s, diag_tol); };
}

}  // namespace detail

/*
 * Dirichlet problem on the stable region V2 = {x > xi(t)} with diffusivity
 * gamma2: rescale time tau = gamma2 t so the equation becomes the unit heat
 * equation along xibar(tau) = xi(tau/gamma2), march the Volterra equation
 * there, and read the flux back at tau = gamma2 t.
 */
inline VolterraProblem stable_side_problem(const PhaseLaw& law, const InterfaceCurve& xi,
                                           const Profile& u0, const Profile& g0_plus,
                                           const ForcingOptions& fopt = {}) {
    const double gamma2 = law.gamma2;
    if (!(gamma2 > 0.0)) throw ValidationError("stable side requires gamma2 > 0");

    std::vector<double> tau(xi.times().size());
    for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = gamma2 * xi.times()[i];

    // shared_ptr keeps the rescaled curve alive inside the closures
    auto curve = std::make_shared<InterfaceCurve>(forward_rescaled(xi, gamma2, tau));
    const double h_min = tau[1] - tau[0];

    VolterraProblem p;
    p.grid = tau;
    p.kappa = [curve, h_min](double t, double s) {
        return kernel_bounded(*curve, t, s, h_min / 8.0);
    };
    p.forcing.resize(tau.size());
    auto q0p = u0.derivative;
    auto g0p = [g0_plus, gamma2](double s) { return g0_plus.derivative(s / gamma2) / gamma2; };
    p.forcing[0] = kPi * q0p(0.0);
    for (std::size_t i = 1; i < tau.size(); ++i)
        p.forcing[i] = dtn_forcing(*curve, q0p, g0p, tau[i], tau, fopt);
    return p;
}

inline FluxTrace dtn_stable_side(const PhaseLaw& law, const InterfaceCurve& xi, const Profile& u0,
                                 const Profile& g0_plus, const ForcingOptions& fopt = {}) {
    VolterraProblem p = stable_side_problem(law, xi, u0, g0_plus, fopt);
    std::vector<double> f2 = solve_volterra_marching(p);
    return FluxTrace{xi.times(), std::move(f2)};  // f+(t_i) = f2(gamma2 t_i)
}

/*
 * Backward problem on the unstable region V1 = {x < xi(t)} with negative
 * diffusivity gamma0 and final datum uT: the reversal/reflection
 * theta(y,tau) = u(K - y, T - tau/|gamma0|) turns it into a forward unit heat
 * problem along xiunder(tau) = K - xi(T - tau/|gamma0|), with initial datum
 * uT(K - y) and boundary data g0m(T - tau/|gamma0|). Only this well-posed
 * conjugate is ever solved; f-(t) = -f1(|gamma0| (T - t)).
 */
inline VolterraProblem unstable_side_problem(const PhaseLaw& law, const InterfaceCurve& xi,
                                             const Profile& uT, const Profile& g0_minus,
                                             const ForcingOptions& fopt = {}) {
    const double g0abs = std::abs(law.gamma0);
    if (!(law.gamma0 < 0.0)) throw ValidationError("unstable side requires gamma0 < 0");
    const double T = xi.horizon();
    const double K = xi.terminal();
    const std::size_t n = xi.times().size();

    std::vector<double> tau(n);
    for (std::size_t i = 0; i < n; ++i) tau[i] = g0abs * (T - xi.times()[n - 1 - i]);
    tau.front() = 0.0;

    auto curve = std::make_shared<InterfaceCurve>(reversed_reflected(xi, g0abs, tau));
    const double h_min = tau[1] - tau[0];

    VolterraProblem p;
    p.grid = tau;
    p.kappa = [curve, h_min](double t, double s) {
        return kernel_bounded(*curve, t, s, h_min / 8.0);
    };
    p.forcing.resize(n);
    auto q0p = [uT, K](double y) { return -uT.derivative(K - y); };
    auto g0p = [g0_minus, g0abs, T](double s) {
        return -g0_minus.derivative(T - s / g0abs) / g0abs;
    };
    p.forcing[0] = kPi * q0p(0.0);
    for (std::size_t i = 1; i < n; ++i) p.forcing[i] = dtn_forcing(*curve, q0p, g0p, tau[i], tau, fopt);
    return p;
}

inline FluxTrace dtn_unstable_side(const PhaseLaw& law, const InterfaceCurve& xi,
                                   const Profile& uT, const Profile& g0_minus,
                                   const ForcingOptions& fopt = {}) {
    VolterraProblem p = unstable_side_problem(law, xi, uT, g0_minus, fopt);
    std::vector<double> f1 = solve_volterra_marching(p);
    const std::size_t n = f1.size();
    FluxTrace out;
    out.times = xi.times();
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = -f1[n - 1 - i];
    return out;
}

}  // namespace fbp
