#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fbp/dtn_map.hpp"
#include "fbp/fd_heat.hpp"
#include "fbp/mesh.hpp"

using namespace fbp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("unit diffusivity reduces to the plain march", "[dtn]") {
    PhaseLaw law = make_reference_law();  // gamma2 = 1
    const double T = 0.5;
    auto xi = InterfaceCurve::linear(T, 257, -1.0);

    Profile u0{[](double x) { return 2.0 + std::exp(-x); },
               [](double x) { return -std::exp(-x); }};
    Profile g0p{[](double t) { return std::exp(2.0 * t); },
                [](double t) { return 2.0 * std::exp(2.0 * t); }};

    auto wrapped = dtn_stable_side(law, xi, u0, g0p);

    auto grid = xi.times();
    const double h = grid[1] - grid[0];
    VolterraProblem p;
    p.grid = grid;
    p.kappa = [&xi, h](double t, double s) { return kernel_bounded(xi, t, s, h / 8.0); };
    p.forcing.resize(grid.size());
    p.forcing[0] = kPi * u0.derivative(0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        p.forcing[i] = dtn_forcing(xi, u0.derivative, g0p.derivative, grid[i], grid);
    auto direct = solve_volterra_marching(p);

    for (std::size_t i = 0; i < direct.size(); ++i)
        REQUIRE_THAT(wrapped.values[i], WithinAbs(direct[i], 1e-13));
}

TEST_CASE("stable side closed form under time rescaling", "[dtn]") {
    // gamma2 = 4, xi == 0, u0 = c + 1 - e^{-x}, constant boundary data:
    // f+(t) = N2(4t)/pi = e^{4t} erfc(2 sqrt t)
    PhaseLaw law = make_reference_law();
    law.gamma2 = 4.0;
    law.delta2 = -4.0;  // keeps A = gamma2 c + delta2 = 0
    law.validate();

    auto xi = InterfaceCurve::constant(0.5, 257);
    Profile u0{[&law](double x) { return law.c + 1.0 - std::exp(-x); },
               [](double x) { return std::exp(-x); }};
    Profile g0c = constant_profile(law.c + 1.0);

    auto flux = dtn_stable_side(law, xi, u0, g0c);
    for (std::size_t i = 1; i < flux.times.size(); i += 16) {
        const double t = flux.times[i];
        const double exact = std::exp(4.0 * t) * std::erfc(2.0 * std::sqrt(t));
        REQUIRE_THAT(flux.values[i], WithinRel(exact, 1e-6));
    }
}

TEST_CASE("zero-derivative data produce zero flux on both sides", "[dtn]") {
    PhaseLaw law = make_reference_law();
    auto xi = InterfaceCurve::linear(0.5, 65, -0.25);
    Profile cu0 = constant_profile(law.c + 0.5);
    Profile cuT = constant_profile(0.5);
    Profile cg = constant_profile(law.c + 0.5);
    Profile cgm = constant_profile(0.5);

    auto fp = dtn_stable_side(law, xi, cu0, cg);
    auto fm = dtn_unstable_side(law, xi, cuT, cgm);
    for (double v : fp.values) REQUIRE_THAT(v, WithinAbs(0.0, 1e-14));
    for (double v : fm.values) REQUIRE_THAT(v, WithinAbs(0.0, 1e-14));
}

TEST_CASE("unstable side equals the reflected stable solve", "[dtn]") {
    // |gamma0| = gamma2 = 1: the reversed/reflected problem is literally a
    // stable-side problem on the mirrored data
    PhaseLaw law = make_reference_law();
    const double T = 0.5;
    const int n = 129;
    auto xi = InterfaceCurve::linear(T, n, -0.4);
    const double K = xi.terminal();

    Profile uT{[](double x) { return 0.5 + 0.2 * std::exp(0.8 * x); },
               [](double x) { return 0.16 * std::exp(0.8 * x); }};
    Profile g0m{[](double t) { return 0.5 + 0.05 * std::sin(t); },
                [](double t) { return 0.05 * std::cos(t); }};

    auto direct = dtn_unstable_side(law, xi, uT, g0m);

    auto mirrored_curve = InterfaceCurve(
        xi.times(), [&xi, K, T](double tau) { return K - xi(T - tau); },
        [&xi, T](double tau) { return xi.derivative(T - tau); }, "mirror");
    Profile u0_m{[&uT, K](double y) { return uT(K - y); },
                 [&uT, K](double y) { return -uT.derivative(K - y); }};
    Profile g0_m{[&g0m, T](double tau) { return g0m(T - tau); },
                 [&g0m, T](double tau) { return -g0m.derivative(T - tau); }};
    auto reflected = dtn_stable_side(law, mirrored_curve, u0_m, g0_m);

    for (std::size_t i = 0; i < direct.values.size(); ++i) {
        const double expect = -reflected.values[direct.values.size() - 1 - i];
        REQUIRE_THAT(direct.values[i], WithinAbs(expect, 1e-10));
    }
}

TEST_CASE("manufactured backward solution flux", "[dtn]") {
    // u-(x,t) = 0.5 + 0.2 e^{x - t} solves u_t = -u_xx on x < 0 and stays in
    // the unstable band (b,c) = (0,1); exact flux trace 0.2 e^{-t}
    PhaseLaw law = make_reference_law();  // gamma0 = -1
    const double T = 0.5;
    auto xi = InterfaceCurve::constant(T, 513);

    Profile uT{[T](double x) { return 0.5 + 0.2 * std::exp(x - T); },
               [T](double x) { return 0.2 * std::exp(x - T); }};
    Profile g0m{[](double t) { return 0.5 + 0.2 * std::exp(-t); },
                [](double t) { return -0.2 * std::exp(-t); }};

    auto flux = dtn_unstable_side(law, xi, uT, g0m);
    std::vector<double> exact(flux.times.size());
    for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = 0.2 * std::exp(-flux.times[i]);
    REQUIRE(rel_l2_error(flux.times, flux.values, exact, 0.0, T) <= 1e-3);
}

TEST_CASE("stable flux cross-checks against the FD oracle", "[dtn]") {
    // non-analytic configuration: quadratic interface, exponential data
    PhaseLaw law = make_reference_law();
    const double T = 0.5;
    auto xi = InterfaceCurve::quadratic(T, 257, 0.5);

    Profile u0{[&law](double x) { return law.c + 1.0 - 0.5 * std::exp(-x); },
               [](double x) { return 0.5 * std::exp(-x); }};
    // corner compatible: g(0) = u0(0)
    Profile g0p{[&law](double t) { return law.c + 0.5 + 0.3 * t; },
                [](double) { return 0.3; }};

    auto volterra_flux = dtn_stable_side(law, xi, u0, g0p);

    FdGrid grid{0.0, 2048, 2048};
    auto fd = fd_heat_solve_moving(
        law.gamma2, xi, [&g0p](double t) { return g0p(t); }, [&u0](double y) { return u0(y); },
        grid);
    std::vector<double> fd_on_nodes(volterra_flux.times.size());
    for (std::size_t i = 0; i < fd_on_nodes.size(); ++i)
        fd_on_nodes[i] = pl_interp(fd.times, fd.flux, volterra_flux.times[i]);

    REQUIRE(rel_l2_error(volterra_flux.times, volterra_flux.values, fd_on_nodes, 0.1 * T,
                         0.9 * T) <= 0.02);
}
