#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fbp/dtn_map.hpp"
#include "fbp/mesh.hpp"
#include "fbp/resolvent.hpp"

using namespace fbp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

VolterraProblem traveling_wave_problem(int n_cells, double horizon,
                                       std::shared_ptr<InterfaceCurve>& curve_out) {
    auto curve = std::make_shared<InterfaceCurve>(InterfaceCurve::linear(horizon, n_cells + 1, -1.0));
    auto grid = uniform_mesh(horizon, n_cells);
    const double h = grid[1] - grid[0];
    VolterraProblem p;
    p.grid = grid;
    p.kappa = [curve, h](double t, double s) { return kernel_bounded(*curve, t, s, h / 8.0); };
    auto q0p = [](double x) { return -std::exp(-x); };
    auto g0p = [](double s) { return 2.0 * std::exp(2.0 * s); };
    p.forcing.resize(grid.size());
    p.forcing[0] = kPi * q0p(0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        p.forcing[i] = dtn_forcing(*curve, q0p, g0p, grid[i], grid);
    curve_out = curve;
    return p;
}

}  // namespace

TEST_CASE("zero kernel has a zero resolvent", "[resolvent]") {
    ResolventTable table([](double, double) { return 0.0; }, 1.0);
    REQUIRE(table.value(0.8, 0.3) == 0.0);
    REQUIRE(table.estimate_M() == 0.0);
    REQUIRE(table.series_converged());
}

TEST_CASE("constant kernel iterates hit the Beta identity", "[resolvent]") {
    // kb == M: H2(t,s) = M^2 int_s^t dz / sqrt((t-z)(z-s)) = M^2 pi
    const double M = 0.35;
    ResolventTable table([M](double, double) { return M; }, 1.0);
    REQUIRE_THAT(table.iterate_direct(2, 0.9, 0.2), WithinRel(M * M * kPi, 1e-12));
    // the summed tail dominates its first term for a positive kernel
    REQUIRE(table.value(0.9, 0.2) >= M * M * kPi - 1e-9);

    // H3(t,s) = 2 M^3 pi sqrt(t-s)
    const double h3 = table.iterate_direct(3, 0.9, 0.2);
    REQUIRE_THAT(h3, WithinRel(2.0 * M * M * M * kPi * std::sqrt(0.7), 1e-10));
    // H4(t,s) = M^4 pi^2 (t-s)
    const double h4 = table.iterate_direct(4, 0.9, 0.2);
    REQUIRE_THAT(h4, WithinRel(M * M * M * M * kPi * kPi * 0.7, 1e-9));
}

TEST_CASE("iterated kernels satisfy the Gamma-function bound", "[resolvent]") {
    const double horizon = 0.5;
    auto xi = InterfaceCurve::linear(horizon, 65, -1.0);
    auto kb = [&xi](double t, double s) { return kernel_bounded(xi, t, s, 1e-6) / kPi; };
    ResolventTable table(kb, horizon);
    const double M = table.estimate_M() * (1.0 + 1e-12);

    int checked = 0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double t = horizon * (i + 1) / 10.0;
            const double s = t * (j + 0.5) / 10.5;
            for (int m = 2; m <= 8; ++m) {
                const double h = table.iterate_direct(m, t, s);
                REQUIRE(std::abs(h) <= iterate_bound(m, M, t - s) * (1.0 + 1e-8));
            }
            ++checked;
        }
    }
    REQUIRE(checked == 100);
}

TEST_CASE("resolvent path agrees with the marching path", "[resolvent]") {
    std::shared_ptr<InterfaceCurve> curve;
    VolterraProblem p = traveling_wave_problem(256, 0.5, curve);
    auto f_march = solve_volterra_marching(p);

    auto kb = [curve](double t, double s) { return kernel_bounded(*curve, t, s, 1e-7) / kPi; };
    ResolventTable table(kb, 0.5);
    REQUIRE(table.series_converged());
    auto f_res = solve_via_resolvent(p, table);

    REQUIRE(rel_l2_error(p.grid, f_res, f_march, 0.0, 0.5) <= 1e-3);

    std::vector<double> exact(p.grid.size());
    for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = -std::exp(2.0 * p.grid[i]);
    REQUIRE(rel_l2_error(p.grid, f_res, exact, 0.0, 0.5) <= 1e-3);
}

TEST_CASE("slow series convergence is reported", "[resolvent]") {
    ResolventTable::Options opt;
    opt.max_terms = 6;
    opt.grid_n = 33;
    ResolventTable table([](double, double) { return 4.0; }, 4.0, opt);
    REQUIRE_FALSE(table.series_converged());
}
