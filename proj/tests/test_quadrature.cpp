#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fbp/mesh.hpp"
#include "fbp/quadrature.hpp"

using namespace fbp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss-Legendre integrates polynomials exactly", "[quadrature]") {
    auto rule = gauss_legendre(8);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * std::pow(rule.nodes[i], 14);
    REQUIRE_THAT(acc, WithinRel(2.0 / 15.0, 1e-13));  // int_{-1}^1 x^14 dx
}

TEST_CASE("Gauss-Jacobi reproduces Beta moments", "[quadrature]") {
    // int_{-1}^{1} (1-x)^{-1/2} (1+x)^{-1/2} dx = pi
    auto cheb = gauss_jacobi(6, -0.5, -0.5);
    double total = 0.0;
    for (double w : cheb.weights) total += w;
    REQUIRE_THAT(total, WithinRel(M_PI, 1e-13));

    // int_{-1}^{1} (1+x)^{-1/2} dx = 2 sqrt 2
    auto left = gauss_jacobi(6, 0.0, -0.5);
    total = 0.0;
    for (double w : left.weights) total += w;
    REQUIRE_THAT(total, WithinRel(2.0 * std::sqrt(2.0), 1e-13));
}

TEST_CASE("integrate_cell handles endpoint singularities", "[quadrature]") {
    // int_0^1 s^{-1/2} (1-s)^{-1/2} ds = B(1/2,1/2) = pi
    const double beta_half = integrate_cell([](double) { return 1.0; }, 0.0, 1.0, -0.5, -0.5);
    REQUIRE_THAT(beta_half, WithinRel(M_PI, 1e-13));

    // int_0^t sqrt(s) / sqrt(t-s) ds = (pi/2) t  (Beta(3/2,1/2))
    const double t = 0.7;
    const double val = integrate_cell([](double) { return 1.0; }, 0.0, t, +0.5, -0.5, 20);
    REQUIRE_THAT(val, WithinRel(0.5 * M_PI * t, 1e-12));
}

TEST_CASE("sin^2 substitution integrates sqrt endpoints accurately", "[quadrature]") {
    // int_0^1 sqrt(s(1-s)) ds = pi/8
    const double v = integrate_sinsq([](double s) { return std::sqrt(s * (1.0 - s)); }, 0.0, 1.0, 32);
    REQUIRE_THAT(v, WithinRel(M_PI / 8.0, 1e-12));
}

TEST_CASE("adaptive quadrature hits tight tolerances", "[quadrature]") {
    const double v = integrate_adaptive([](double s) { return std::exp(-s) * std::cos(5 * s); },
                                        0.0, 3.0, 1e-12);
    // antiderivative of e^{-s} cos(5 s): e^{-s}(5 sin 5s - cos 5s)/26
    auto F = [](double s) { return std::exp(-s) * (5 * std::sin(5 * s) - std::cos(5 * s)) / 26.0; };
    REQUIRE_THAT(v, WithinAbs(F(3.0) - F(0.0), 1e-11));
}

TEST_CASE("graded mesh clusters both endpoints", "[quadrature]") {
    auto t = graded_mesh(2.0, 64);
    REQUIRE(t.front() == 0.0);
    REQUIRE(t.back() == 2.0);
    REQUIRE(t[1] - t[0] < (t[33] - t[32]) / 4.0);
    REQUIRE(t[64] - t[63] < (t[33] - t[32]) / 4.0);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) REQUIRE(t[i + 1] > t[i]);
}

TEST_CASE("hat functions form a partition of unity", "[quadrature]") {
    auto nodes = graded_mesh(1.0, 16);
    for (double s : {0.01, 0.3, 0.77, 0.999}) {
        double total = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) total += hat(nodes, j, s);
        REQUIRE_THAT(total, WithinAbs(1.0, 1e-13));
    }
}
