#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbp/interface_curve.hpp"
#include "fbp/phase_law.hpp"

namespace fbp {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scalar profile with an evaluable derivative; the carrier of initial/final
/// data on a half line.
struct Profile {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::string family = "custom";

    double operator()(double x) const { return value(x); }
};

/// base + amp * exp(-rate |x - x0|) decaying away from x0 along direction dir.
inline Profile exp_profile(double base, double amp, double rate, double x0 = 0.0,
                           int dir = +1) {
    if (rate <= 0.0) throw ValidationError("exp_profile: rate must be positive");
    return Profile{
        [=](double x) { return base + amp * std::exp(-rate * dir * (x - x0)); },
        [=](double x) { return -amp * rate * dir * std::exp(-rate * dir * (x - x0)); },
        "exp"};
}

inline Profile constant_profile(double v) {
    return Profile{[v](double) { return v; }, [](double) { return 0.0; }, "constant"};
}

/// base + amp * exp(-(x-x0)^2 / width^2)
inline Profile gaussian_profile(double base, double amp, double width, double x0 = 0.0) {
    if (width <= 0.0) throw ValidationError("gaussian_profile: width must be positive");
    return Profile{[=](double x) {
                       const double z = (x - x0) / width;
                       return base + amp * std::exp(-z * z);
                   },
                   [=](double x) {
                       const double z = (x - x0) / width;
                       return -2.0 * amp * z / width * std::exp(-z * z);
                   },
                   "gaussian"};
}

/// Sampled profile with monotone cubic reconstruction.
inline Profile sampled_profile(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("sampled_profile: bad sizes");
    auto table = std::make_shared<detail::HermiteTable>();
    table->x = std::move(x);
    table->y = std::move(y);
    table->d = detail::pchip_slopes(table->x, table->y);
    return Profile{[table](double s) { return table->value(s); },
                   [table](double s) { return table->deriv(s); }, "samples"};
}

/*
 * Initial datum u0 on [0, inf) for the stable region and final datum uT on
 * (-inf, K] for the unstable region. The stable side must stay strictly
 * above c, the unstable side strictly inside (b, c); the derivatives must be
 * absolutely integrable with bounded second differences (all probed by
 * sampling, reported through validate()).
 */
struct SideData {
    Profile u0;  // on x >= 0
    Profile uT;  // on x <= K

    void validate(const PhaseLaw& law, double terminal_K, double probe_span = 80.0) const {
        // phase confinement
        for (int i = 0; i <= 400; ++i) {
            const double x = probe_span * i / 400.0;
            if (!(u0(x) > law.c))
                throw DataError("u0 must stay strictly above c (violated at x=" +
                                std::to_string(x) + ")");
            const double xm = terminal_K - x;
            const double v = uT(xm);
            if (!(v < law.c) || !(v > law.b))
                throw DataError("uT must stay strictly inside (b, c) (violated at x=" +
                                std::to_string(xm) + ")");
        }
        check_l1_tail([&](double x) { return u0.derivative(x); }, 0.0, +1.0, "u0'");
        check_l1_tail([&](double x) { return uT.derivative(x); }, terminal_K, -1.0, "uT'");
    }

  private:
    // Integrable-tail probe: window integrals of |f'| over doubling windows
    // must not grow. A diverging sweep marks the datum as unusable.
    template <class F>
    static void check_l1_tail(F&& deriv, double origin, double dir, const char* name) {
        double prev = 1e300;
        double total = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double a = (k == 0) ? 0.0 : std::pow(2.0, k + 1);
            const double b = std::pow(2.0, k + 2);
            double acc = 0.0;
            const int n = 64;
            for (int i = 0; i < n; ++i) {
                const double x = origin + dir * (a + (b - a) * (i + 0.5) / n);
                acc += std::abs(deriv(x)) * (b - a) / n;
            }
            total += acc;
            if (k >= 4 && acc > prev * 1.5 && acc > 1e-8)
                throw DataError(std::string(name) + " tail does not look integrable");
            prev = std::max(acc, 1e-300);
        }
        (void)total;
    }
};

}  // namespace fbp
