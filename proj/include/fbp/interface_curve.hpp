#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbp/mesh.hpp"
#include "fbp/phase_law.hpp"

namespace fbp {

/*
 * The interface curve xi : [0,T] -> (-inf, 0], xi(0) = 0, xi(T) = K <= 0,
 * sampled on a node grid together with its derivative. Admissible curves are
 * nonincreasing; the derivative is assumed Holder continuous of exponent
 * beta > 1/2, which the constructor probes empirically (reported, not proved).
 */
class InterfaceCurve {
  public:
    InterfaceCurve() = default;

    InterfaceCurve(std::vector<double> times, std::function<double(double)> value,
                   std::function<double(double)> derivative, std::string family = "custom")
        : times_(std::move(times)),
          value_(std::move(value)),
          derivative_(std::move(derivative)),
          family_(std::move(family)) {
        check_invariants();
    }

    /// Node-array form: cubic-Hermite (monotone) reconstruction between nodes.
    static InterfaceCurve from_nodes(std::vector<double> times, std::vector<double> values);

    static InterfaceCurve constant(double horizon, int n_nodes) {
        return InterfaceCurve(uniform_mesh(horizon, n_nodes - 1), [](double) { return 0.0; },
                              [](double) { return 0.0; }, "constant");
    }
    static InterfaceCurve linear(double horizon, int n_nodes, double slope) {
        if (slope > 0.0) throw ValidationError("interface slope must be <= 0");
        return InterfaceCurve(uniform_mesh(horizon, n_nodes - 1),
                              [slope](double t) { return slope * t; },
                              [slope](double) { return slope; }, "linear");
    }
    static InterfaceCurve quadratic(double horizon, int n_nodes, double a) {
        if (a < 0.0) throw ValidationError("quadratic coefficient must be >= 0");
        return InterfaceCurve(uniform_mesh(horizon, n_nodes - 1),
                              [a](double t) { return -a * t * t; },
                              [a](double t) { return -2.0 * a * t; }, "quadratic");
    }

    double operator()(double t) const { return value_(t); }
    double derivative(double t) const { return derivative_(t); }
    const std::vector<double>& times() const { return times_; }
    double horizon() const { return times_.back(); }
    double terminal() const { return value_(times_.back()); }  // K
    const std::string& family() const { return family_; }

    /// max over node pairs of |xi'(t)-xi'(s)|/|t-s|^{1/2}; finite values back
    /// the beta > 1/2 regularity assumption.
    double holder_half_quotient() const {
        double q = 0.0;
        for (std::size_t i = 0; i < times_.size(); ++i) {
            const double di = derivative_(times_[i]);
            for (std::size_t j = i + 1; j < times_.size(); ++j) {
                const double dj = derivative_(times_[j]);
                const double dt = times_[j] - times_[i];
                if (dt > 0.0) q = std::max(q, std::abs(dj - di) / std::sqrt(dt));
            }
        }
        return q;
    }

    std::function<double(double)> value_fn() const { return value_; }
    std::function<double(double)> derivative_fn() const { return derivative_; }

    double max_derivative() const {
        double m = 0.0;
        for (double t : times_) m = std::max(m, std::abs(derivative_(t)));
        return m;
    }

    bool is_stationary() const {
        for (double t : times_)
            if (std::abs(value_(t)) > 0.0 || std::abs(derivative_(t)) > 0.0) return false;
        return true;
    }

  private:
    void check_invariants() const {
        if (times_.size() < 2) throw ValidationError("interface: need at least 2 nodes");
        for (std::size_t i = 0; i + 1 < times_.size(); ++i)
            if (!(times_[i + 1] > times_[i]))
                throw ValidationError("interface: node times must increase");
        if (std::abs(times_.front()) > 0.0) throw ValidationError("interface: grid must start at 0");
        if (std::abs(value_(0.0)) > 1e-12) throw ValidationError("interface: xi(0) must be 0");
        if (value_(horizon()) > 1e-12) throw ValidationError("interface: xi(T) must be <= 0");
        for (double t : times_)
            if (derivative_(t) > 1e-10)
                throw ValidationError("interface: xi' must be <= 0 at every node (violated at t=" +
                                      std::to_string(t) + ")");
    }

    std::vector<double> times_;
    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
    std::string family_;
};

namespace detail {

// Fritsch-Carlson monotone cubic Hermite slopes.
inline std::vector<double> pchip_slopes(const std::vector<double>& x,
                                        const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
            const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    return d;
}

struct HermiteTable {
    std::vector<double> x, y, d;

    double value(double s) const {
        if (s <= x.front()) return y.front();
        if (s >= x.back()) return y.back();
        auto it = std::upper_bound(x.begin(), x.end(), s);
        const std::size_t j = static_cast<std::size_t>(it - x.begin()) - 1;
        const double h = x[j + 1] - x[j], u = (s - x[j]) / h;
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        return h00 * y[j] + h * h10 * d[j] + h01 * y[j + 1] + h * h11 * d[j + 1];
    }
    double deriv(double s) const {
        if (s <= x.front()) return d.front();
        if (s >= x.back()) return d.back();
        auto it = std::upper_bound(x.begin(), x.end(), s);
        const std::size_t j = static_cast<std::size_t>(it - x.begin()) - 1;
        const double h = x[j + 1] - x[j], u = (s - x[j]) / h;
        const double g00 = 6 * u * (u - 1) / h, g10 = (1 - u) * (1 - 3 * u);
        const double g01 = -6 * u * (u - 1) / h, g11 = u * (3 * u - 2);
        return g00 * y[j] + g10 * d[j] + g01 * y[j + 1] + g11 * d[j + 1];
    }
};

}  // namespace detail

inline InterfaceCurve InterfaceCurve::from_nodes(std::vector<double> times,
                                                 std::vector<double> values) {
    if (times.size() != values.size()) throw ValidationError("interface: size mismatch");
    auto table = std::make_shared<detail::HermiteTable>();
    table->x = times;
    table->y = values;
    table->d = detail::pchip_slopes(times, values);
    return InterfaceCurve(std::move(times), [table](double t) { return table->value(t); },
                          [table](double t) { return table->deriv(t); }, "spline");
}

/// Forward-rescaled curve tau -> xi(tau / gamma2) living on [0, gamma2 T].
inline InterfaceCurve forward_rescaled(const InterfaceCurve& xi, double gamma2,
                                       const std::vector<double>& tau_grid) {
    auto val = xi.value_fn();
    auto der = xi.derivative_fn();
    return InterfaceCurve(
        tau_grid, [val, gamma2](double tau) { return val(tau / gamma2); },
        [der, gamma2](double tau) { return der(tau / gamma2) / gamma2; },
        xi.family() + "/forward-rescaled");
}

/// Reversed and reflected curve tau -> K - xi(T - tau/|gamma0|) on [0,|gamma0| T].
inline InterfaceCurve reversed_reflected(const InterfaceCurve& xi, double abs_gamma0,
                                         const std::vector<double>& tau_grid) {
    const double T = xi.horizon();
    const double K = xi.terminal();
    auto val = xi.value_fn();
    auto der = xi.derivative_fn();
    return InterfaceCurve(
        tau_grid, [val, abs_gamma0, T, K](double tau) { return K - val(T - tau / abs_gamma0); },
        [der, abs_gamma0, T](double tau) { return der(T - tau / abs_gamma0) / abs_gamma0; },
        xi.family() + "/reversed-reflected");
}

}  // namespace fbp
