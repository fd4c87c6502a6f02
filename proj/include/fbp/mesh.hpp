#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fbp {

/// Node grid 0 = t_0 < ... < t_N = horizon, quadratically clustered towards
/// both endpoints (t ~ (i/N)^2 near 0, mirrored near the far end).
inline std::vector<double> graded_mesh(double horizon, int n_cells) {
    if (n_cells < 2) throw std::invalid_argument("graded_mesh: need at least 2 cells");
    std::vector<double> t(n_cells + 1);
    for (int i = 0; i <= n_cells; ++i) {
        const double x = static_cast<double>(i) / n_cells;
        double g;
        if (x <= 0.5)
            g = 2.0 * x * x;
        else
            g = 1.0 - 2.0 * (1.0 - x) * (1.0 - x);
        t[i] = horizon * g;
    }
    t.front() = 0.0;
    t.back() = horizon;
    return t;
}

inline std::vector<double> uniform_mesh(double horizon, int n_cells) {
    std::vector<double> t(n_cells + 1);
    for (int i = 0; i <= n_cells; ++i) t[i] = horizon * static_cast<double>(i) / n_cells;
    return t;
}

inline std::vector<double> midpoints(const std::vector<double>& nodes) {
    std::vector<double> m(nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) m[i] = 0.5 * (nodes[i] + nodes[i + 1]);
    return m;
}

/// Piecewise-linear interpolation through (x_i, y_i); clamps outside the range.
inline double pl_interp(const std::vector<double>& x, const std::vector<double>& y, double s) {
    if (x.empty()) throw std::invalid_argument("pl_interp: empty grid");
    if (s <= x.front()) return y.front();
    if (s >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), s);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double w = (s - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - w) * y[j - 1] + w * y[j];
}

/// Hat function associated with node j of a mesh.
inline double hat(const std::vector<double>& nodes, std::size_t j, double s) {
    const double tc = nodes[j];
    if (s == tc) return 1.0;
    if (s < tc) {
        if (j == 0 || s < nodes[j - 1]) return 0.0;
        return (s - nodes[j - 1]) / (tc - nodes[j - 1]);
    }
    if (j + 1 == nodes.size() || s > nodes[j + 1]) return 0.0;
    return (nodes[j + 1] - s) / (nodes[j + 1] - tc);
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        acc += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return acc;
}

/// Relative L2 distance of two sampled traces over nodes inside [lo, hi],
/// with trapezoid weights. Returns 0 when both restrictions vanish.
inline double rel_l2_error(const std::vector<double>& t, const std::vector<double>& approx,
                           const std::vector<double>& exact, double lo, double hi) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < lo || t[i] > hi) continue;
        double w = 0.0;
        if (i > 0 && t[i - 1] >= lo) w += 0.5 * (t[i] - t[i - 1]);
        if (i + 1 < t.size() && t[i + 1] <= hi) w += 0.5 * (t[i + 1] - t[i]);
        const double d = approx[i] - exact[i];
        num += w * d * d;
        den += w * exact[i] * exact[i];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
    return std::sqrt(num / den);
}

}  // namespace fbp
