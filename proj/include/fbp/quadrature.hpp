#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace fbp {

/// A quadrature rule: sum w_i * f(x_i).
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <class F>
    double apply(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

namespace detail {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix built from the
// three-term recurrence of the orthogonal polynomials, weights come from the
// first eigenvector components scaled by the zeroth moment.
inline QuadRule golub_welsch(const std::vector<double>& alpha,
                             const std::vector<double>& beta_sq, double mu0) {
    const int n = static_cast<int>(alpha.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        J(i, i) = alpha[i];
        if (i + 1 < n) {
            const double b = std::sqrt(beta_sq[i + 1]);
            J(i, i + 1) = b;
            J(i + 1, i) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

inline double ln_gamma(double x) { return std::lgamma(x); }

}  // namespace detail

/// n-point Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on [-1,1].
inline QuadRule gauss_jacobi(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
    if (a <= -1.0 || b <= -1.0) throw std::invalid_argument("gauss_jacobi: exponents must be > -1");

    std::vector<double> alpha(n), beta_sq(n);
    const double apb = a + b;
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            alpha[0] = (b - a) / (apb + 2.0);
        } else {
            const double den = (2.0 * k + apb) * (2.0 * k + apb + 2.0);
            alpha[k] = (b * b - a * a) / den;
        }
        if (k == 1) {
            beta_sq[1] = 4.0 * (a + 1.0) * (b + 1.0) /
                         ((apb + 2.0) * (apb + 2.0) * (apb + 3.0));
        } else if (k >= 2) {
            const double kk = k;
            const double den = (2.0 * kk + apb) * (2.0 * kk + apb) * (2.0 * kk + apb + 1.0) *
                               (2.0 * kk + apb - 1.0);
            beta_sq[k] = 4.0 * kk * (kk + a) * (kk + b) * (kk + apb) / den;
        }
    }
    // mu0 = int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
    const double mu0 = std::exp((apb + 1.0) * std::log(2.0) + detail::ln_gamma(a + 1.0) +
                                detail::ln_gamma(b + 1.0) - detail::ln_gamma(apb + 2.0));
    return detail::golub_welsch(alpha, beta_sq, mu0);
}

/// n-point Gauss-Legendre rule on [-1,1].
inline QuadRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

namespace detail {

inline const QuadRule& cached_rule(int n, double a, double b) {
    using Key = std::tuple<int, long long, long long>;
    static std::map<Key, QuadRule> cache;
    static std::mutex mtx;
    const Key key{n, static_cast<long long>(a * 1024.0), static_cast<long long>(b * 1024.0)};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, gauss_jacobi(n, a, b)).first;
    return it->second;
}

}  // namespace detail

/// Integrates f(s) * (s-a)^{pl} * (b-s)^{pr} over [a,b]; f must be smooth.
/// pl/pr are the endpoint exponents (0 for a regular endpoint, -1/2 for an
/// inverse-square-root one).
template <class F>
double integrate_cell(F&& f, double a, double b, double pl, double pr, int n = 16) {
    if (!(b > a)) return 0.0;
    const QuadRule& rule = detail::cached_rule(n, pr, pl);  // (1-x)<->(b-s), (1+x)<->(s-a)
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    // (s-a) = half*(1+x), (b-s) = half*(1-x), ds = half dx
    const double scale = std::pow(half, 1.0 + pl + pr);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = mid + half * rule.nodes[i];
        acc += rule.weights[i] * f(s);
    }
    return scale * acc;
}

/// Integrates f over [a,b] with the substitution s = a + (b-a) sin^2(theta),
/// which regularises square-root behaviour of f at both endpoints.
template <class F>
double integrate_sinsq(F&& f, double a, double b, int n = 32) {
    if (!(b > a)) return 0.0;
    const QuadRule& rule = detail::cached_rule(n, 0.0, 0.0);
    const double half_pi = std::asin(1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double theta = 0.5 * half_pi * (1.0 + rule.nodes[i]);
        const double st = std::sin(theta), ct = std::cos(theta);
        const double s = a + (b - a) * st * st;
        acc += rule.weights[i] * f(s) * 2.0 * (b - a) * st * ct;
    }
    return 0.5 * half_pi * acc;
}

/// Adaptive Gauss quadrature (bisection with nested 12/24-point estimates).
/// Relative tolerance is measured against the accumulated magnitude.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                          int max_depth = 40) {
    struct Worker {
        const QuadRule& lo;
        const QuadRule& hi;
        double tol;
        int max_depth;

        double gauss(const QuadRule& r, std::function<double(double)> const& g, double x0,
                     double x1) const {
            const double half = 0.5 * (x1 - x0), mid = 0.5 * (x0 + x1);
            double acc = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i)
                acc += r.weights[i] * g(mid + half * r.nodes[i]);
            return half * acc;
        }
        double recurse(std::function<double(double)> const& g, double x0, double x1,
                       double scale, int depth) const {
            const double c = gauss(lo, g, x0, x1);
            const double fine = gauss(hi, g, x0, x1);
            if (depth >= max_depth || std::abs(fine - c) <= tol * std::max(scale, std::abs(fine)))
                return fine;
            const double m = 0.5 * (x0 + x1);
            return recurse(g, x0, m, scale, depth + 1) + recurse(g, m, x1, scale, depth + 1);
        }
    };
    Worker w{detail::cached_rule(12, 0.0, 0.0), detail::cached_rule(24, 0.0, 0.0), rel_tol,
             max_depth};
    std::function<double(double)> g = std::forward<F>(f);
    const double rough = std::abs(w.gauss(w.hi, g, a, b));
    return w.recurse(g, a, b, std::max(rough, 1e-300), 0);
}

}  // namespace fbp
