#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fbp/mesh.hpp"
#include "fbp/quadrature.hpp"
#include "fbp/volterra.hpp"

namespace fbp {

/*
 * Generalized two-sided Abel equation of the first kind,
 *
 *   c1 int_0^t k1(t,s) m'(s) (t-s)^{-1/2} ds
 * + c2 int_t^T k2(t,s) m'(s) (s-t)^{-1/2} ds
 * + int_0^T R(t,s) m'(s) ds  =  h(t),
 *
 * with unit-diagonal kernels k1, k2 (k_i(t,t) = 1), coefficients
 * c1 = 1/sqrt(gamma2), c2 = -1/sqrt(|gamma0|), and a regular kernel R whose
 * diagonal singularity is strictly weaker than |t-s|^{-1/2}.
 *
 * Discretization: collocation at cell midpoints of a node mesh graded
 * quadratically towards both endpoints; the unknown is represented as
 *
 *   m'(s) = psi*(s) / sqrt(s (T-s)) + p0 + p1 s/T,
 *
 * psi* piecewise linear on the mesh. The endpoint-weighted part matches the
 * natural solution class (square-root endpoint singularities allowed); the
 * affine part makes smooth low-order densities exactly representable.
 */
struct AbelSystem {
    double horizon = 1.0;
    double coeff_lower = 1.0;   // multiplies the int_0^t term
    double coeff_upper = -1.0;  // multiplies the int_t^T term
    std::function<double(double, double)> k1hat;    // s < t, unit diagonal
    std::function<double(double, double)> k2hat;    // s > t, unit diagonal
    std::function<double(double, double)> regular;  // R(t,s), may be empty
    bool has_regular = false;
    std::vector<double> nodes;        // basis mesh, nodes.front()=0, back()=T
    std::vector<double> collocation;  // cell midpoints
    std::vector<double> h;            // forcing at collocation points (optional)
};

/// Pure dominant operator (k1 = k2 = 1, no regular part).
inline AbelSystem dominant_system(double c_lower, double c_upper, double horizon, int n_cells) {
    AbelSystem sys;
    sys.horizon = horizon;
    sys.coeff_lower = c_lower;
    sys.coeff_upper = c_upper;
    sys.k1hat = [](double, double) { return 1.0; };
    sys.k2hat = [](double, double) { return 1.0; };
    sys.has_regular = false;
    sys.nodes = graded_mesh(horizon, n_cells);
    sys.collocation = midpoints(sys.nodes);
    return sys;
}

struct WeightedDensity {
    std::vector<double> nodes;
    std::vector<double> psi_star;  // nodal values of psi*
    double affine0 = 0.0;          // unweighted part p(s) = affine0 + affine1 s/T
    double affine1 = 0.0;
    double horizon = 1.0;

    /// m'(s); finite everywhere in (0,T), endpoint weights integrable.
    double value(double s) const {
        const double w = s * (horizon - s);
        double out = affine0 + affine1 * s / horizon;
        if (w > 0.0) out += pl_interp(nodes, psi_star, s) / std::sqrt(w);
        return out;
    }

    /// int_0^T m'(s) ds, cell-exact against the endpoint weight.
    double integral() const {
        double acc = affine0 * horizon + 0.5 * affine1 * horizon;
        for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
            const double a = nodes[c], b = nodes[c + 1];
            const double pl = (a <= 0.0) ? -0.5 : 0.0;
            const double pr = (b >= horizon) ? -0.5 : 0.0;
            acc += integrate_cell(
                [&](double s) {
                    double f = pl_interp(nodes, psi_star, s);
                    double w = s * (horizon - s);
                    if (pl < 0.0) w /= s;           // s-factor moved into the rule
                    if (pr < 0.0) w /= (horizon - s);
                    return f / std::sqrt(w);
                },
                a, b, pl, pr, 12);
        }
        return acc;
    }

    /// m(t) = m0 + int_0^t m'; sampled on the node grid.
    std::vector<double> cumulative(double m0) const {
        std::vector<double> m(nodes.size(), m0);
        for (std::size_t c = 0; c + 1 < nodes.size(); ++c) {
            const double a = nodes[c], b = nodes[c + 1];
            const double pl = (a <= 0.0) ? -0.5 : 0.0;
            const double pr = (b >= horizon) ? -0.5 : 0.0;
            const double inc =
                integrate_cell(
                    [&](double s) {
                        double f = pl_interp(nodes, psi_star, s);
                        double w = s * (horizon - s);
                        if (pl < 0.0) w /= s;
                        if (pr < 0.0) w /= (horizon - s);
                        return f / std::sqrt(w);
                    },
                    a, b, pl, pr, 12) +
                integrate_cell([&](double s) { return affine0 + affine1 * s / horizon; }, a, b,
                               0.0, 0.0, 4);
            m[c + 1] = m[c] + inc;
        }
        return m;
    }
};

struct SolveReport {
    double residual_rel = 0.0;
    double condition = 0.0;
    int near_null_count = 0;
    std::vector<double> null_defects;  // |sum_i h(t_i) psi_j(t_i) w_i| per near-null vector
    double lambda_used = 0.0;
    double sigma_max = 0.0;
    double sigma_min = 0.0;
};

namespace detail {

struct CellPiece {
    double a, b;
    bool lower;  // entirely below the collocation point
};

/// Kernel part of the integrand at collocation point t (without basis factor).
template <class Sys>
double kernel_value(const Sys& sys, double t, double s, bool lower) {
    double v = 0.0;
    if (lower)
        v += sys.coeff_lower * sys.k1hat(t, s) / std::sqrt(t - s);
    else
        v += sys.coeff_upper * sys.k2hat(t, s) / std::sqrt(s - t);
    if (sys.has_regular) v += sys.regular(t, s);
    return v;
}

}  // namespace detail

/// Dense collocation matrix; columns are the N+1 hat coefficients of psi*
/// followed by the two affine coefficients.
inline Eigen::MatrixXd collocation_matrix(const AbelSystem& sys, int quad_n = 16) {
    const std::size_t n_rows = sys.collocation.size();
    const std::size_t n_nodes = sys.nodes.size();
    const double T = sys.horizon;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_rows, n_nodes + 2);

    for (std::size_t r = 0; r < n_rows; ++r) {
        const double t = sys.collocation[r];
        for (std::size_t c = 0; c + 1 < n_nodes; ++c) {
            const double a = sys.nodes[c], b = sys.nodes[c + 1];
            std::vector<detail::CellPiece> pieces;
            if (b <= t)
                pieces.push_back({a, b, true});
            else if (a >= t)
                pieces.push_back({a, b, false});
            else {
                pieces.push_back({a, t, true});
                pieces.push_back({t, b, false});
            }
            for (const auto& piece : pieces) {
                // active -1/2 factors at the piece endpoints
                const bool sing_left = (piece.a == 0.0) || (piece.a == t && !piece.lower);
                const bool sing_right = (piece.b == T) || (piece.b == t && piece.lower);
                const double pl = sing_left ? -0.5 : 0.0;
                const double pr = sing_right ? -0.5 : 0.0;
                const QuadRule& rule = detail::cached_rule(quad_n, pr, pl);
                const double half = 0.5 * (piece.b - piece.a);
                const double mid = 0.5 * (piece.a + piece.b);
                const double scale = std::pow(half, 1.0 + pl + pr);

                for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                    const double s = mid + half * rule.nodes[q];
                    double ker = detail::kernel_value(sys, t, s, piece.lower);
                    // fold the inactive portions of the singular factors back in
                    double reg = 1.0;
                    if (sing_left) reg *= std::sqrt(s - piece.a);
                    if (sing_right) reg *= std::sqrt(piece.b - s);
                    const double base = rule.weights[q] * scale * ker * reg;

                    // weighted hat columns
                    const double w = 1.0 / std::sqrt(s * (T - s));
                    const double lam = (s - a) / (b - a);
                    A(r, c) += base * w * (1.0 - lam);
                    A(r, c + 1) += base * w * lam;
                    // affine columns
                    A(r, n_nodes) += base;
                    A(r, n_nodes + 1) += base * (s / T);
                }
            }
        }
    }
    return A;
}

/// Trapezoid-type weights attached to the collocation points (cell widths).
inline std::vector<double> collocation_weights(const AbelSystem& sys) {
    std::vector<double> w(sys.collocation.size());
    for (std::size_t c = 0; c + 1 < sys.nodes.size(); ++c) w[c] = sys.nodes[c + 1] - sys.nodes[c];
    return w;
}

namespace detail {

struct SvdSolve {
    Eigen::BDCSVD<Eigen::MatrixXd> svd;
    explicit SvdSolve(const Eigen::MatrixXd& A)
        : svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV) {}

    double sigma_max() const { return svd.singularValues()(0); }
    double sigma_min() const {
        return svd.singularValues()(svd.singularValues().size() - 1);
    }
    Eigen::VectorXd tikhonov(const Eigen::VectorXd& rhs, double lambda) const {
        const auto& sv = svd.singularValues();
        Eigen::VectorXd beta = svd.matrixU().transpose() * rhs;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            beta(i) *= sv(i) / (sv(i) * sv(i) + lambda);
        return svd.matrixV() * beta;
    }
};

}  // namespace detail

struct AbelSolveOptions {
    double lambda = -1.0;  // <0: automatic 1e-10 sigma_max^2
    int quad_n = 16;
    double null_tol = 1e-8;       // sigma < tol * sigma_max counts as near-null
    double cond_limit = 1e14;     // advisory threshold for unregularized solves
};

/// Least-squares collocation solve with Tikhonov filtering; fills the report.
inline WeightedDensity solve_full(const AbelSystem& sys, const std::vector<double>& rhs,
                                  const AbelSolveOptions& opt, SolveReport& report) {
    if (rhs.size() != sys.collocation.size())
        throw ValidationError("abel solve: rhs size mismatch");
    const Eigen::MatrixXd A = collocation_matrix(sys, opt.quad_n);
    detail::SvdSolve svd(A);

    const double smax = svd.sigma_max();
    const double smin = svd.sigma_min();
    const double cond = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    double lambda = opt.lambda;
    if (lambda < 0.0) lambda = 1e-10 * smax * smax;
    if (lambda == 0.0 && cond > opt.cond_limit)
        throw NumericsError("abel solve: collocation matrix condition " + std::to_string(cond) +
                            " requires regularization (pass lambda > 0)");

    Eigen::VectorXd b(rhs.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) b(i) = rhs[i];
    const Eigen::VectorXd x = svd.tikhonov(b, lambda);

    WeightedDensity density;
    density.nodes = sys.nodes;
    density.horizon = sys.horizon;
    density.psi_star.assign(sys.nodes.size(), 0.0);
    for (std::size_t j = 0; j < sys.nodes.size(); ++j) density.psi_star[j] = x(j);
    density.affine0 = x(sys.nodes.size());
    density.affine1 = x(sys.nodes.size() + 1);

    const Eigen::VectorXd res = A * x - b;
    const double bn = b.norm();
    report.residual_rel = (bn > 0.0) ? res.norm() / bn : res.norm();
    report.condition = cond;
    report.sigma_max = smax;
    report.sigma_min = smin;
    report.lambda_used = lambda;
    report.near_null_count = 0;
    report.null_defects.clear();
    const auto weights = collocation_weights(sys);
    const auto& sv = svd.svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) < opt.null_tol * smax) {
            ++report.near_null_count;
            double defect = 0.0;
            for (std::size_t k = 0; k < rhs.size(); ++k)
                defect += rhs[k] * svd.svd.matrixU()(k, i) * weights[k];
            report.null_defects.push_back(std::abs(defect));
        }
    }
    return density;
}

inline WeightedDensity solve_full(const AbelSystem& sys, const std::vector<double>& rhs,
                                  double lambda, SolveReport& report) {
    AbelSolveOptions opt;
    opt.lambda = lambda;
    return solve_full(sys, rhs, opt, report);
}

/// Dominant-equation solve (no regular kernel, unit k-hats), minimal ridge.
inline WeightedDensity solve_dominant(const AbelSystem& sys, const std::vector<double>& rhs,
                                      SolveReport* report = nullptr) {
    if (sys.has_regular) throw ValidationError("solve_dominant expects a dominant system");
    SolveReport local;
    AbelSolveOptions opt;
    opt.lambda = -1.0;
    WeightedDensity d = solve_full(sys, rhs, opt, local);
    if (local.sigma_min <= 0.0)
        throw NumericsError("solve_dominant: rank-deficient collocation matrix, condition " +
                            std::to_string(local.condition));
    if (report) *report = local;
    return d;
}

/// Spectrum diagnostics without solving.
inline SolveReport probe_null_space(const AbelSystem& sys, const AbelSolveOptions& opt = {}) {
    const Eigen::MatrixXd A = collocation_matrix(sys, opt.quad_n);
    detail::SvdSolve svd(A);
    SolveReport report;
    report.sigma_max = svd.sigma_max();
    report.sigma_min = svd.sigma_min();
    report.condition =
        report.sigma_min > 0.0 ? report.sigma_max / report.sigma_min
                               : std::numeric_limits<double>::infinity();
    const auto weights = collocation_weights(sys);
    const auto& sv = svd.svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) < opt.null_tol * report.sigma_max) {
            ++report.near_null_count;
            if (!sys.h.empty()) {
                double defect = 0.0;
                for (std::size_t k = 0; k < sys.h.size(); ++k)
                    defect += sys.h[k] * svd.svd.matrixU()(k, i) * weights[k];
                report.null_defects.push_back(std::abs(defect));
            }
        }
    }
    return report;
}

/// Forward application through the collocation matrix.
inline std::vector<double> apply_operator(const AbelSystem& sys, const WeightedDensity& d,
                                          int quad_n = 16) {
    const Eigen::MatrixXd A = collocation_matrix(sys, quad_n);
    Eigen::VectorXd x(sys.nodes.size() + 2);
    for (std::size_t j = 0; j < sys.nodes.size(); ++j) x(j) = d.psi_star[j];
    x(sys.nodes.size()) = d.affine0;
    x(sys.nodes.size() + 1) = d.affine1;
    const Eigen::VectorXd y = A * x;
    return std::vector<double>(y.data(), y.data() + y.size());
}

/*
 * Independent forward evaluation at a single point: the operator applied to
 * an arbitrary density functor with its own (much finer, graded) cell
 * decomposition. Used as the quadrature oracle against the matrix path.
 */
inline double apply_operator_direct(const AbelSystem& sys,
                                    const std::function<double(double)>& mprime, double t,
                                    int fine_cells = 1024, int quad_n = 20) {
    const double T = sys.horizon;
    auto lower_mesh = graded_mesh(t, fine_cells);
    std::vector<double> upper_mesh = graded_mesh(T - t, fine_cells);
    for (double& s : upper_mesh) s += t;

    // Endpoint -1/2 powers are pulled into the rule and divided back out of
    // the integrand; this is exact when m' itself carries the endpoint weight
    // and harmless when it is smooth there.
    auto piece = [&](double a, double b, bool lower) {
        const bool w_left = (a == 0.0);                    // density weight at s=0
        const bool w_right = (b == T);                     // density weight at s=T
        const bool abel_left = (!lower && a == t);
        const bool abel_right = (lower && b == t);
        const double pl = (w_left || abel_left) ? -0.5 : 0.0;
        const double pr = (w_right || abel_right) ? -0.5 : 0.0;
        return integrate_cell(
            [&](double s) {
                double v = lower ? sys.coeff_lower * sys.k1hat(t, s)
                                 : sys.coeff_upper * sys.k2hat(t, s);
                v *= mprime(s);
                if (sys.has_regular) {
                    double r = sys.regular(t, s) * mprime(s);
                    v += lower ? r * std::sqrt(t - s) : r * std::sqrt(s - t);
                }
                if (lower && !abel_right) v /= std::sqrt(t - s);
                if (!lower && !abel_left) v /= std::sqrt(s - t);
                if (pl < 0.0) v *= std::sqrt(s - a);
                if (pr < 0.0) v *= std::sqrt(b - s);
                return v;
            },
            a, b, pl, pr, quad_n);
    };

    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < lower_mesh.size(); ++c)
        acc += piece(lower_mesh[c], lower_mesh[c + 1], true);
    for (std::size_t c = 0; c + 1 < upper_mesh.size(); ++c)
        acc += piece(upper_mesh[c], upper_mesh[c + 1], false);
    return acc;
}

}  // namespace fbp
