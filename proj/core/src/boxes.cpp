#include "itdflex/envelope/boxes.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "itdflex/errors.hpp"

namespace itdflex {

namespace {

constexpr double kGapTol = 1e-9;      // target complementarity 1/t
constexpr double kTFactor = 20.0;
constexpr int kMaxNewton = 200;

// reject polytopes with a free coordinate direction before running the solver
void check_boundedness(const FlexPolytope& poly) {
    for (int i = 0; i < poly.n_ess; ++i) {
        bool bounded_above = false, bounded_below = false;
        for (int r = 0; r < poly.n_rows(); ++r) {
            if (poly.A(r, i) > 1e-14) bounded_above = true;
            if (poly.A(r, i) < -1e-14) bounded_below = true;
        }
        if (!bounded_above || !bounded_below) {
            throw SolverError("unbounded box: polytope is unbounded in coordinate " +
                              std::to_string(i + 1) + (bounded_above ? " (below)" : " (above)"));
        }
    }
}

// strictly interior point of {A p <= b} via a damped-Newton phase-1 on
// min w  s.t.  A p - w <= b ; returns p with margin min(b - A p) > 0
Eigen::VectorXd interior_point(const FlexPolytope& poly) {
    const int e = poly.n_ess;
    const int m = poly.n_rows();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(e);
    double w = (poly.A * p - poly.b).maxCoeff() + 1.0;

    double t = 1.0;
    for (int outer = 0; outer < 80; ++outer) {
        for (int it = 0; it < kMaxNewton; ++it) {
            const Eigen::VectorXd s = poly.b.array() + w - (poly.A * p).array();
            if ((poly.b - poly.A * p).minCoeff() > 1e-8) return p; // already interior
            const Eigen::VectorXd inv_s = s.cwiseInverse();
            // F = t*w + sum -ln(s); minimize over (p, w)
            Eigen::VectorXd grad(e + 1);
            grad.head(e) = poly.A.transpose() * inv_s;
            grad[e] = t - inv_s.sum();
            Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(e + 1, e + 1);
            const Eigen::VectorXd inv_s2 = inv_s.cwiseProduct(inv_s);
            hess.topLeftCorner(e, e) = poly.A.transpose() * inv_s2.asDiagonal() * poly.A;
            hess.topRightCorner(e, 1) = -poly.A.transpose() * inv_s2;
            hess.bottomLeftCorner(1, e) = hess.topRightCorner(e, 1).transpose();
            hess(e, e) = inv_s2.sum();
            Eigen::VectorXd d = hess.ldlt().solve(-grad);
            const double decrement = -grad.dot(d);
            if (decrement < 1e-14) break;

            double alpha = 1.0;
            for (int ls = 0; ls < 60; ++ls) {
                const Eigen::VectorXd pn = p + alpha * d.head(e);
                const double wn = w + alpha * d[e];
                const Eigen::VectorXd sn = poly.b.array() + wn - (poly.A * pn).array();
                if (sn.minCoeff() > 0.0) {
                    p = pn;
                    w = wn;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if ((poly.b - poly.A * p).minCoeff() > 1e-8) return p;
        t *= kTFactor;
    }
    if ((poly.b - poly.A * p).minCoeff() > 0.0) return p;
    throw SolverError("empty polytope: no strictly feasible storage injection exists");
}

struct Objective {
    BoxVariant variant;
    // value, gradient and (diagonal-block) Hessian of the log objective over
    // v = (corner xi, width zeta); domain must hold before calling
    double value(const Eigen::VectorXd& xi, const Eigen::VectorXd& zeta) const {
        double f = 0.0;
        for (int i = 0; i < xi.size(); ++i) {
            if (variant == BoxVariant::Volume) {
                f += std::log(zeta[i]);
            } else {
                f += std::log(xi[i] + zeta[i]) + std::log(-xi[i]);
            }
        }
        return f;
    }
    bool in_domain(const Eigen::VectorXd& xi, const Eigen::VectorXd& zeta) const {
        for (int i = 0; i < xi.size(); ++i) {
            if (variant == BoxVariant::Volume) {
                if (zeta[i] <= 0.0) return false;
            } else {
                if (xi[i] >= 0.0 || xi[i] + zeta[i] <= 0.0) return false;
            }
        }
        return true;
    }
    void add_grad_hess(const Eigen::VectorXd& xi, const Eigen::VectorXd& zeta, double t,
                       Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
        const int e = static_cast<int>(xi.size());
        for (int i = 0; i < e; ++i) {
            if (variant == BoxVariant::Volume) {
                grad[e + i] += t / zeta[i];
                hess(e + i, e + i) += -t / (zeta[i] * zeta[i]);
            } else {
                const double u = xi[i] + zeta[i]; // upper corner > 0
                grad[i] += t * (1.0 / u + 1.0 / xi[i]);
                grad[e + i] += t / u;
                const double duu = -t / (u * u);
                hess(i, i) += duu - t / (xi[i] * xi[i]);
                hess(i, e + i) += duu;
                hess(e + i, i) += duu;
                hess(e + i, e + i) += duu;
            }
        }
    }
};

Hyperbox solve_box(const FlexPolytope& poly, BoxVariant variant) {
    const int e = poly.n_ess;
    const int m = poly.n_rows();
    check_boundedness(poly);

    // G [xi; zeta] <= b with G = [A, A+]
    Eigen::MatrixXd g(m, 2 * e);
    g.leftCols(e) = poly.A;
    g.rightCols(e) = poly.A.cwiseMax(0.0);

    // strictly feasible start: a tiny box around an interior point (origin
    // for the bidirectional variant, which requires it anyway)
    Eigen::VectorXd center;
    if (variant == BoxVariant::Bidirectional) {
        if (poly.b.minCoeff() <= 0.0) {
            throw SolverError("origin infeasible: zero injection violates the polytope, "
                              "bidirectional box is undefined");
        }
        center = Eigen::VectorXd::Zero(e);
    } else {
        center = interior_point(poly);
    }
    const double margin = (poly.b - poly.A * center).minCoeff();
    double row_scale = 1.0;
    for (int r = 0; r < m; ++r) row_scale = std::max(row_scale, poly.A.row(r).lpNorm<1>());
    const double eps = std::min(1e-3, 0.5 * margin / row_scale);

    Eigen::VectorXd xi = center.array() - eps;
    Eigen::VectorXd zeta = Eigen::VectorXd::Constant(e, 2.0 * eps);
    Objective obj{variant};

    Eigen::VectorXd v(2 * e);
    v << xi, zeta;
    auto barrier_val = [&](const Eigen::VectorXd& vv, double t) {
        const Eigen::VectorXd s = poly.b - g * vv;
        if (s.minCoeff() <= 0.0 || !obj.in_domain(vv.head(e), vv.tail(e)))
            return -std::numeric_limits<double>::infinity();
        return t * obj.value(vv.head(e), vv.tail(e)) + s.array().log().sum();
    };

    double t = std::max(1.0, static_cast<double>(m));
    while (true) {
        for (int it = 0; it < kMaxNewton; ++it) {
            const Eigen::VectorXd s = poly.b - g * v;
            const Eigen::VectorXd inv_s = s.cwiseInverse();
            Eigen::VectorXd grad = -g.transpose() * inv_s;
            Eigen::MatrixXd hess =
                -(g.transpose() * inv_s.cwiseProduct(inv_s).asDiagonal() * g);
            obj.add_grad_hess(v.head(e), v.tail(e), t, grad, hess);

            Eigen::VectorXd d = (-hess).ldlt().solve(grad);
            const double decrement = grad.dot(d);
            if (grad.lpNorm<Eigen::Infinity>() <= 0.5e-9 * t && decrement < 1e-12) break;

            const double f0 = barrier_val(v, t);
            double alpha = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                const Eigen::VectorXd vn = v + alpha * d;
                if (barrier_val(vn, t) >= f0 + 0.25 * alpha * decrement) {
                    v = vn;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) break;
        }
        if (static_cast<double>(m) / t < kGapTol) break;
        t *= kTFactor;
    }

    Hyperbox box;
    box.period = poly.period;
    box.variant = variant;
    box.lower = v.head(e);
    box.upper = v.head(e) + v.tail(e);
    box.objective = obj.value(v.head(e), v.tail(e));
    // dual certificate: mu_r = 1/(t s_r) >= 0
    const Eigen::VectorXd s = poly.b - g * v;
    Eigen::VectorXd grad_f = Eigen::VectorXd::Zero(2 * e);
    Eigen::MatrixXd unused = Eigen::MatrixXd::Zero(2 * e, 2 * e);
    obj.add_grad_hess(v.head(e), v.tail(e), 1.0, grad_f, unused);
    const Eigen::VectorXd mu = (t * s.array()).inverse();
    box.kkt_stationarity = (grad_f - g.transpose() * mu).lpNorm<Eigen::Infinity>();
    box.kkt_complementarity = (mu.array() * s.array()).maxCoeff();
    return box;
}

} // namespace

Hyperbox max_volume_box(const FlexPolytope& poly) {
    return solve_box(poly, BoxVariant::Volume);
}

Hyperbox max_bidirectional_box(const FlexPolytope& poly) {
    return solve_box(poly, BoxVariant::Bidirectional);
}

BoxComparison compare_boxes(const FlexPolytope& poly) {
    BoxComparison cmp;
    cmp.volume_box = max_volume_box(poly);
    cmp.bidirectional_box = max_bidirectional_box(poly);
    cmp.volume_of_volume_box = cmp.volume_box.volume();
    cmp.volume_of_bidirectional_box = cmp.bidirectional_box.volume();
    return cmp;
}

} // namespace itdflex
