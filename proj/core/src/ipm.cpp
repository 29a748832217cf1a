#include "itdflex/nlp/ipm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseCholesky>

#include "itdflex/errors.hpp"

namespace itdflex {

const char* to_string(NlpStatus s) {
    switch (s) {
    case NlpStatus::Optimal: return "optimal";
    case NlpStatus::Infeasible: return "infeasible";
    case NlpStatus::IterationLimit: return "iteration-limit";
    }
    return "?";
}

double KktResidual::max() const {
    return std::max({stationarity, feasibility, complementarity});
}

KktResidual kkt_residual(const NlpProblem& problem, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y_eq, const Eigen::VectorXd& z_ineq) {
    KktResidual r;
    Eigen::VectorXd stat = problem.objective_grad(x);
    if (problem.num_eq() > 0) stat += problem.eq_jacobian(x).transpose() * y_eq;
    if (problem.num_ineq() > 0) stat += problem.ineq_jacobian(x).transpose() * z_ineq;
    r.stationarity = stat.lpNorm<Eigen::Infinity>();

    double feas = 0.0, comp = 0.0;
    if (problem.num_eq() > 0)
        feas = problem.eq_constraints(x).lpNorm<Eigen::Infinity>();
    if (problem.num_ineq() > 0) {
        const Eigen::VectorXd ci = problem.ineq_constraints(x);
        feas = std::max(feas, ci.maxCoeff());
        comp = (z_ineq.array() * ci.array()).abs().maxCoeff();
    }
    r.feasibility = std::max(feas, 0.0);
    r.complementarity = comp;
    return r;
}

namespace {

struct KktFactor {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    double delta_primal = 0.0;
};

// Factor [[Hs + dp*I, JE^T],[JE, -dd*I]] with the inertia (n, mE); bumps the
// primal regularization until the factorization succeeds with the right
// signature.
bool factor_kkt(const Eigen::SparseMatrix<double>& h_sigma,
                const Eigen::SparseMatrix<double>& j_eq, int n, int m_eq, double delta_init,
                KktFactor& out) {
    const double delta_dual = (m_eq > 0) ? 1e-11 : 0.0;
    double delta_primal = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(h_sigma.nonZeros() + 2 * j_eq.nonZeros() + n + m_eq);
        for (int k = 0; k < h_sigma.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(h_sigma, k); it; ++it)
                trip.emplace_back(it.row(), it.col(), it.value());
        for (int i = 0; i < n; ++i) trip.emplace_back(i, i, delta_primal);
        for (int k = 0; k < j_eq.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(j_eq, k); it; ++it) {
                trip.emplace_back(n + it.row(), it.col(), it.value());
                trip.emplace_back(it.col(), n + it.row(), it.value());
            }
        for (int i = 0; i < m_eq; ++i) trip.emplace_back(n + i, n + i, -delta_dual);

        Eigen::SparseMatrix<double> kkt(n + m_eq, n + m_eq);
        kkt.setFromTriplets(trip.begin(), trip.end());
        out.ldlt.compute(kkt);
        if (out.ldlt.info() == Eigen::Success) {
            const Eigen::VectorXd d = out.ldlt.vectorD();
            int n_neg = 0;
            bool bad = false;
            for (int i = 0; i < d.size(); ++i) {
                if (!std::isfinite(d[i]) || d[i] == 0.0) {
                    bad = true;
                    break;
                }
                if (d[i] < 0.0) ++n_neg;
            }
            if (!bad && n_neg == m_eq) {
                out.delta_primal = delta_primal;
                return true;
            }
        }
        delta_primal = (delta_primal == 0.0) ? delta_init : 2.0 * delta_primal;
    }
    return false;
}

} // namespace

NlpSolution solve_nlp(const NlpProblem& problem, const Eigen::VectorXd& x0,
                      const IpmOptions& opt, const WarmStart* warm) {
    const auto t_start = std::chrono::steady_clock::now();
    const int n = problem.num_vars();
    const int m_eq = problem.num_eq();
    const int m_in = problem.num_ineq();
    if (x0.size() != n) throw std::invalid_argument("solve_nlp: initial point has wrong size");

    NlpSolution sol;
    Eigen::VectorXd x = x0;

    // objective scaling keeps the merit function balanced on badly scaled costs
    double sc = 1.0;
    if (opt.scale_objective) {
        const double g0 = problem.objective_grad(x).lpNorm<Eigen::Infinity>();
        if (g0 > 100.0) sc = 100.0 / g0;
    }

    double mu = opt.mu_init;
    const double mu_floor = opt.tol / 10.0;

    Eigen::VectorXd ci = (m_in > 0) ? problem.ineq_constraints(x) : Eigen::VectorXd();
    Eigen::VectorXd s(m_in), z(m_in);
    for (int i = 0; i < m_in; ++i) s[i] = std::max(-ci[i], mu);
    if (warm && warm->z_ineq.size() == m_in) {
        for (int i = 0; i < m_in; ++i) z[i] = std::clamp(sc * warm->z_ineq[i], 1e-8, 1e8);
    } else {
        for (int i = 0; i < m_in; ++i) z[i] = mu / s[i];
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_eq);
    if (warm && warm->y_eq.size() == m_eq) y = sc * warm->y_eq;

    double nu_pen = 1.0;
    int ls_failures = 0;

    auto finish = [&](NlpStatus status, const std::string& msg) {
        sol.status = status;
        sol.message = msg;
        sol.x = x;
        sol.y_eq = y / sc;
        sol.z_ineq = z / sc;
        sol.objective = problem.objective(x);
        sol.kkt = kkt_residual(problem, x, sol.y_eq, sol.z_ineq);
        sol.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return sol;
    };

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        sol.iterations = iter;

        const Eigen::VectorXd g = sc * problem.objective_grad(x);
        const Eigen::VectorXd ce = (m_eq > 0) ? problem.eq_constraints(x) : Eigen::VectorXd();
        ci = (m_in > 0) ? problem.ineq_constraints(x) : Eigen::VectorXd();
        const Eigen::SparseMatrix<double> je =
            (m_eq > 0) ? problem.eq_jacobian(x) : Eigen::SparseMatrix<double>(0, n);
        const Eigen::SparseMatrix<double> ji =
            (m_in > 0) ? problem.ineq_jacobian(x) : Eigen::SparseMatrix<double>(0, n);

        Eigen::VectorXd r_d = g;
        if (m_eq > 0) r_d += je.transpose() * y;
        if (m_in > 0) r_d += ji.transpose() * z;
        const Eigen::VectorXd r_i = (m_in > 0) ? Eigen::VectorXd(ci + s) : Eigen::VectorXd();
        const Eigen::VectorXd comp = (m_in > 0) ? Eigen::VectorXd(s.cwiseProduct(z)) : Eigen::VectorXd();

        const double stat_true = r_d.lpNorm<Eigen::Infinity>() / sc;
        const double feas_eq = (m_eq > 0) ? ce.lpNorm<Eigen::Infinity>() : 0.0;
        const double feas_in = (m_in > 0) ? r_i.lpNorm<Eigen::Infinity>() : 0.0;
        const double comp_true = (m_in > 0) ? comp.lpNorm<Eigen::Infinity>() / sc : 0.0;
        const double err_0 = std::max({stat_true, feas_eq, feas_in, comp_true});
        if (err_0 <= opt.tol) return finish(NlpStatus::Optimal, "KKT satisfied");

        const double comp_mu =
            (m_in > 0) ? (comp.array() - mu).abs().maxCoeff() / sc : 0.0;
        const double err_mu = std::max({stat_true, feas_eq, feas_in, comp_mu});
        if (err_mu <= 10.0 * mu && mu > mu_floor) {
            mu = std::max(mu_floor, std::min(opt.mu_linear * mu, std::pow(mu, opt.mu_super)));
        }

        // condensed Newton system
        const Eigen::SparseMatrix<double> w = problem.lagrangian_hessian(x, sc, y, z);
        Eigen::SparseMatrix<double> h_sigma = w;
        if (m_in > 0) {
            const Eigen::VectorXd zs = z.cwiseQuotient(s);
            Eigen::SparseMatrix<double> sigma = ji.transpose() * zs.asDiagonal() * ji;
            h_sigma = w + sigma;
        }

        KktFactor factor;
        if (!factor_kkt(h_sigma, je, n, m_eq, opt.delta_init, factor)) {
            return finish(NlpStatus::Infeasible, "KKT factorization failed");
        }

        Eigen::VectorXd rhs(n + m_eq);
        rhs.head(n) = -r_d;
        if (m_in > 0) {
            const Eigen::VectorXd r_c = comp.array() - mu; // S z - mu e
            const Eigen::VectorXd w_i =
                (r_c - z.cwiseProduct(r_i)).cwiseQuotient(s); // per-row correction
            rhs.head(n) += ji.transpose() * w_i;
        }
        if (m_eq > 0) rhs.tail(m_eq) = -ce;

        const Eigen::VectorXd step = factor.ldlt.solve(rhs);
        const Eigen::VectorXd dx = step.head(n);
        const Eigen::VectorXd dy = (m_eq > 0) ? Eigen::VectorXd(step.tail(m_eq)) : Eigen::VectorXd();

        Eigen::VectorXd ds, dz;
        if (m_in > 0) {
            ds = -r_i - ji * dx;
            const Eigen::VectorXd r_c = comp.array() - mu;
            dz = (-r_c - z.cwiseProduct(ds)).cwiseQuotient(s);
        }

        // fraction-to-boundary
        double alpha_max = 1.0, alpha_z = 1.0;
        const double tau = std::max(opt.tau, 1.0 - mu);
        for (int i = 0; i < m_in; ++i) {
            if (ds[i] < 0.0) alpha_max = std::min(alpha_max, -tau * s[i] / ds[i]);
            if (dz[i] < 0.0) alpha_z = std::min(alpha_z, -tau * z[i] / dz[i]);
        }

        // l1 merit line search
        const double viol0 =
            ((m_eq > 0) ? ce.lpNorm<1>() : 0.0) + ((m_in > 0) ? r_i.lpNorm<1>() : 0.0);
        double mult_est = 0.0;
        if (m_eq > 0) mult_est = std::max(mult_est, (y + dy).lpNorm<Eigen::Infinity>());
        if (m_in > 0) mult_est = std::max(mult_est, (z + dz).lpNorm<Eigen::Infinity>());
        nu_pen = std::max(nu_pen, 1.1 * mult_est + 1.0);

        auto merit = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& ss) {
            double m = sc * problem.objective(xx);
            for (int i = 0; i < m_in; ++i) {
                if (ss[i] <= 0.0) return std::numeric_limits<double>::infinity();
                m -= mu * std::log(ss[i]);
            }
            if (m_eq > 0) m += nu_pen * problem.eq_constraints(xx).lpNorm<1>();
            if (m_in > 0)
                m += nu_pen * (problem.ineq_constraints(xx) + ss).lpNorm<1>();
            return m;
        };

        double d_phi = g.dot(dx);
        for (int i = 0; i < m_in; ++i) d_phi -= mu * ds[i] / s[i];
        d_phi -= nu_pen * viol0;

        const double phi0 = merit(x, s);
        double alpha = alpha_max;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            const Eigen::VectorXd xn = x + alpha * dx;
            const Eigen::VectorXd sn = (m_in > 0) ? Eigen::VectorXd(s + alpha * ds) : s;
            if (merit(xn, sn) <= phi0 + 1e-4 * alpha * d_phi + 1e-14 * std::abs(phi0)) {
                x = xn;
                s = sn;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (++ls_failures >= 5) {
                return finish(NlpStatus::Infeasible,
                              "line search failed repeatedly (restoration unavailable)");
            }
            // take a cautious step to escape the stall
            x += 1e-6 * alpha_max * dx;
            if (m_in > 0) s += 1e-6 * alpha_max * ds;
        } else {
            ls_failures = 0;
        }

        if (m_eq > 0) y += alpha * dy;
        if (m_in > 0) {
            z += alpha_z * dz;
            for (int i = 0; i < m_in; ++i) z[i] = std::max(z[i], 1e-14);
        }
    }
    sol.iterations = opt.max_iters;
    return finish(NlpStatus::IterationLimit, "iteration limit reached");
}

} // namespace itdflex
