#include "itdflex/aladin/solver.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/Dense>

#include "itdflex/errors.hpp"
#include "itdflex/util/parallel.hpp"

namespace itdflex {

namespace {

/// Base problem plus the dual price term and the proximal pull toward the
/// previous iterate; constraints pass through untouched.
class ProximalNlp : public NlpProblem {
public:
    ProximalNlp(const NlpProblem& base, Eigen::VectorXd price, double rho,
                Eigen::VectorXd center)
        : base_(base), price_(std::move(price)), rho_(rho), center_(std::move(center)) {}

    int num_vars() const override { return base_.num_vars(); }
    int num_eq() const override { return base_.num_eq(); }
    int num_ineq() const override { return base_.num_ineq(); }

    double objective(const Eigen::VectorXd& x) const override {
        return base_.objective(x) + price_.dot(x) + 0.5 * rho_ * (x - center_).squaredNorm();
    }
    Eigen::VectorXd objective_grad(const Eigen::VectorXd& x) const override {
        return base_.objective_grad(x) + price_ + rho_ * (x - center_);
    }
    Eigen::VectorXd eq_constraints(const Eigen::VectorXd& x) const override {
        return base_.eq_constraints(x);
    }
    Eigen::VectorXd ineq_constraints(const Eigen::VectorXd& x) const override {
        return base_.ineq_constraints(x);
    }
    Eigen::SparseMatrix<double> eq_jacobian(const Eigen::VectorXd& x) const override {
        return base_.eq_jacobian(x);
    }
    Eigen::SparseMatrix<double> ineq_jacobian(const Eigen::VectorXd& x) const override {
        return base_.ineq_jacobian(x);
    }
    Eigen::SparseMatrix<double>
    lagrangian_hessian(const Eigen::VectorXd& x, double sigma, const Eigen::VectorXd& y_eq,
                       const Eigen::VectorXd& y_ineq) const override {
        Eigen::SparseMatrix<double> h = base_.lagrangian_hessian(x, sigma, y_eq, y_ineq);
        if (sigma != 0.0 && rho_ != 0.0) {
            Eigen::SparseMatrix<double> reg(num_vars(), num_vars());
            reg.setIdentity();
            h += (sigma * rho_) * reg;
        }
        return h;
    }
    Eigen::VectorXd initial_point() const override { return center_; }

private:
    const NlpProblem& base_;
    Eigen::VectorXd price_;
    double rho_;
    Eigen::VectorXd center_;
};

} // namespace

LocalResult solve_local(const NlpProblem& base, const Eigen::VectorXd& x_center,
                        const Eigen::VectorXd& price, double rho, const IpmOptions& opts,
                        const WarmStart* warm) {
    ProximalNlp prob(base, price, rho, x_center);
    const NlpSolution sol = solve_nlp(prob, x_center, opts, warm);
    LocalResult out;
    out.y = sol.x;
    out.nu = sol.z_ineq;
    out.mu_eq = sol.y_eq;
    out.status = sol.status;
    out.iterations = sol.iterations;
    return out;
}

Sensitivities compute_sensitivities(const NlpProblem& base, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& mu_eq, const Eigen::VectorXd& nu,
                                    double eps_active, double hess_floor) {
    Sensitivities s;
    s.grad = base.objective_grad(y);

    const Eigen::MatrixXd h =
        Eigen::MatrixXd(base.lagrangian_hessian(y, 1.0, mu_eq, nu));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (h + h.transpose()));
    Eigen::VectorXd d = eig.eigenvalues();
    const double floor = std::max(hess_floor, hess_floor * d.cwiseAbs().maxCoeff());
    for (int i = 0; i < d.size(); ++i) d[i] = std::max(std::abs(d[i]), floor);
    s.hess = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();

    const int n = base.num_vars();
    const int m_eq = base.num_eq();
    std::vector<int> active;
    Eigen::VectorXd hi;
    if (base.num_ineq() > 0) {
        hi = base.ineq_constraints(y);
        for (int i = 0; i < hi.size(); ++i)
            if (std::abs(hi[i]) <= eps_active) active.push_back(i);
    }
    s.jac_active.setZero(m_eq + static_cast<int>(active.size()), n);
    if (m_eq > 0) s.jac_active.topRows(m_eq) = Eigen::MatrixXd(base.eq_jacobian(y));
    if (!active.empty()) {
        const Eigen::MatrixXd ji = Eigen::MatrixXd(base.ineq_jacobian(y));
        for (std::size_t r = 0; r < active.size(); ++r)
            s.jac_active.row(m_eq + static_cast<int>(r)) = ji.row(active[r]);
    }
    return s;
}

AladinSolver::AladinSolver(std::vector<AreaNetwork> nets, int n_k, double dt,
                           AladinParams params)
    : nets_(std::move(nets)), n_k_(n_k), dt_(dt), params_(params),
      couplings_(build_couplings(nets_, n_k, dt)) {
    blocks_.reserve(couplings_.n_blocks());
    for (int k = 1; k <= n_k_; ++k) {
        for (int a = 0; a < couplings_.n_areas; ++a) {
            Eigen::VectorXd e0(nets_[a].n_sto()), pg0(nets_[a].n_gen());
            for (int s = 0; s < nets_[a].n_sto(); ++s) e0[s] = nets_[a].storages[s].e0;
            for (int g = 0; g < nets_[a].n_gen(); ++g) pg0[g] = nets_[a].gens[g].pg0;
            blocks_.push_back(std::make_unique<SinglePeriodOpf>(&nets_[a], k, dt_,
                                                                std::move(e0), std::move(pg0)));
        }
    }
}

DistributedSolution AladinSolver::solve(const AladinWarmStart* warm) {
    const int nb = n_blocks();
    const int na = couplings_.n_areas;

    std::vector<Eigen::VectorXd> x(nb);
    for (int b = 0; b < nb; ++b) {
        x[b] = (warm && static_cast<int>(warm->x.size()) == nb && warm->x[b].size())
                   ? warm->x[b]
                   : blocks_[b]->initial_point();
    }
    std::vector<Eigen::VectorXd> lambda(n_k_), kappa(na);
    for (int k = 0; k < n_k_; ++k) {
        lambda[k] = (warm && static_cast<int>(warm->lambda.size()) == n_k_)
                        ? warm->lambda[k]
                        : Eigen::VectorXd::Zero(couplings_.spatial[k].n_rows);
    }
    for (int a = 0; a < na; ++a) {
        kappa[a] = (warm && static_cast<int>(warm->kappa.size()) == na)
                       ? warm->kappa[a]
                       : Eigen::VectorXd::Zero(couplings_.temporal[a].n_rows);
    }

    // per-block dual price Gamma' lambda + Lambda' kappa
    auto block_price = [&](int b) {
        Eigen::VectorXd price = Eigen::VectorXd::Zero(blocks_[b]->num_vars());
        const int k = b / na, a = b % na;
        auto its = couplings_.spatial[k].per_block.find(b);
        if (its != couplings_.spatial[k].per_block.end())
            price += its->second.transpose() * lambda[k];
        auto itt = couplings_.temporal[a].per_block.find(b);
        if (itt != couplings_.temporal[a].per_block.end())
            price += itt->second.transpose() * kappa[a];
        return price;
    };

    DistributedSolution out;
    std::vector<LocalResult> local(nb);
    std::vector<WarmStart> mult_cache(nb);
    std::vector<Sensitivities> sens(nb);

    for (int iter = 1; iter <= params_.max_iters; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();

        // step 2a: decoupled NLPs
        std::vector<std::string> failure(nb);
        parallel_for(nb, params_.threads, [&](int b) {
            try {
                const WarmStart* ws =
                    (iter > 1 && mult_cache[b].z_ineq.size() > 0) ? &mult_cache[b] : nullptr;
                local[b] = solve_local(*blocks_[b], x[b], block_price(b), params_.rho,
                                       params_.nlp, ws);
                if (local[b].status == NlpStatus::Infeasible) {
                    failure[b] = "local NLP infeasible";
                } else {
                    mult_cache[b].y_eq = local[b].mu_eq;
                    mult_cache[b].z_ineq = local[b].nu;
                }
            } catch (const std::exception& e) {
                failure[b] = e.what();
            }
        });
        for (int b = 0; b < nb; ++b) {
            if (!failure[b].empty()) {
                throw SolverError("subproblem (k=" + std::to_string(b / na + 1) + ", area " +
                                  nets_[b % na].area_id + "): " + failure[b]);
            }
        }

        std::vector<Eigen::VectorXd> y(nb);
        for (int b = 0; b < nb; ++b) y[b] = local[b].y;

        // Eq. (13) residuals at the fresh local solutions
        double primal_sp = 0.0, primal_tmp = 0.0, dual = 0.0, objective = 0.0;
        std::vector<Eigen::VectorXd> r1(n_k_), r2(na);
        for (int k = 0; k < n_k_; ++k) {
            r1[k] = couplings_.spatial[k].apply(y);
            if (r1[k].size() > 0) primal_sp = std::max(primal_sp, r1[k].lpNorm<Eigen::Infinity>());
        }
        for (int a = 0; a < na; ++a) {
            r2[a] = couplings_.temporal[a].apply(y);
            if (r2[a].size() > 0)
                primal_tmp = std::max(primal_tmp, r2[a].lpNorm<Eigen::Infinity>());
        }
        for (int b = 0; b < nb; ++b) {
            dual = std::max(dual, (y[b] - x[b]).lpNorm<Eigen::Infinity>());
            objective += blocks_[b]->objective(y[b]);
        }

        IterationRecord rec;
        rec.iter = iter;
        rec.primal_spatial = primal_sp;
        rec.primal_temporal = primal_tmp;
        rec.dual = dual;
        rec.objective = objective;
        if (params_.record_walltime) {
            rec.wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
        }
        out.trace.records.push_back(rec);

        if (primal_sp <= params_.eps && primal_tmp <= params_.eps && dual <= params_.eps) {
            out.x = y;
            out.lambda = lambda;
            out.kappa = kappa;
            out.objective = objective;
            out.converged = true;
            out.iterations = iter;
            out.trace.converged = true;
            return out;
        }

        // step 2b: sensitivities at the local solutions
        parallel_for(nb, params_.threads, [&](int b) {
            sens[b] = compute_sensitivities(*blocks_[b], y[b], local[b].mu_eq, local[b].nu,
                                            params_.eps_active, params_.hess_floor);
        });

        // step 2c: coupled QP at the coordinator
        EqQpProblem qp;
        qp.blocks.resize(nb);
        for (int b = 0; b < nb; ++b) {
            qp.blocks[b].hess = sens[b].hess;
            qp.blocks[b].grad = sens[b].grad;
            qp.blocks[b].jac_active = sens[b].jac_active;
        }
        for (int k = 0; k < n_k_; ++k) {
            CouplingGroup g;
            g.per_block = couplings_.spatial[k].per_block;
            g.dual = lambda[k];
            g.residual = r1[k];
            g.penalty = params_.mu1;
            qp.spatial.push_back(std::move(g));
        }
        for (int a = 0; a < na; ++a) {
            CouplingGroup g;
            g.per_block = couplings_.temporal[a].per_block;
            g.dual = kappa[a];
            g.residual = r2[a];
            g.penalty = params_.mu2;
            qp.temporal.push_back(std::move(g));
        }
        const QpSolution qs = solve_eq_qp(qp);

        for (int b = 0; b < nb; ++b) x[b] = y[b] + qs.dy[b];
        const double damp = params_.dual_damping;
        for (int k = 0; k < n_k_; ++k)
            lambda[k] = (1.0 - damp) * lambda[k] + damp * qs.lambda_qp[k];
        for (int a = 0; a < na; ++a)
            kappa[a] = (1.0 - damp) * kappa[a] + damp * qs.kappa_qp[a];
    }

    // iteration limit: hand back the trace and last iterates for diagnosis
    out.x = x;
    out.lambda = lambda;
    out.kappa = kappa;
    out.objective = out.trace.records.empty() ? 0.0 : out.trace.records.back().objective;
    out.converged = false;
    out.iterations = params_.max_iters;
    return out;
}

} // namespace itdflex
