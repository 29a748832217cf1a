#pragma once

#include <memory>
#include <vector>

#include "itdflex/aladin/coupling.hpp"
#include "itdflex/nlp/eq_qp.hpp"
#include "itdflex/nlp/ipm.hpp"

namespace itdflex {

struct AladinParams {
    double rho = 1e2;        // proximal weight of the local problems
    double mu1 = 1e4;        // spatial slack penalty
    double mu2 = 1e4;        // temporal slack penalty
    double eps = 1e-4;       // termination tolerance (p.u., inf-norm)
    double eps_active = 1e-6;
    double hess_floor = 1e-8; // eigenvalue floor of the PD Hessian projection
    int max_iters = 100;
    double dual_damping = 1.0; // 1 = plain multiplier update
    int threads = 0;           // subproblem parallelism; 0 = hardware
    bool record_walltime = false;
    IpmOptions nlp;
};

struct IterationRecord {
    int iter = 0;
    double primal_spatial = 0.0;
    double primal_temporal = 0.0;
    double dual = 0.0;
    double objective = 0.0;
    double wall_ms = 0.0;
};

struct IterationTrace {
    std::vector<IterationRecord> records;
    bool converged = false;
};

/// Local step (Algorithm step 2a): minimize
///   f(y) + price'y + rho/2 ||y - x_center||^2   s.t. the block's constraints,
/// where price = Gamma' lambda + Lambda' kappa for this block.
struct LocalResult {
    Eigen::VectorXd y;
    Eigen::VectorXd nu;   // inequality multipliers
    Eigen::VectorXd mu_eq;
    NlpStatus status = NlpStatus::IterationLimit;
    int iterations = 0;
};

LocalResult solve_local(const NlpProblem& base, const Eigen::VectorXd& x_center,
                        const Eigen::VectorXd& price, double rho, const IpmOptions& opts,
                        const WarmStart* warm = nullptr);

struct Sensitivities {
    Eigen::VectorXd grad;       // gradient of the block objective at y
    Eigen::MatrixXd hess;       // PD projection of the Lagrangian Hessian
    Eigen::MatrixXd jac_active; // equality rows + active inequality rows
};

/// Step 2b: gradient, positive-definite Hessian projection and active-set
/// Jacobian at the local solution. Equality rows always count as active;
/// inequality rows are active iff |h_i(y)| <= eps_active. Negative Hessian
/// eigenvalues are flipped and floored at hess_floor (relative to the largest
/// magnitude).
Sensitivities compute_sensitivities(const NlpProblem& base, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& mu_eq, const Eigen::VectorXd& nu,
                                    double eps_active, double hess_floor);

struct DistributedSolution {
    // consensus solution per block: x[(k-1)*n_areas + area]
    std::vector<Eigen::VectorXd> x;
    std::vector<Eigen::VectorXd> lambda; // per period
    std::vector<Eigen::VectorXd> kappa;  // per area
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
    IterationTrace trace;
};

struct AladinWarmStart {
    std::vector<Eigen::VectorXd> x;      // per block
    std::vector<Eigen::VectorXd> lambda; // per period
    std::vector<Eigen::VectorXd> kappa;  // per area
};

/// Full coordination loop (Algorithm step 2): local NLPs in parallel,
/// sensitivity extraction, coupled QP at the simulated coordinator, full-step
/// update, until the spatial/temporal primal residuals and the dual residual
/// all drop below eps. Workers see only their own block data plus
/// (x, price, rho); the coordinator sees only (y, g, H, J, coupling rows).
class AladinSolver {
public:
    AladinSolver(std::vector<AreaNetwork> nets, int n_k, double dt, AladinParams params);

    DistributedSolution solve(const AladinWarmStart* warm = nullptr);

    const CouplingStructure& couplings() const { return couplings_; }
    const std::vector<AreaNetwork>& nets() const { return nets_; }
    const SinglePeriodOpf& block_problem(int block) const { return *blocks_[block]; }
    int n_blocks() const { return couplings_.n_blocks(); }

private:
    std::vector<AreaNetwork> nets_;
    int n_k_;
    double dt_;
    AladinParams params_;
    CouplingStructure couplings_;
    std::vector<std::unique_ptr<SinglePeriodOpf>> blocks_;
};

} // namespace itdflex
