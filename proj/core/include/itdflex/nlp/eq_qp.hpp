#pragma once

#include <map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace itdflex {

/// One subproblem block of the coordination QP: positive-definite Hessian,
/// gradient at the block's local solution, and the Jacobian rows of its
/// active constraints (step must stay in their null space).
struct QpBlock {
    Eigen::MatrixXd hess;
    Eigen::VectorXd grad;
    Eigen::MatrixXd jac_active; // may have zero rows
};

/// One relaxed consensus group: sum_b C_b dy_b (+ current residual) = slack,
/// penalized by `penalty` and priced by `dual`. Spatial groups hold one
/// period's tie-bus rows, temporal groups one area's dynamics rows.
struct CouplingGroup {
    std::map<int, Eigen::SparseMatrix<double>> per_block; // block index -> C_b
    Eigen::VectorXd dual;     // lambda_k or kappa_l
    Eigen::VectorXd residual; // sum_b C_b y_b at the current local solutions
    double penalty = 1e4;     // mu_1 or mu_2
};

struct EqQpProblem {
    std::vector<QpBlock> blocks;
    std::vector<CouplingGroup> spatial;
    std::vector<CouplingGroup> temporal;
};

struct QpSolution {
    std::vector<Eigen::VectorXd> dy;        // step per block
    std::vector<Eigen::VectorXd> lambda_qp; // per spatial group
    std::vector<Eigen::VectorXd> kappa_qp;  // per temporal group
    std::vector<Eigen::VectorXd> s1;        // recovered spatial slacks
    std::vector<Eigen::VectorXd> s2;        // recovered temporal slacks
    double kkt_residual = 0.0;              // relative residual of the KKT solve
};

/// Solves the coupled equality-constrained QP
///   min  sum_b (1/2 dy_b' H_b dy_b + g_b' dy_b)
///        + sum_groups (dual's + penalty/2 ||s||^2)
///   s.t. residual_g + sum_b C_b dy_b = s_g          (per group)
///        J_b dy_b = 0                               (per block)
/// with one sparse symmetric indefinite KKT factorization (slacks eliminated
/// analytically, recovered afterwards). Dependent active rows are dropped via
/// pivoted QR (tolerance 1e-10) per block; throws SolverError
/// ("rank-deficient active set ...") if the system is still singular.
QpSolution solve_eq_qp(const EqQpProblem& qp);

} // namespace itdflex
