#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace itdflex {

using YMatrix = Eigen::SparseMatrix<std::complex<double>>;

/// Nodal active/reactive injections of the polar bus-injection model:
///   P_i = v_i sum_j v_j (G_ij cos th_ij + B_ij sin th_ij)
///   Q_i = v_i sum_j v_j (G_ij sin th_ij - B_ij cos th_ij)
struct Injections {
    Eigen::VectorXd p, q;
};

Injections power_injections(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                            const YMatrix& y);

/// First derivatives, n x n sparse blocks over (theta, v).
struct InjectionJacobian {
    Eigen::SparseMatrix<double> dp_dth, dp_dv, dq_dth, dq_dv;
};

InjectionJacobian injection_jacobian(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                                     const YMatrix& y);

/// sum_i lp_i hess(P_i) + lq_i hess(Q_i), a symmetric 2n x 2n matrix over the
/// stacked (theta, v) variables.
Eigen::SparseMatrix<double> injection_hessian(const Eigen::VectorXd& theta,
                                              const Eigen::VectorXd& v, const YMatrix& y,
                                              const Eigen::VectorXd& lp,
                                              const Eigen::VectorXd& lq);

/// Branch in the pi model with explicit terminal admittances; local 0-based
/// bus indices. Flow limits are enforced only where `enforce_limit` is set
/// (replicated tie-lines keep the limit on the owning side only).
struct FlowBranch {
    int from = 0, to = 0;
    std::complex<double> yff, yft, ytf, ytt;
    double s_max = 0.0;
    bool enforce_limit = false;
};

FlowBranch make_flow_branch(int from, int to, double r, double x, double b_charge,
                            double s_max, bool enforce_limit);

/// Squared apparent flows |S|^2 at both branch ends (differentiable at zero
/// flow, unlike |S|).
struct BranchFlows {
    Eigen::VectorXd s2_from, s2_to;
};

BranchFlows branch_flows(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                         const std::vector<FlowBranch>& branches);

/// Gradient (4 entries over th_f, th_t, v_f, v_t) and symmetric 4x4 Hessian of
/// one end's squared flow; `from_end` selects the terminal.
struct FlowEndDerivatives {
    double value = 0.0;
    Eigen::Vector4d grad;
    Eigen::Matrix4d hess;
};

FlowEndDerivatives flow_end_derivatives(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                                        const FlowBranch& branch, bool from_end);

} // namespace itdflex
