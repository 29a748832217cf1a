#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "itdflex/net/case.hpp"
#include "itdflex/net/graph.hpp"

namespace itdflex {

/// Linearized branch-flow system of one feeder at one period, written as
/// M*chi + B*ps + D = 0 over chi = [U; Pl; Ql; p_pcc; q_pcc]. M and B are
/// time-invariant; D carries the period's loads. S and c give the explicit
/// affine map chi = S*ps + c used everywhere downstream.
struct CompactModel {
    int n_bus = 0;
    int n_line = 0;
    int n_ess = 0;
    int period = 0;

    Eigen::SparseMatrix<double> M;
    Eigen::MatrixXd B;
    Eigen::VectorXd D;
    Eigen::MatrixXd S; // = -M^{-1} B
    Eigen::VectorXd c; // = -M^{-1} D

    int dim() const { return 2 * n_bus + n_line + 1; }

    // state-vector layout (0-based indices; bus/branch arguments 1-based)
    int col_u(int bus) const { return bus - 1; }
    int col_pl(int branch) const { return n_bus + branch - 1; }
    int col_ql(int branch) const { return n_bus + n_line + branch - 1; }
    int col_ppcc() const { return n_bus + 2 * n_line; }
    int col_qpcc() const { return n_bus + 2 * n_line + 1; }

    // row layout
    int row_slack() const { return 0; }
    int row_vdrop(int branch) const { return branch; }
    int row_pbal(int bus) const { return 1 + n_line + bus - 1; }
    int row_qbal(int bus) const { return 1 + n_line + n_bus + bus - 1; }
};

/// Dependent feeder states for a given storage injection.
struct FeederStates {
    Eigen::VectorXd u;      // squared voltage magnitudes
    Eigen::VectorXd p_line; // active branch flows
    Eigen::VectorXd q_line; // reactive branch flows
    double p_pcc = 0.0;
    double q_pcc = 0.0;
};

/// Builds M, B, D for period k (1-based) and factors M once to obtain S, c.
CompactModel assemble_compact(const RadialFeeder& feeder, int period);

/// |det M| via the leaf-by-leaf cofactor elimination; every pivot must be
/// exactly +-1 and the terminal 3x3 block the identity, so the result is 1
/// whenever M is well-formed. Throws SolverError("... pivot not +-1 ...")
/// otherwise.
double structural_det(const CompactModel& model, const std::vector<LeafStep>& order);

/// chi = S*ps + c unpacked into named states.
FeederStates solve_states(const CompactModel& model, const Eigen::VectorXd& ps);

} // namespace itdflex
