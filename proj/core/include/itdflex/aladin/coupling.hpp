#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "itdflex/acopf/network_model.hpp"
#include "itdflex/acopf/opf_problem.hpp"

namespace itdflex {

/// Rows of one consensus group as per-block sparse matrices; the group sum
/// sum_b C_b x_b vanishes at any physically consistent point.
struct ConsensusGroup {
    std::map<int, Eigen::SparseMatrix<double>> per_block;
    int n_rows = 0;

    Eigen::VectorXd apply(const std::vector<Eigen::VectorXd>& xer) const;
};

/// Sparse spatial (per period, tie-bus angle/magnitude pairs, entries +-1)
/// and temporal (per area, storage and ramp recursions, entries {-1,1,dt})
/// consensus structure over the (period, area) blocks.
struct CouplingStructure {
    int n_areas = 0;
    int n_k = 0;
    std::vector<ConsensusGroup> spatial;  // index k-1, dualized by lambda_k
    std::vector<ConsensusGroup> temporal; // index area, dualized by kappa_area
    std::vector<int> temporal_rows_per_step; // per area: n_sto + n_gen rows per k >= 2 slice

    int block_index(int k, int area) const { return (k - 1) * n_areas + area; }
    int n_blocks() const { return n_areas * n_k; }

    struct SpatialRowInfo {
        std::string owner, copier;
        int bus = 0; // 1-based id in the owner's numbering
        bool angle = true;
    };
    std::vector<SpatialRowInfo> spatial_rows; // same layout in every period group
};

/// Builds the consensus rows from the per-area models: for every copy bus two
/// rows per period equate the owner's angle/magnitude with the copy; for
/// every area and period pair (k-1, k) one row per storage device encodes
/// E_k - E_{k-1} - dt*Ps_k = 0 and one row per generator
/// Pg_k - Pg_{k-1} - dPg_k = 0. First-period initial-state rows are decoupled
/// constraints of the k=1 subproblems, not couplings.
CouplingStructure build_couplings(const std::vector<AreaNetwork>& nets, int n_k, double dt);

} // namespace itdflex
