#pragma once

#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "itdflex/net/case.hpp"

namespace itdflex {

/// Branch-bus incidence matrix, n_line x n_bus, +1 at the head bus of each
/// branch and -1 at the tail.
Eigen::SparseMatrix<double> build_incidence(const RadialFeeder& feeder);

/// One (leaf bus, incident branch) elimination step; buses/branches are
/// 1-based feeder indices.
struct LeafStep {
    int bus = 0;
    int branch = 0; // 1-based index into feeder.lines
};

/// Orders the n_bus-1 leaf removals that peel the tree down to the slack bus.
/// Among the current leaves the highest-numbered bus is removed first, which
/// makes the order deterministic. Throws ValidationError("not radial ...") if
/// elimination stalls before reaching a single bus.
std::vector<LeafStep> leaf_elimination_order(const RadialFeeder& feeder);

} // namespace itdflex
