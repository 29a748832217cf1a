#include "itdflex/net/graph.hpp"

#include <algorithm>

#include "itdflex/errors.hpp"

namespace itdflex {

Eigen::SparseMatrix<double> build_incidence(const RadialFeeder& feeder) {
    const int nl = feeder.n_line();
    const int nb = feeder.n_bus;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * nl);
    for (int a = 0; a < nl; ++a) {
        trip.emplace_back(a, feeder.lines[a].from - 1, +1.0);
        trip.emplace_back(a, feeder.lines[a].to - 1, -1.0);
    }
    Eigen::SparseMatrix<double> c(nl, nb);
    c.setFromTriplets(trip.begin(), trip.end());
    return c;
}

std::vector<LeafStep> leaf_elimination_order(const RadialFeeder& feeder) {
    const int nb = feeder.n_bus;
    const int nl = feeder.n_line();

    // degree and incident-branch bookkeeping on the live subgraph
    std::vector<int> degree(nb + 1, 0);
    std::vector<std::vector<int>> incident(nb + 1); // 1-based branch indices
    for (int a = 0; a < nl; ++a) {
        const auto& ln = feeder.lines[a];
        degree[ln.from]++;
        degree[ln.to]++;
        incident[ln.from].push_back(a + 1);
        incident[ln.to].push_back(a + 1);
    }

    std::vector<bool> bus_gone(nb + 1, false), branch_gone(nl + 1, false);
    std::vector<LeafStep> order;
    order.reserve(nb - 1);

    for (int step = 0; step < nb - 1; ++step) {
        // highest-numbered current non-slack leaf; fixed rule keeps the
        // order deterministic
        int leaf = 0;
        for (int b = nb; b >= 2; --b) {
            if (!bus_gone[b] && degree[b] == 1) {
                leaf = b;
                break;
            }
        }
        if (leaf == 0) {
            throw ValidationError("feeder '" + feeder.id +
                                  "': not radial (leaf elimination stalled after " +
                                  std::to_string(step) + " of " + std::to_string(nb - 1) +
                                  " steps)");
        }
        int branch = 0;
        for (int a : incident[leaf]) {
            if (!branch_gone[a]) {
                branch = a;
                break;
            }
        }
        const auto& ln = feeder.lines[branch - 1];
        const int other = (ln.from == leaf) ? ln.to : ln.from;
        bus_gone[leaf] = true;
        branch_gone[branch] = true;
        degree[leaf]--;
        degree[other]--;
        order.push_back({leaf, branch});
    }

    // any surviving branch means a cycle touching the slack component
    for (int a = 1; a <= nl; ++a) {
        if (!branch_gone[a]) {
            throw ValidationError("feeder '" + feeder.id +
                                  "': not radial (branch " + std::to_string(a) +
                                  " survives leaf elimination)");
        }
    }
    return order;
}

} // namespace itdflex
