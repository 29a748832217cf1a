#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "itdflex/acopf/injections.hpp"
#include "itdflex/envelope/envelope.hpp"
#include "itdflex/net/case.hpp"

namespace itdflex {

struct ModelGen {
    std::string id;
    int bus = 0; // 0-based local index
    double a0 = 0, a1 = 0, a2 = 0;
    double p_min = 0, p_max = 0, q_min = 0, q_max = 0;
    double ramp_min = 0, ramp_max = 0;
    double pg0 = 0;
};

struct ModelStorage {
    std::string id;
    int bus = 0;
    double e_min = 0, e_max = 0, e0 = 0;
    Eigen::MatrixXd p_box; // n_k x 2 columns (min, max); envelope boxes are per-period
};

/// Numeric dispatch model of one control region: own buses first, then copies
/// of neighboring tie-line terminals (coordinated-distributed mode only).
struct AreaNetwork {
    std::string area_id;
    int n_own = 0;
    struct CopyBus {
        std::string area; // neighbor that owns the bus
        int bus = 0;      // 1-based id in the neighbor's numbering
    };
    std::vector<CopyBus> copies;

    Eigen::VectorXd v_min, v_max;   // own buses
    Eigen::MatrixXd p_load, q_load; // n_own x n_k, PCC base loads folded in
    std::vector<FlowBranch> branches;
    YMatrix ybus; // over own + copy buses
    std::vector<ModelGen> gens;
    std::vector<ModelStorage> storages; // native first, then per-PCC envelope devices
    int ref_bus = -1;                   // 0-based own index, -1 = no reference row

    int n_bus() const { return n_own + static_cast<int>(copies.size()); }
    int n_copy() const { return static_cast<int>(copies.size()); }
    int n_gen() const { return static_cast<int>(gens.size()); }
    int n_sto() const { return static_cast<int>(storages.size()); }
};

using EnvelopeMap = std::map<std::string, PccEnvelope>;

/// Per-area models. `isolated` drops tie-lines entirely and gives every area
/// its own reference bus; otherwise each tie-line is replicated on both
/// sides with a copy of the remote terminal, the flow limit stays with the
/// lexicographically smaller area id, and only the first area keeps a
/// reference row (consensus propagates the angle datum).
std::vector<AreaNetwork> build_area_networks(const ItdCase& c, const EnvelopeMap& envelopes,
                                             bool isolated);

/// Merged single-network model for the centralized reference: all areas
/// renumbered into one bus set, tie-lines ordinary branches, one global
/// reference bus (the first area's).
struct UnionNetwork {
    AreaNetwork net;
    std::map<std::string, int> bus_offset;                // area id -> 0-based offset
    std::vector<std::pair<std::string, int>> gen_origin;  // (area id, index in that area's model)
    std::vector<std::pair<std::string, int>> sto_origin;
};

UnionNetwork build_union_network(const ItdCase& c, const EnvelopeMap& envelopes);

/// Envelope for every feeder of the case from its per-period case loads.
EnvelopeMap compute_case_envelopes(const ItdCase& c);

} // namespace itdflex
