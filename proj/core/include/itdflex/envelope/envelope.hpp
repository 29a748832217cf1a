#pragma once

#include <string>
#include <vector>

#include "itdflex/envelope/boxes.hpp"
#include "itdflex/net/case.hpp"

namespace itdflex {

/// One period of the DSO -> TSO message: fixed PCC load plus the per-device
/// power box of that period.
struct EnvelopePeriod {
    int k = 0;
    double p_base = 0.0; // 1^T P_d
    double q_base = 0.0;
    Eigen::VectorXd ps_min;
    Eigen::VectorXd ps_max;
    bool unidirectional = false; // origin-infeasible fallback to the volume box
};

/// Aggregated feeder flexibility at the point of common coupling. Energy data
/// passes through per device; no topology, impedances or nodal loads leave
/// the DSO with this object.
struct PccEnvelope {
    std::string feeder_id;
    std::vector<EssUnit> devices; // ids + energy bounds + initial energy
    std::vector<EnvelopePeriod> periods;

    int n_devices() const { return static_cast<int>(devices.size()); }
};

/// Assembles the envelope from per-period boxes (boxes[k-1] for period k).
/// Base loads come from the feeder's load columns; energy data passes through
/// unchanged. Throws ValidationError on a missing period.
PccEnvelope aggregate_feeder(const RadialFeeder& feeder, const std::vector<Hyperbox>& boxes);

/// Full per-feeder pipeline: per-period compact model -> polytope ->
/// bidirectional box (falling back to the volume box when the origin is
/// infeasible) -> aggregation. Feeders without storage produce pure-load
/// envelopes and skip the box programs.
PccEnvelope compute_envelope(const RadialFeeder& feeder);

std::string envelope_to_json(const PccEnvelope& env);
PccEnvelope envelope_from_json(const std::string& text);

} // namespace itdflex
