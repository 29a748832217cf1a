#pragma once

#include <Eigen/Core>

#include "itdflex/ldf/polytope.hpp"

namespace itdflex {

enum class BoxVariant { Volume, Bidirectional };

/// Axis-aligned box [lower, upper] inscribed in a flexibility polytope.
struct Hyperbox {
    Eigen::VectorXd lower; // per-device approximated charging lower bound
    Eigen::VectorXd upper;
    int period = 0;
    BoxVariant variant = BoxVariant::Volume;
    double objective = 0.0; // achieved log objective
    double kkt_stationarity = 0.0;
    double kkt_complementarity = 0.0;

    int dim() const { return static_cast<int>(lower.size()); }
    double volume() const { return (upper - lower).prod(); }
};

/// Widest box by log-volume: max sum_i ln(width_i) s.t. A*corner + A+ * width <= b,
/// solved with a primal barrier Newton method (phase 1 finds an interior
/// polytope point first). Throws SolverError("empty polytope") when no strict
/// interior exists and SolverError("unbounded box ...") when some coordinate
/// of the polytope is unbounded.
Hyperbox max_volume_box(const FlexPolytope& poly);

/// Variant that maximizes both charging and discharging range,
/// max sum_i ln(upper_i) + ln(-lower_i); requires the origin strictly inside
/// the polytope, otherwise throws SolverError("origin infeasible").
Hyperbox max_bidirectional_box(const FlexPolytope& poly);

struct BoxComparison {
    Hyperbox volume_box;
    Hyperbox bidirectional_box;
    double volume_of_volume_box = 0.0;
    double volume_of_bidirectional_box = 0.0;
};

/// Solves both programs on the same polytope (errors propagate).
BoxComparison compare_boxes(const FlexPolytope& poly);

} // namespace itdflex
