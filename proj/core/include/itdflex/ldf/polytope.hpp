#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "itdflex/ldf/compact.hpp"

namespace itdflex {

/// What generated a polytope row.
enum class RowKind { VoltageUpper, VoltageLower, EssUpper, EssLower };

struct RowTag {
    RowKind kind;
    int index; // 1-based bus for voltage rows, 1-based device for ess rows
};

std::string row_tag_label(const RowTag& tag);

/// Exact feasible set of storage injections at one period, { p : A p <= b },
/// rows tagged with their provenance. Voltage rows that can never bind are
/// retained.
struct FlexPolytope {
    int period = 0;
    int n_ess = 0;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<RowTag> tags;

    int n_rows() const { return static_cast<int>(b.size()); }
    /// max_i (A p - b)_i ; <= 0 means member.
    double violation(const Eigen::VectorXd& p) const;
};

/// Rewrites U_lo <= S_U p + c_U <= U_hi and the device power box as A p <= b.
FlexPolytope build_polytope(const CompactModel& model, const RadialFeeder& feeder);

/// CSV export: tag,a_1,...,a_e,b per row.
std::string polytope_to_csv(const FlexPolytope& poly);

} // namespace itdflex
