#include "itdflex/ldf/polytope.hpp"

#include <limits>
#include <sstream>

namespace itdflex {

std::string row_tag_label(const RowTag& tag) {
    switch (tag.kind) {
    case RowKind::VoltageUpper: return "u_hi_bus" + std::to_string(tag.index);
    case RowKind::VoltageLower: return "u_lo_bus" + std::to_string(tag.index);
    case RowKind::EssUpper: return "p_hi_ess" + std::to_string(tag.index);
    case RowKind::EssLower: return "p_lo_ess" + std::to_string(tag.index);
    }
    return "?";
}

double FlexPolytope::violation(const Eigen::VectorXd& p) const {
    if (n_rows() == 0) return -std::numeric_limits<double>::infinity();
    return (A * p - b).maxCoeff();
}

FlexPolytope build_polytope(const CompactModel& model, const RadialFeeder& feeder) {
    const int e = model.n_ess;
    const int nb = model.n_bus;
    const int rows = 2 * nb + 2 * e;

    FlexPolytope poly;
    poly.period = model.period;
    poly.n_ess = e;
    poly.A.setZero(rows, e);
    poly.b.resize(rows);
    poly.tags.reserve(rows);

    // voltage rows of the sensitivity map:  u_lo <= S_U p + c_U <= u_hi
    int r = 0;
    for (int bus = 1; bus <= nb; ++bus, ++r) {
        poly.A.row(r) = model.S.row(model.col_u(bus));
        poly.b[r] = feeder.u_max[bus - 1] - model.c[model.col_u(bus)];
        poly.tags.push_back({RowKind::VoltageUpper, bus});
    }
    for (int bus = 1; bus <= nb; ++bus, ++r) {
        poly.A.row(r) = -model.S.row(model.col_u(bus));
        poly.b[r] = model.c[model.col_u(bus)] - feeder.u_min[bus - 1];
        poly.tags.push_back({RowKind::VoltageLower, bus});
    }

    // device power box
    for (int d = 0; d < e; ++d, ++r) {
        poly.A(r, d) = 1.0;
        poly.b[r] = feeder.ess[d].p_max;
        poly.tags.push_back({RowKind::EssUpper, d + 1});
    }
    for (int d = 0; d < e; ++d, ++r) {
        poly.A(r, d) = -1.0;
        poly.b[r] = -feeder.ess[d].p_min;
        poly.tags.push_back({RowKind::EssLower, d + 1});
    }
    return poly;
}

std::string polytope_to_csv(const FlexPolytope& poly) {
    std::ostringstream out;
    out.precision(17);
    out << "tag";
    for (int j = 0; j < poly.n_ess; ++j) out << ",a" << (j + 1);
    out << ",b\n";
    for (int i = 0; i < poly.n_rows(); ++i) {
        out << row_tag_label(poly.tags[i]);
        for (int j = 0; j < poly.n_ess; ++j) out << "," << poly.A(i, j);
        out << "," << poly.b[i] << "\n";
    }
    return out.str();
}

} // namespace itdflex
