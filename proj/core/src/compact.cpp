#include "itdflex/ldf/compact.hpp"

#include <vector>

#include <Eigen/SparseLU>

#include "itdflex/errors.hpp"

namespace itdflex {

CompactModel assemble_compact(const RadialFeeder& feeder, int period) {
    if (period < 1 || period > feeder.n_periods()) {
        throw ValidationError("feeder '" + feeder.id + "': no loads defined at period " +
                              std::to_string(period));
    }
    CompactModel m;
    m.n_bus = feeder.n_bus;
    m.n_line = feeder.n_line();
    m.n_ess = feeder.n_ess();
    m.period = period;

    const int n = m.dim();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(6 * n);

    // slack voltage fix: U_1 = 1
    trip.emplace_back(m.row_slack(), m.col_u(1), 1.0);

    // voltage drop along each branch: Cinc*U - 2R*Pl - 2X*Ql = 0
    for (int a = 1; a <= m.n_line; ++a) {
        const auto& ln = feeder.lines[a - 1];
        trip.emplace_back(m.row_vdrop(a), m.col_u(ln.from), +1.0);
        trip.emplace_back(m.row_vdrop(a), m.col_u(ln.to), -1.0);
        if (ln.r != 0.0) trip.emplace_back(m.row_vdrop(a), m.col_pl(a), -2.0 * ln.r);
        if (ln.x != 0.0) trip.emplace_back(m.row_vdrop(a), m.col_ql(a), -2.0 * ln.x);
    }

    // nodal balances: e1*p_pcc - P_d - Cinc^T*Pl - Cs*Ps = 0 (and reactive)
    for (int a = 1; a <= m.n_line; ++a) {
        const auto& ln = feeder.lines[a - 1];
        trip.emplace_back(m.row_pbal(ln.from), m.col_pl(a), -1.0);
        trip.emplace_back(m.row_pbal(ln.to), m.col_pl(a), +1.0);
        trip.emplace_back(m.row_qbal(ln.from), m.col_ql(a), -1.0);
        trip.emplace_back(m.row_qbal(ln.to), m.col_ql(a), +1.0);
    }
    trip.emplace_back(m.row_pbal(1), m.col_ppcc(), 1.0);
    trip.emplace_back(m.row_qbal(1), m.col_qpcc(), 1.0);

    m.M.resize(n, n);
    m.M.setFromTriplets(trip.begin(), trip.end());

    m.D = Eigen::VectorXd::Zero(n);
    m.D[m.row_slack()] = -1.0;
    for (int b = 1; b <= m.n_bus; ++b) {
        m.D[m.row_pbal(b)] = -feeder.p_load(b - 1, period - 1);
        m.D[m.row_qbal(b)] = -feeder.q_load(b - 1, period - 1);
    }

    m.B = Eigen::MatrixXd::Zero(n, m.n_ess);
    for (int d = 0; d < m.n_ess; ++d) {
        m.B(m.row_pbal(feeder.ess[d].bus), d) = -1.0;
    }

    // factor once, back-solve for the e sensitivity columns and the offset
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(m.M);
    if (lu.info() != Eigen::Success) {
        throw SolverError("feeder '" + feeder.id + "': compact matrix M is singular");
    }
    m.S = lu.solve(Eigen::MatrixXd(-m.B));
    m.c = lu.solve(Eigen::VectorXd(-m.D));
    return m;
}

double structural_det(const CompactModel& model, const std::vector<LeafStep>& order) {
    const int n = model.dim();
    Eigen::MatrixXd dense(model.M);
    std::vector<bool> row_live(n, true), col_live(n, true);

    auto single_live_in_col = [&](int col, int& row_out) {
        int count = 0;
        for (int r = 0; r < n; ++r) {
            if (row_live[r] && dense(r, col) != 0.0) {
                row_out = r;
                ++count;
            }
        }
        return count;
    };
    auto single_live_in_row = [&](int row, int& col_out) {
        int count = 0;
        for (int cc = 0; cc < n; ++cc) {
            if (col_live[cc] && dense(row, cc) != 0.0) {
                col_out = cc;
                ++count;
            }
        }
        return count;
    };

    double det = 1.0;
    auto take_pivot = [&](double v, const std::string& what) {
        if (v != 1.0 && v != -1.0) {
            throw SolverError("structural elimination: pivot not +-1 at " + what + " (value " +
                              std::to_string(v) + ")");
        }
        det *= (v < 0 ? -v : v);
    };

    for (const auto& step : order) {
        const int beta = step.bus, alpha = step.branch;

        // U_beta column: single entry in the voltage-drop row of alpha
        int r = -1;
        if (single_live_in_col(model.col_u(beta), r) != 1 || r != model.row_vdrop(alpha)) {
            throw SolverError("structural elimination: pivot not +-1 (column U_" +
                              std::to_string(beta) + " is not singly supported on branch " +
                              std::to_string(alpha) + ")");
        }
        take_pivot(dense(r, model.col_u(beta)), "U_" + std::to_string(beta));
        row_live[r] = false;
        col_live[model.col_u(beta)] = false;

        // active-balance row of beta: single entry in the Pl_alpha column
        int cc = -1;
        if (single_live_in_row(model.row_pbal(beta), cc) != 1 || cc != model.col_pl(alpha)) {
            throw SolverError("structural elimination: pivot not +-1 (active balance of bus " +
                              std::to_string(beta) + ")");
        }
        take_pivot(dense(model.row_pbal(beta), cc), "Pl_" + std::to_string(alpha));
        row_live[model.row_pbal(beta)] = false;
        col_live[cc] = false;

        // reactive-balance row of beta
        if (single_live_in_row(model.row_qbal(beta), cc) != 1 || cc != model.col_ql(alpha)) {
            throw SolverError("structural elimination: pivot not +-1 (reactive balance of bus " +
                              std::to_string(beta) + ")");
        }
        take_pivot(dense(model.row_qbal(beta), cc), "Ql_" + std::to_string(alpha));
        row_live[model.row_qbal(beta)] = false;
        col_live[cc] = false;
    }

    // terminal block: slack-fix, slack balances against U_1, p_pcc, q_pcc
    const int rows[3] = {model.row_slack(), model.row_pbal(1), model.row_qbal(1)};
    const int cols[3] = {model.col_u(1), model.col_ppcc(), model.col_qpcc()};
    for (int i = 0; i < 3; ++i) {
        int cc = -1;
        if (!row_live[rows[i]] || single_live_in_row(rows[i], cc) != 1 || cc != cols[i] ||
            dense(rows[i], cc) != 1.0) {
            throw SolverError("structural elimination: terminal block is not the identity");
        }
        row_live[rows[i]] = false;
        col_live[cc] = false;
    }
    return det;
}

FeederStates solve_states(const CompactModel& model, const Eigen::VectorXd& ps) {
    if (ps.size() != model.n_ess) {
        throw std::invalid_argument("solve_states: injection has " + std::to_string(ps.size()) +
                                    " entries, model expects " + std::to_string(model.n_ess));
    }
    const Eigen::VectorXd chi = model.S * ps + model.c;
    FeederStates st;
    st.u = chi.segment(0, model.n_bus);
    st.p_line = chi.segment(model.n_bus, model.n_line);
    st.q_line = chi.segment(model.n_bus + model.n_line, model.n_line);
    st.p_pcc = chi[model.col_ppcc()];
    st.q_pcc = chi[model.col_qpcc()];
    return st;
}

} // namespace itdflex
