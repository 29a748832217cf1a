#include "itdflex/acopf/opf_problem.hpp"

#include <algorithm>
#include <cmath>

#include "itdflex/errors.hpp"

namespace itdflex {

StageLayout StageLayout::make(const AreaNetwork& net) {
    StageLayout l;
    l.n_bus = net.n_bus();
    l.n_own = net.n_own;
    l.n_gen = net.n_gen();
    l.n_sto = net.n_sto();
    l.off_theta = 0;
    l.off_v = l.n_bus;
    l.off_pg = 2 * l.n_bus;
    l.off_qg = l.off_pg + l.n_gen;
    l.off_ps = l.off_qg + l.n_gen;
    l.off_e = l.off_ps + l.n_sto;
    l.off_dpg = l.off_e + l.n_sto;
    l.n_vars = l.off_dpg + l.n_gen;
    return l;
}

StageValues unpack_stage(const StageLayout& lay, const Eigen::VectorXd& xs) {
    StageValues v;
    v.theta = xs.segment(lay.off_theta, lay.n_bus);
    v.v = xs.segment(lay.off_v, lay.n_bus);
    v.pg = xs.segment(lay.off_pg, lay.n_gen);
    v.qg = xs.segment(lay.off_qg, lay.n_gen);
    v.ps = xs.segment(lay.off_ps, lay.n_sto);
    v.e = xs.segment(lay.off_e, lay.n_sto);
    v.dpg = xs.segment(lay.off_dpg, lay.n_gen);
    return v;
}

OpfStage::OpfStage(const AreaNetwork& net, int period)
    : net_(&net), lay_(StageLayout::make(net)), period_(period) {
    for (int a = 0; a < static_cast<int>(net.branches.size()); ++a) {
        if (net.branches[a].enforce_limit) limited_.push_back(a);
    }
}

int OpfStage::num_eq() const { return 2 * lay_.n_own + (net_->ref_bus >= 0 ? 1 : 0); }

int OpfStage::num_ineq() const {
    return 2 * lay_.n_own + 6 * lay_.n_gen + 4 * lay_.n_sto +
           2 * static_cast<int>(limited_.size());
}

double OpfStage::cost(const Eigen::VectorXd& xs) const {
    double c = 0.0;
    for (int g = 0; g < lay_.n_gen; ++g) {
        const double pg = xs[lay_.pg(g)];
        const auto& gen = net_->gens[g];
        c += gen.a2 * pg * pg + gen.a1 * pg + gen.a0;
    }
    return c;
}

void OpfStage::add_cost_grad(const Eigen::VectorXd& xs, double w, Eigen::VectorXd& grad) const {
    for (int g = 0; g < lay_.n_gen; ++g) {
        const auto& gen = net_->gens[g];
        grad[lay_.pg(g)] += w * (2.0 * gen.a2 * xs[lay_.pg(g)] + gen.a1);
    }
}

Eigen::VectorXd OpfStage::eq(const Eigen::VectorXd& xs) const {
    const Eigen::VectorXd theta = xs.segment(lay_.off_theta, lay_.n_bus);
    const Eigen::VectorXd v = xs.segment(lay_.off_v, lay_.n_bus);
    const Injections inj = power_injections(theta, v, net_->ybus);

    Eigen::VectorXd r(num_eq());
    for (int i = 0; i < lay_.n_own; ++i) {
        r[i] = inj.p[i] + net_->p_load(i, period_ - 1);
        r[lay_.n_own + i] = inj.q[i] + net_->q_load(i, period_ - 1);
    }
    for (int g = 0; g < lay_.n_gen; ++g) {
        r[net_->gens[g].bus] -= xs[lay_.pg(g)];
        r[lay_.n_own + net_->gens[g].bus] -= xs[lay_.qg(g)];
    }
    for (int s = 0; s < lay_.n_sto; ++s) {
        r[net_->storages[s].bus] += xs[lay_.ps(s)];
    }
    if (net_->ref_bus >= 0) r[2 * lay_.n_own] = theta[net_->ref_bus];
    return r;
}

Eigen::VectorXd OpfStage::ineq(const Eigen::VectorXd& xs) const {
    Eigen::VectorXd h(num_ineq());
    int r = 0;
    for (int i = 0; i < lay_.n_own; ++i, ++r) h[r] = net_->v_min[i] - xs[lay_.v(i)];
    for (int i = 0; i < lay_.n_own; ++i, ++r) h[r] = xs[lay_.v(i)] - net_->v_max[i];
    for (int g = 0; g < lay_.n_gen; ++g, ++r) h[r] = net_->gens[g].p_min - xs[lay_.pg(g)];
    for (int g = 0; g < lay_.n_gen; ++g, ++r) h[r] = xs[lay_.pg(g)] - net_->gens[g].p_max;
    for (int g = 0; g < lay_.n_gen; ++g, ++r) h[r] = net_->gens[g].q_min - xs[lay_.qg(g)];
    for (int g = 0; g < lay_.n_gen; ++g, ++r) h[r] = xs[lay_.qg(g)] - net_->gens[g].q_max;
    for (int s = 0; s < lay_.n_sto; ++s, ++r)
        h[r] = net_->storages[s].p_box(period_ - 1, 0) - xs[lay_.ps(s)];
    for (int s = 0; s < lay_.n_sto; ++s, ++r)
        h[r] = xs[lay_.ps(s)] - net_->storages[s].p_box(period_ - 1, 1);
    for (int s = 0; s < lay_.n_sto; ++s, ++r) h[r] = net_->storages[s].e_min - xs[lay_.e(s)];
    for (int s = 0; s < lay_.n_sto; ++s, ++r) h[r] = xs[lay_.e(s)] - net_->storages[s].e_max;
    for (int g = 0; g < lay_.n_gen; ++g, ++r) h[r] = net_->gens[g].ramp_min - xs[lay_.dpg(g)];
    for (int g = 0; g < lay_.n_gen; ++g, ++r) h[r] = xs[lay_.dpg(g)] - net_->gens[g].ramp_max;

    if (!limited_.empty()) {
        const Eigen::VectorXd theta = xs.segment(lay_.off_theta, lay_.n_bus);
        const Eigen::VectorXd v = xs.segment(lay_.off_v, lay_.n_bus);
        for (int a : limited_) {
            const auto& br = net_->branches[a];
            const double cap = br.s_max * br.s_max;
            const FlowEndDerivatives df = flow_end_derivatives(theta, v, br, true);
            const FlowEndDerivatives dt = flow_end_derivatives(theta, v, br, false);
            h[r++] = df.value - cap;
            h[r++] = dt.value - cap;
        }
    }
    return h;
}

void OpfStage::eq_jacobian(const Eigen::VectorXd& xs, int row0, int col0,
                           std::vector<Eigen::Triplet<double>>& trip) const {
    const Eigen::VectorXd theta = xs.segment(lay_.off_theta, lay_.n_bus);
    const Eigen::VectorXd v = xs.segment(lay_.off_v, lay_.n_bus);
    const InjectionJacobian jac = injection_jacobian(theta, v, net_->ybus);

    auto add_block = [&](const Eigen::SparseMatrix<double>& blk, int rshift, int cshift) {
        for (int k = 0; k < blk.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(blk, k); it; ++it) {
                if (it.row() < lay_.n_own) {
                    trip.emplace_back(row0 + rshift + it.row(), col0 + cshift + it.col(),
                                      it.value());
                }
            }
        }
    };
    add_block(jac.dp_dth, 0, lay_.off_theta);
    add_block(jac.dp_dv, 0, lay_.off_v);
    add_block(jac.dq_dth, lay_.n_own, lay_.off_theta);
    add_block(jac.dq_dv, lay_.n_own, lay_.off_v);

    for (int g = 0; g < lay_.n_gen; ++g) {
        trip.emplace_back(row0 + net_->gens[g].bus, col0 + lay_.pg(g), -1.0);
        trip.emplace_back(row0 + lay_.n_own + net_->gens[g].bus, col0 + lay_.qg(g), -1.0);
    }
    for (int s = 0; s < lay_.n_sto; ++s) {
        trip.emplace_back(row0 + net_->storages[s].bus, col0 + lay_.ps(s), 1.0);
    }
    if (net_->ref_bus >= 0) {
        trip.emplace_back(row0 + 2 * lay_.n_own, col0 + lay_.theta(net_->ref_bus), 1.0);
    }
}

void OpfStage::ineq_jacobian(const Eigen::VectorXd& xs, int row0, int col0,
                             std::vector<Eigen::Triplet<double>>& trip) const {
    int r = row0;
    for (int i = 0; i < lay_.n_own; ++i, ++r) trip.emplace_back(r, col0 + lay_.v(i), -1.0);
    for (int i = 0; i < lay_.n_own; ++i, ++r) trip.emplace_back(r, col0 + lay_.v(i), 1.0);
    for (int g = 0; g < lay_.n_gen; ++g, ++r) trip.emplace_back(r, col0 + lay_.pg(g), -1.0);
    for (int g = 0; g < lay_.n_gen; ++g, ++r) trip.emplace_back(r, col0 + lay_.pg(g), 1.0);
    for (int g = 0; g < lay_.n_gen; ++g, ++r) trip.emplace_back(r, col0 + lay_.qg(g), -1.0);
    for (int g = 0; g < lay_.n_gen; ++g, ++r) trip.emplace_back(r, col0 + lay_.qg(g), 1.0);
    for (int s = 0; s < lay_.n_sto; ++s, ++r) trip.emplace_back(r, col0 + lay_.ps(s), -1.0);
    for (int s = 0; s < lay_.n_sto; ++s, ++r) trip.emplace_back(r, col0 + lay_.ps(s), 1.0);
    for (int s = 0; s < lay_.n_sto; ++s, ++r) trip.emplace_back(r, col0 + lay_.e(s), -1.0);
    for (int s = 0; s < lay_.n_sto; ++s, ++r) trip.emplace_back(r, col0 + lay_.e(s), 1.0);
    for (int g = 0; g < lay_.n_gen; ++g, ++r) trip.emplace_back(r, col0 + lay_.dpg(g), -1.0);
    for (int g = 0; g < lay_.n_gen; ++g, ++r) trip.emplace_back(r, col0 + lay_.dpg(g), 1.0);

    if (!limited_.empty()) {
        const Eigen::VectorXd theta = xs.segment(lay_.off_theta, lay_.n_bus);
        const Eigen::VectorXd v = xs.segment(lay_.off_v, lay_.n_bus);
        for (int a : limited_) {
            const auto& br = net_->branches[a];
            const int idx[4] = {lay_.theta(br.from), lay_.theta(br.to), lay_.v(br.from),
                                lay_.v(br.to)};
            const FlowEndDerivatives df = flow_end_derivatives(theta, v, br, true);
            for (int c = 0; c < 4; ++c)
                if (df.grad[c] != 0.0) trip.emplace_back(r, col0 + idx[c], df.grad[c]);
            ++r;
            const FlowEndDerivatives dt = flow_end_derivatives(theta, v, br, false);
            for (int c = 0; c < 4; ++c)
                if (dt.grad[c] != 0.0) trip.emplace_back(r, col0 + idx[c], dt.grad[c]);
            ++r;
        }
    }
}

void OpfStage::lagrangian_hessian(const Eigen::VectorXd& xs, double sigma,
                                  const Eigen::VectorXd& y_eq_stage,
                                  const Eigen::VectorXd& z_ineq_stage, int col0,
                                  std::vector<Eigen::Triplet<double>>& trip) const {
    const Eigen::VectorXd theta = xs.segment(lay_.off_theta, lay_.n_bus);
    const Eigen::VectorXd v = xs.segment(lay_.off_v, lay_.n_bus);

    // balance-row multipliers padded with zeros over copy buses
    Eigen::VectorXd lp = Eigen::VectorXd::Zero(lay_.n_bus);
    Eigen::VectorXd lq = Eigen::VectorXd::Zero(lay_.n_bus);
    lp.head(lay_.n_own) = y_eq_stage.head(lay_.n_own);
    lq.head(lay_.n_own) = y_eq_stage.segment(lay_.n_own, lay_.n_own);
    const Eigen::SparseMatrix<double> hinj = injection_hessian(theta, v, net_->ybus, lp, lq);
    for (int k = 0; k < hinj.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(hinj, k); it; ++it) {
            trip.emplace_back(col0 + it.row(), col0 + it.col(), it.value());
        }
    }

    if (sigma != 0.0) {
        for (int g = 0; g < lay_.n_gen; ++g) {
            const double h = sigma * 2.0 * net_->gens[g].a2;
            if (h != 0.0) trip.emplace_back(col0 + lay_.pg(g), col0 + lay_.pg(g), h);
        }
    }

    if (!limited_.empty()) {
        const int flow_row0 = 2 * lay_.n_own + 6 * lay_.n_gen + 4 * lay_.n_sto;
        int fr = flow_row0;
        for (int a : limited_) {
            const auto& br = net_->branches[a];
            const int idx[4] = {lay_.theta(br.from), lay_.theta(br.to), lay_.v(br.from),
                                lay_.v(br.to)};
            for (int end = 0; end < 2; ++end, ++fr) {
                const double w = z_ineq_stage[fr];
                if (w == 0.0) continue;
                const FlowEndDerivatives d = flow_end_derivatives(theta, v, br, end == 0);
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        if (d.hess(i, j) != 0.0)
                            trip.emplace_back(col0 + idx[i], col0 + idx[j], w * d.hess(i, j));
            }
        }
    }
}

Eigen::VectorXd OpfStage::flat_start() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(lay_.n_vars);
    for (int i = 0; i < lay_.n_bus; ++i) x[lay_.v(i)] = 1.0;
    for (int i = 0; i < lay_.n_own; ++i) {
        x[lay_.v(i)] = std::clamp(1.0, net_->v_min[i], net_->v_max[i]);
    }
    for (int g = 0; g < lay_.n_gen; ++g) {
        const auto& gen = net_->gens[g];
        x[lay_.pg(g)] = std::clamp(gen.pg0, gen.p_min, gen.p_max);
        x[lay_.qg(g)] = 0.5 * (gen.q_min + gen.q_max);
        x[lay_.dpg(g)] = std::clamp(0.0, gen.ramp_min, gen.ramp_max);
    }
    for (int s = 0; s < lay_.n_sto; ++s) {
        const auto& sto = net_->storages[s];
        x[lay_.ps(s)] = std::clamp(0.0, sto.p_box(period_ - 1, 0), sto.p_box(period_ - 1, 1));
        x[lay_.e(s)] = std::clamp(sto.e0, sto.e_min, sto.e_max);
    }
    return x;
}

// ---------------------------------------------------------------------------
// MultiPeriodOpf

MultiPeriodOpf::MultiPeriodOpf(AreaNetwork net, int n_k, double dt_hours)
    : net_(std::move(net)), n_k_(n_k), dt_(dt_hours) {
    stages_.reserve(n_k_);
    for (int k = 1; k <= n_k_; ++k) stages_.emplace_back(net_, k);
    n_stage_vars_ = stages_[0].layout().n_vars;
    n_stage_eq_total_ = 0;
    for (const auto& st : stages_) n_stage_eq_total_ += st.num_eq();
}

int MultiPeriodOpf::num_vars() const { return n_k_ * n_stage_vars_; }

int MultiPeriodOpf::num_eq() const {
    return n_stage_eq_total_ + n_k_ * (net_.n_sto() + net_.n_gen());
}

int MultiPeriodOpf::num_ineq() const {
    int m = 0;
    for (const auto& st : stages_) m += st.num_ineq();
    return m;
}

double MultiPeriodOpf::objective(const Eigen::VectorXd& x) const {
    double c = 0.0;
    for (int k = 1; k <= n_k_; ++k)
        c += stages_[k - 1].cost(x.segment(stage_offset(k), n_stage_vars_));
    return c;
}

Eigen::VectorXd MultiPeriodOpf::objective_grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(num_vars());
    for (int k = 1; k <= n_k_; ++k) {
        Eigen::VectorXd gs = Eigen::VectorXd::Zero(n_stage_vars_);
        stages_[k - 1].add_cost_grad(x.segment(stage_offset(k), n_stage_vars_), 1.0, gs);
        g.segment(stage_offset(k), n_stage_vars_) = gs;
    }
    return g;
}

Eigen::VectorXd MultiPeriodOpf::eq_constraints(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r(num_eq());
    int row = 0;
    for (int k = 1; k <= n_k_; ++k) {
        const auto rs = stages_[k - 1].eq(x.segment(stage_offset(k), n_stage_vars_));
        r.segment(row, rs.size()) = rs;
        row += static_cast<int>(rs.size());
    }
    const StageLayout& lay = stages_[0].layout();
    for (int k = 1; k <= n_k_; ++k) {
        for (int s = 0; s < lay.n_sto; ++s, ++row) {
            const double e_k = x[stage_offset(k) + lay.e(s)];
            const double ps_k = x[stage_offset(k) + lay.ps(s)];
            const double e_prev =
                (k == 1) ? net_.storages[s].e0 : x[stage_offset(k - 1) + lay.e(s)];
            r[row] = e_k - e_prev - dt_ * ps_k;
        }
    }
    for (int k = 1; k <= n_k_; ++k) {
        for (int g = 0; g < lay.n_gen; ++g, ++row) {
            const double pg_k = x[stage_offset(k) + lay.pg(g)];
            const double dpg_k = x[stage_offset(k) + lay.dpg(g)];
            const double pg_prev =
                (k == 1) ? net_.gens[g].pg0 : x[stage_offset(k - 1) + lay.pg(g)];
            r[row] = pg_k - pg_prev - dpg_k;
        }
    }
    return r;
}

Eigen::VectorXd MultiPeriodOpf::ineq_constraints(const Eigen::VectorXd& x) const {
    Eigen::VectorXd h(num_ineq());
    int row = 0;
    for (int k = 1; k <= n_k_; ++k) {
        const auto hs = stages_[k - 1].ineq(x.segment(stage_offset(k), n_stage_vars_));
        h.segment(row, hs.size()) = hs;
        row += static_cast<int>(hs.size());
    }
    return h;
}

Eigen::SparseMatrix<double> MultiPeriodOpf::eq_jacobian(const Eigen::VectorXd& x) const {
    std::vector<Eigen::Triplet<double>> trip;
    int row = 0;
    for (int k = 1; k <= n_k_; ++k) {
        stages_[k - 1].eq_jacobian(x.segment(stage_offset(k), n_stage_vars_), row,
                                   stage_offset(k), trip);
        row += stages_[k - 1].num_eq();
    }
    const StageLayout& lay = stages_[0].layout();
    for (int k = 1; k <= n_k_; ++k) {
        for (int s = 0; s < lay.n_sto; ++s, ++row) {
            trip.emplace_back(row, stage_offset(k) + lay.e(s), 1.0);
            trip.emplace_back(row, stage_offset(k) + lay.ps(s), -dt_);
            if (k > 1) trip.emplace_back(row, stage_offset(k - 1) + lay.e(s), -1.0);
        }
    }
    for (int k = 1; k <= n_k_; ++k) {
        for (int g = 0; g < lay.n_gen; ++g, ++row) {
            trip.emplace_back(row, stage_offset(k) + lay.pg(g), 1.0);
            trip.emplace_back(row, stage_offset(k) + lay.dpg(g), -1.0);
            if (k > 1) trip.emplace_back(row, stage_offset(k - 1) + lay.pg(g), -1.0);
        }
    }
    Eigen::SparseMatrix<double> j(num_eq(), num_vars());
    j.setFromTriplets(trip.begin(), trip.end());
    return j;
}

Eigen::SparseMatrix<double> MultiPeriodOpf::ineq_jacobian(const Eigen::VectorXd& x) const {
    std::vector<Eigen::Triplet<double>> trip;
    int row = 0;
    for (int k = 1; k <= n_k_; ++k) {
        stages_[k - 1].ineq_jacobian(x.segment(stage_offset(k), n_stage_vars_), row,
                                     stage_offset(k), trip);
        row += stages_[k - 1].num_ineq();
    }
    Eigen::SparseMatrix<double> j(num_ineq(), num_vars());
    j.setFromTriplets(trip.begin(), trip.end());
    return j;
}

Eigen::SparseMatrix<double>
MultiPeriodOpf::lagrangian_hessian(const Eigen::VectorXd& x, double sigma,
                                   const Eigen::VectorXd& y_eq,
                                   const Eigen::VectorXd& y_ineq) const {
    std::vector<Eigen::Triplet<double>> trip;
    int erow = 0, irow = 0;
    for (int k = 1; k <= n_k_; ++k) {
        const auto& st = stages_[k - 1];
        st.lagrangian_hessian(x.segment(stage_offset(k), n_stage_vars_), sigma,
                              y_eq.segment(erow, st.num_eq()),
                              y_ineq.segment(irow, st.num_ineq()), stage_offset(k), trip);
        erow += st.num_eq();
        irow += st.num_ineq();
    }
    // temporal rows are linear: no curvature
    Eigen::SparseMatrix<double> h(num_vars(), num_vars());
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
}

Eigen::VectorXd MultiPeriodOpf::initial_point() const {
    Eigen::VectorXd x(num_vars());
    for (int k = 1; k <= n_k_; ++k)
        x.segment(stage_offset(k), n_stage_vars_) = stages_[k - 1].flat_start();
    return x;
}

StageValues MultiPeriodOpf::stage_values(const Eigen::VectorXd& x, int k) const {
    return unpack_stage(stages_[0].layout(), x.segment(stage_offset(k), n_stage_vars_));
}

// ---------------------------------------------------------------------------
// SinglePeriodOpf

SinglePeriodOpf::SinglePeriodOpf(const AreaNetwork* net, int period, double dt_hours,
                                 Eigen::VectorXd e_init, Eigen::VectorXd pg_init)
    : net_(net), stage_(*net, period), period_(period), dt_(dt_hours),
      e_init_(std::move(e_init)), pg_init_(std::move(pg_init)) {}

int SinglePeriodOpf::num_vars() const { return stage_.layout().n_vars; }

int SinglePeriodOpf::num_eq() const {
    const auto& lay = stage_.layout();
    return stage_.num_eq() + (has_init_rows() ? lay.n_sto + lay.n_gen : 0);
}

int SinglePeriodOpf::num_ineq() const { return stage_.num_ineq(); }

double SinglePeriodOpf::objective(const Eigen::VectorXd& x) const { return stage_.cost(x); }

Eigen::VectorXd SinglePeriodOpf::objective_grad(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(num_vars());
    stage_.add_cost_grad(x, 1.0, g);
    return g;
}

Eigen::VectorXd SinglePeriodOpf::eq_constraints(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r(num_eq());
    r.head(stage_.num_eq()) = stage_.eq(x);
    if (has_init_rows()) {
        const auto& lay = stage_.layout();
        int row = stage_.num_eq();
        for (int s = 0; s < lay.n_sto; ++s, ++row)
            r[row] = x[lay.e(s)] - dt_ * x[lay.ps(s)] - e_init_[s];
        for (int g = 0; g < lay.n_gen; ++g, ++row)
            r[row] = x[lay.pg(g)] - x[lay.dpg(g)] - pg_init_[g];
    }
    return r;
}

Eigen::VectorXd SinglePeriodOpf::ineq_constraints(const Eigen::VectorXd& x) const {
    return stage_.ineq(x);
}

Eigen::SparseMatrix<double> SinglePeriodOpf::eq_jacobian(const Eigen::VectorXd& x) const {
    std::vector<Eigen::Triplet<double>> trip;
    stage_.eq_jacobian(x, 0, 0, trip);
    if (has_init_rows()) {
        const auto& lay = stage_.layout();
        int row = stage_.num_eq();
        for (int s = 0; s < lay.n_sto; ++s, ++row) {
            trip.emplace_back(row, lay.e(s), 1.0);
            trip.emplace_back(row, lay.ps(s), -dt_);
        }
        for (int g = 0; g < lay.n_gen; ++g, ++row) {
            trip.emplace_back(row, lay.pg(g), 1.0);
            trip.emplace_back(row, lay.dpg(g), -1.0);
        }
    }
    Eigen::SparseMatrix<double> j(num_eq(), num_vars());
    j.setFromTriplets(trip.begin(), trip.end());
    return j;
}

Eigen::SparseMatrix<double> SinglePeriodOpf::ineq_jacobian(const Eigen::VectorXd& x) const {
    std::vector<Eigen::Triplet<double>> trip;
    stage_.ineq_jacobian(x, 0, 0, trip);
    Eigen::SparseMatrix<double> j(num_ineq(), num_vars());
    j.setFromTriplets(trip.begin(), trip.end());
    return j;
}

Eigen::SparseMatrix<double>
SinglePeriodOpf::lagrangian_hessian(const Eigen::VectorXd& x, double sigma,
                                    const Eigen::VectorXd& y_eq,
                                    const Eigen::VectorXd& y_ineq) const {
    std::vector<Eigen::Triplet<double>> trip;
    stage_.lagrangian_hessian(x, sigma, y_eq.head(stage_.num_eq()), y_ineq, 0, trip);
    Eigen::SparseMatrix<double> h(num_vars(), num_vars());
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
}

Eigen::VectorXd SinglePeriodOpf::initial_point() const { return stage_.flat_start(); }

std::unique_ptr<MultiPeriodOpf> assemble_mpopf(const UnionNetwork& u, const ItdCase& c) {
    return std::make_unique<MultiPeriodOpf>(u.net, c.horizon, c.dt_hours);
}

} // namespace itdflex
