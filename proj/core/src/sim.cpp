#include "itdflex/rhc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "itdflex/errors.hpp"

namespace itdflex {

const char* to_string(DispatchMode m) {
    switch (m) {
    case DispatchMode::Isolated: return "isolated";
    case DispatchMode::Centralized: return "centralized";
    case DispatchMode::Distributed: return "distributed";
    }
    return "?";
}

DispatchMode dispatch_mode_from_string(const std::string& s) {
    if (s == "isolated") return DispatchMode::Isolated;
    if (s == "centralized") return DispatchMode::Centralized;
    if (s == "distributed") return DispatchMode::Distributed;
    throw ValidationError("unknown dispatch mode '" + s + "'");
}

double SimTrace::total_cost() const {
    double c = 0.0;
    for (const auto& s : steps) c += s.realized_cost;
    return c;
}

double SimTrace::plan_consistency_max() const {
    double d = 0.0;
    for (std::size_t i = 1; i < steps.size(); ++i) d = std::max(d, steps[i].plan_deviation);
    return d;
}

int SimTrace::max_mismatch_step() const {
    int arg = 0;
    double best = -1.0;
    for (const auto& s : steps) {
        const double m = std::abs(s.actual_demand - s.forecast_demand);
        if (m > best) {
            best = m;
            arg = s.step;
        }
    }
    return arg;
}

ItdCase make_window_case(const ItdCase& c, const ScenarioSeries& scenario, int t) {
    if (t + c.horizon > scenario.n_steps) {
        throw ValidationError("scenario too short: window [" + std::to_string(t) + ", " +
                              std::to_string(t + c.horizon) + ") exceeds " +
                              std::to_string(scenario.n_steps) + " steps");
    }
    ItdCase w = c;
    for (auto& a : w.areas) {
        for (auto& b : a.buses) {
            b.p_load.setZero(c.horizon);
            b.q_load.setZero(c.horizon);
            for (int k = 0; k < c.horizon; ++k) {
                b.p_load[k] = scenario.area_p(a.id, b.id, t + k, false);
                b.q_load[k] = scenario.area_q(a.id, b.id, t + k, false);
            }
        }
    }
    for (auto& f : w.feeders) {
        f.p_load.setZero(f.n_bus, c.horizon);
        f.q_load.setZero(f.n_bus, c.horizon);
        for (int b = 1; b <= f.n_bus; ++b) {
            for (int k = 0; k < c.horizon; ++k) {
                f.p_load(b - 1, k) = scenario.feeder_p(f.id, b, t + k, false);
                f.q_load(b - 1, k) = scenario.feeder_q(f.id, b, t + k, false);
            }
        }
    }
    return w;
}

namespace {

void override_initial_state(std::vector<AreaNetwork>& nets, const PlantState& plant) {
    for (std::size_t a = 0; a < nets.size(); ++a) {
        if (plant.e[a].size() != nets[a].n_sto() || plant.pg[a].size() != nets[a].n_gen()) {
            throw ValidationError("plant state dimensions do not match area '" +
                                  nets[a].area_id + "'");
        }
        for (int s = 0; s < nets[a].n_sto(); ++s) nets[a].storages[s].e0 = plant.e[a][s];
        for (int g = 0; g < nets[a].n_gen(); ++g) nets[a].gens[g].pg0 = plant.pg[a][g];
    }
}

AreaPeriodValues take_values(const StageLayout& lay, const Eigen::VectorXd& xs, int bus0,
                             int n_bus_take, int gen0, int n_gen_take, int sto0,
                             int n_sto_take) {
    AreaPeriodValues v;
    v.theta = xs.segment(lay.off_theta + bus0, n_bus_take);
    v.v = xs.segment(lay.off_v + bus0, n_bus_take);
    v.pg = xs.segment(lay.off_pg + gen0, n_gen_take);
    v.qg = xs.segment(lay.off_qg + gen0, n_gen_take);
    v.ps = xs.segment(lay.off_ps + sto0, n_sto_take);
    v.e = xs.segment(lay.off_e + sto0, n_sto_take);
    v.dpg = xs.segment(lay.off_dpg + gen0, n_gen_take);
    return v;
}

double stage_cost_of(const AreaNetwork& net, const Eigen::VectorXd& pg) {
    double c = 0.0;
    for (int g = 0; g < net.n_gen(); ++g) {
        c += net.gens[g].a2 * pg[g] * pg[g] + net.gens[g].a1 * pg[g] + net.gens[g].a0;
    }
    return c;
}

} // namespace

DispatchResult solve_dispatch(const ItdCase& c, const EnvelopeMap& envelopes, DispatchMode mode,
                              const AladinParams& params, const PlantState* plant,
                              const AladinWarmStart* warm_dist,
                              const std::vector<Eigen::VectorXd>* warm_primal) {
    const int n_k = c.horizon;
    const int na = static_cast<int>(c.areas.size());
    DispatchResult out;
    out.mode = mode;
    out.area_objective.assign(na, 0.0);
    out.values.assign(na, std::vector<AreaPeriodValues>(n_k));

    if (mode == DispatchMode::Distributed) {
        std::vector<AreaNetwork> nets = build_area_networks(c, envelopes, false);
        if (plant) override_initial_state(nets, *plant);
        AladinSolver solver(std::move(nets), n_k, c.dt_hours, params);
        DistributedSolution sol = solver.solve(warm_dist);
        if (!sol.converged) {
            throw SolverError("distributed dispatch hit the iteration limit (" +
                              std::to_string(sol.iterations) + " iterations, dual residual " +
                              std::to_string(sol.trace.records.empty()
                                                 ? -1.0
                                                 : sol.trace.records.back().dual) +
                              ")");
        }
        const auto& nets_ref = solver.nets();
        for (int a = 0; a < na; ++a) {
            const StageLayout lay = StageLayout::make(nets_ref[a]);
            for (int k = 1; k <= n_k; ++k) {
                const auto& xs = sol.x[solver.couplings().block_index(k, a)];
                out.values[a][k - 1] = take_values(lay, xs, 0, nets_ref[a].n_own, 0,
                                                   nets_ref[a].n_gen(), 0, nets_ref[a].n_sto());
                out.area_objective[a] += stage_cost_of(nets_ref[a], out.values[a][k - 1].pg);
            }
        }
        // average consensus copies into the owner's reported slot
        for (int k = 1; k <= n_k; ++k) {
            const auto& rows = solver.couplings().spatial_rows;
            for (const auto& row : rows) {
                int owner = -1, copier = -1;
                for (int a = 0; a < na; ++a) {
                    if (nets_ref[a].area_id == row.owner) owner = a;
                    if (nets_ref[a].area_id == row.copier) copier = a;
                }
                int ci = -1;
                for (int i = 0; i < nets_ref[copier].n_copy(); ++i) {
                    if (nets_ref[copier].copies[i].area == row.owner &&
                        nets_ref[copier].copies[i].bus == row.bus) {
                        ci = nets_ref[copier].n_own + i;
                        break;
                    }
                }
                const StageLayout lay_c = StageLayout::make(nets_ref[copier]);
                const auto& xs_c = sol.x[solver.couplings().block_index(k, copier)];
                auto& vals = out.values[owner][k - 1];
                if (row.angle) {
                    const double copy_val = xs_c[lay_c.theta(ci)];
                    vals.theta[row.bus - 1] = 0.5 * (vals.theta[row.bus - 1] + copy_val);
                } else {
                    const double copy_val = xs_c[lay_c.v(ci)];
                    vals.v[row.bus - 1] = 0.5 * (vals.v[row.bus - 1] + copy_val);
                }
            }
        }
        // balance residuals of the first-period blocks (the applied point)
        double bal = 0.0;
        for (int a = 0; a < na; ++a) {
            const auto& blk = solver.block_problem(solver.couplings().block_index(1, a));
            const Eigen::VectorXd r =
                blk.eq_constraints(sol.x[solver.couplings().block_index(1, a)]);
            bal = std::max(bal, r.head(2 * nets_ref[a].n_own).lpNorm<Eigen::Infinity>());
        }
        out.max_balance_residual = bal;
        out.converged = true;
        out.iterations = sol.iterations;
        out.trace = sol.trace;
        out.dist_raw = std::move(sol);
    } else if (mode == DispatchMode::Centralized) {
        UnionNetwork u = build_union_network(c, envelopes);
        if (plant) {
            // map per-area plant state onto the union ordering
            int gi = 0, si = 0;
            for (int a = 0; a < na; ++a) {
                for (int g = 0; g < plant->pg[a].size(); ++g) u.net.gens[gi++].pg0 = plant->pg[a][g];
                for (int s = 0; s < plant->e[a].size(); ++s) u.net.storages[si++].e0 = plant->e[a][s];
            }
        }
        auto problem = assemble_mpopf(u, c);
        const Eigen::VectorXd x0 = (warm_primal && !warm_primal->empty() &&
                                    (*warm_primal)[0].size() == problem->num_vars())
                                       ? (*warm_primal)[0]
                                       : problem->initial_point();
        const NlpSolution sol = solve_nlp(*problem, x0, params.nlp);
        if (sol.status != NlpStatus::Optimal) {
            throw SolverError(std::string("centralized dispatch failed: ") + sol.message);
        }
        // per-area slices of the union solution
        std::vector<int> gen_off(na, 0), gen_cnt(na, 0), sto_off(na, 0), sto_cnt(na, 0);
        for (std::size_t i = 0; i < u.gen_origin.size(); ++i) {
            for (int a = 0; a < na; ++a)
                if (u.gen_origin[i].first == c.areas[a].id) gen_cnt[a]++;
        }
        for (std::size_t i = 0; i < u.sto_origin.size(); ++i) {
            for (int a = 0; a < na; ++a)
                if (u.sto_origin[i].first == c.areas[a].id) sto_cnt[a]++;
        }
        for (int a = 1; a < na; ++a) {
            gen_off[a] = gen_off[a - 1] + gen_cnt[a - 1];
            sto_off[a] = sto_off[a - 1] + sto_cnt[a - 1];
        }
        const StageLayout& lay = problem->stage_layout();
        for (int k = 1; k <= n_k; ++k) {
            const Eigen::VectorXd xs =
                sol.x.segment(problem->stage_offset(k), lay.n_vars);
            for (int a = 0; a < na; ++a) {
                out.values[a][k - 1] =
                    take_values(lay, xs, u.bus_offset.at(c.areas[a].id), c.areas[a].n_bus(),
                                gen_off[a], gen_cnt[a], sto_off[a], sto_cnt[a]);
                double cost = 0.0;
                for (int g = 0; g < gen_cnt[a]; ++g) {
                    const auto& gen = u.net.gens[gen_off[a] + g];
                    const double pg = out.values[a][k - 1].pg[g];
                    cost += gen.a2 * pg * pg + gen.a1 * pg + gen.a0;
                }
                out.area_objective[a] += cost;
            }
        }
        const Eigen::VectorXd r = problem->eq_constraints(sol.x);
        double bal = 0.0;
        int row = 0;
        for (int k = 1; k <= n_k; ++k) {
            bal = std::max(bal, r.segment(row, 2 * u.net.n_own).lpNorm<Eigen::Infinity>());
            row += 2 * u.net.n_own + (u.net.ref_bus >= 0 ? 1 : 0);
        }
        out.max_balance_residual = bal;
        out.converged = true;
        out.iterations = sol.iterations;
        out.primal_raw.push_back(sol.x);
    } else { // isolated
        std::vector<AreaNetwork> nets = build_area_networks(c, envelopes, true);
        if (plant) override_initial_state(nets, *plant);
        for (int a = 0; a < na; ++a) {
            MultiPeriodOpf problem(nets[a], n_k, c.dt_hours);
            const Eigen::VectorXd x0 = (warm_primal && static_cast<int>(warm_primal->size()) == na &&
                                        (*warm_primal)[a].size() == problem.num_vars())
                                           ? (*warm_primal)[a]
                                           : problem.initial_point();
            const NlpSolution sol = solve_nlp(problem, x0, params.nlp);
            if (sol.status != NlpStatus::Optimal) {
                throw SolverError("isolated dispatch failed for area '" + c.areas[a].id +
                                  "': " + sol.message);
            }
            for (int k = 1; k <= n_k; ++k) {
                const StageLayout lay = StageLayout::make(nets[a]);
                const Eigen::VectorXd xs =
                    sol.x.segment((k - 1) * lay.n_vars, lay.n_vars);
                out.values[a][k - 1] = take_values(lay, xs, 0, nets[a].n_own, 0,
                                                   nets[a].n_gen(), 0, nets[a].n_sto());
                out.area_objective[a] += stage_cost_of(nets[a], out.values[a][k - 1].pg);
            }
            const Eigen::VectorXd r = problem.eq_constraints(sol.x);
            int row = 0;
            for (int k = 1; k <= n_k; ++k) {
                out.max_balance_residual =
                    std::max(out.max_balance_residual,
                             r.segment(row, 2 * nets[a].n_own).lpNorm<Eigen::Infinity>());
                row += 2 * nets[a].n_own + (nets[a].ref_bus >= 0 ? 1 : 0);
            }
            out.iterations = std::max(out.iterations, sol.iterations);
            out.primal_raw.push_back(sol.x);
        }
        out.converged = true;
    }

    out.total_objective = 0.0;
    for (double v : out.area_objective) out.total_objective += v;
    return out;
}

PlantState step_plant(const PlantState& state, const std::vector<Eigen::VectorXd>& ps_first,
                      const std::vector<Eigen::VectorXd>& dpg_first,
                      const std::vector<AreaNetwork>& nets, double dt) {
    constexpr double kSlack = 1e-9;
    PlantState next = state;
    next.step = state.step + 1;
    for (std::size_t a = 0; a < nets.size(); ++a) {
        const auto& net = nets[a];
        for (int s = 0; s < net.n_sto(); ++s) {
            const double ps = ps_first[a][s];
            const auto& box = net.storages[s].p_box;
            if (ps < box(0, 0) - kSlack || ps > box(0, 1) + kSlack) {
                throw SolverError("applied storage input outside its envelope box: area '" +
                                  net.area_id + "' device '" + net.storages[s].id + "' value " +
                                  std::to_string(ps));
            }
            next.e[a][s] = state.e[a][s] + dt * ps;
            if (next.e[a][s] < net.storages[s].e_min - kSlack ||
                next.e[a][s] > net.storages[s].e_max + kSlack) {
                throw SolverError("storage energy left its bounds: area '" + net.area_id +
                                  "' device '" + net.storages[s].id + "' energy " +
                                  std::to_string(next.e[a][s]));
            }
        }
        for (int g = 0; g < net.n_gen(); ++g) {
            const double dpg = dpg_first[a][g];
            if (dpg < net.gens[g].ramp_min - kSlack || dpg > net.gens[g].ramp_max + kSlack) {
                throw SolverError("applied ramp outside its box: area '" + net.area_id +
                                  "' generator '" + net.gens[g].id + "' value " +
                                  std::to_string(dpg));
            }
            next.pg[a][g] = state.pg[a][g] + dpg;
            if (next.pg[a][g] < net.gens[g].p_min - kSlack ||
                next.pg[a][g] > net.gens[g].p_max + kSlack) {
                throw SolverError("generator output left its bounds: area '" + net.area_id +
                                  "' generator '" + net.gens[g].id + "' output " +
                                  std::to_string(next.pg[a][g]));
            }
        }
    }
    return next;
}

AladinWarmStart warm_shift(const DistributedSolution& sol, const CouplingStructure& cs) {
    AladinWarmStart w;
    const int na = cs.n_areas, nk = cs.n_k;
    w.x.resize(cs.n_blocks());
    for (int k = 1; k <= nk; ++k) {
        for (int a = 0; a < na; ++a) {
            const int src_k = std::min(k + 1, nk);
            w.x[cs.block_index(k, a)] = sol.x[cs.block_index(src_k, a)];
        }
    }
    w.lambda.resize(nk);
    for (int k = 0; k < nk; ++k) {
        w.lambda[k] = (k + 1 < nk) ? sol.lambda[k + 1]
                                   : Eigen::VectorXd::Zero(sol.lambda[k].size());
    }
    w.kappa.resize(na);
    for (int a = 0; a < na; ++a) {
        const int per_k = cs.temporal_rows_per_step[a];
        w.kappa[a] = Eigen::VectorXd::Zero(sol.kappa[a].size());
        // temporal blocks live at k = 2..nk; shift each one period earlier
        for (int k = 2; k < nk; ++k) {
            w.kappa[a].segment((k - 2) * per_k, per_k) =
                sol.kappa[a].segment((k - 1) * per_k, per_k);
        }
    }
    return w;
}

Eigen::VectorXd warm_shift_primal(const Eigen::VectorXd& x, int n_k, int stage_vars) {
    Eigen::VectorXd w(x.size());
    for (int k = 0; k < n_k; ++k) {
        const int src = std::min(k + 1, n_k - 1);
        w.segment(k * stage_vars, stage_vars) = x.segment(src * stage_vars, stage_vars);
    }
    return w;
}

SimTrace run_closed_loop(const ItdCase& c, const ScenarioSeries& scenario,
                         const ClosedLoopOptions& opt) {
    if (scenario.n_steps < opt.steps + c.horizon) {
        throw ValidationError("scenario covers " + std::to_string(scenario.n_steps) +
                              " steps; need " + std::to_string(opt.steps + c.horizon) +
                              " for " + std::to_string(opt.steps) + " simulation steps");
    }
    const int na = static_cast<int>(c.areas.size());

    SimTrace trace;
    trace.case_name = c.name;
    trace.mode = opt.mode;

    // plant state and id bookkeeping from the t=0 networks (defines the
    // canonical device ordering for the whole run)
    PlantState plant;
    {
        const ItdCase w0 = make_window_case(c, scenario, 0);
        EnvelopeMap envs;
        for (const auto& f : w0.feeders) envs.emplace(f.id, compute_envelope(f));
        const auto nets = build_area_networks(w0, envs, opt.mode == DispatchMode::Isolated);
        plant.step = 0;
        plant.e.resize(na);
        plant.pg.resize(na);
        for (int a = 0; a < na; ++a) {
            trace.area_ids.push_back(nets[a].area_id);
            std::vector<std::string> gids, sids;
            plant.e[a].resize(nets[a].n_sto());
            plant.pg[a].resize(nets[a].n_gen());
            for (int s = 0; s < nets[a].n_sto(); ++s) {
                plant.e[a][s] = nets[a].storages[s].e0;
                sids.push_back(nets[a].storages[s].id);
            }
            for (int g = 0; g < nets[a].n_gen(); ++g) {
                plant.pg[a][g] = nets[a].gens[g].pg0;
                gids.push_back(nets[a].gens[g].id);
            }
            trace.gen_ids.push_back(gids);
            trace.sto_ids.push_back(sids);
        }
    }

    AladinWarmStart warm_dist;
    bool have_warm_dist = false;
    std::vector<Eigen::VectorXd> warm_primal;
    std::vector<Eigen::VectorXd> planned_ps2(na), planned_dpg2(na);
    bool have_plan = false;

    AladinParams params = opt.params;
    params.record_walltime = opt.record_walltime;

    for (int t = 0; t < opt.steps; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        const ItdCase w = make_window_case(c, scenario, t);
        EnvelopeMap envs;
        for (const auto& f : w.feeders) envs.emplace(f.id, compute_envelope(f));

        DispatchResult res =
            solve_dispatch(w, envs, opt.mode, params, &plant,
                           have_warm_dist ? &warm_dist : nullptr,
                           warm_primal.empty() ? nullptr : &warm_primal);

        StepRecord rec;
        rec.step = t;
        rec.iterations = res.iterations;
        rec.max_balance_residual = res.max_balance_residual;
        if (!res.trace.records.empty()) {
            rec.primal_spatial = res.trace.records.back().primal_spatial;
            rec.primal_temporal = res.trace.records.back().primal_temporal;
            rec.dual = res.trace.records.back().dual;
        }

        // first inputs and plan-consistency bookkeeping
        rec.ps_applied.resize(na);
        rec.dpg_applied.resize(na);
        double plan_dev = 0.0;
        for (int a = 0; a < na; ++a) {
            rec.ps_applied[a] = res.values[a][0].ps;
            rec.dpg_applied[a] = res.values[a][0].dpg;
            if (have_plan) {
                if (planned_ps2[a].size() > 0)
                    plan_dev = std::max(
                        plan_dev,
                        (rec.ps_applied[a] - planned_ps2[a]).lpNorm<Eigen::Infinity>());
                plan_dev = std::max(
                    plan_dev, (rec.dpg_applied[a] - planned_dpg2[a]).lpNorm<Eigen::Infinity>());
            }
        }
        rec.plan_deviation = have_plan ? plan_dev : 0.0;
        if (c.horizon >= 2) {
            for (int a = 0; a < na; ++a) {
                planned_ps2[a] = res.values[a][1].ps;
                planned_dpg2[a] = res.values[a][1].dpg;
            }
            have_plan = true;
        }

        // apply the first inputs to the plant against the actual series
        {
            const auto nets = build_area_networks(w, envs, opt.mode == DispatchMode::Isolated);
            plant = step_plant(plant, rec.ps_applied, rec.dpg_applied, nets, c.dt_hours);
            rec.pg = plant.pg;
            rec.e = plant.e;
            rec.area_cost.assign(na, 0.0);
            for (int a = 0; a < na; ++a)
                rec.area_cost[a] = stage_cost_of(nets[a], plant.pg[a]);
        }
        rec.realized_cost = 0.0;
        for (double ac : rec.area_cost) rec.realized_cost += ac;

        // demand accounting: forecast vs actual net system load at t
        double fc = 0.0, ac = 0.0;
        for (const auto& a : c.areas) {
            for (const auto& b : a.buses) {
                fc += scenario.area_p(a.id, b.id, t, false);
                ac += scenario.area_p(a.id, b.id, t, true);
            }
        }
        for (const auto& f : c.feeders) {
            for (int b = 1; b <= f.n_bus; ++b) {
                fc += scenario.feeder_p(f.id, b, t, false);
                ac += scenario.feeder_p(f.id, b, t, true);
            }
        }
        rec.forecast_demand = fc;
        rec.actual_demand = ac;

        if (opt.record_walltime) {
            rec.wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
        }
        trace.steps.push_back(rec);

        // warm-shift for the next window
        if (opt.mode == DispatchMode::Distributed) {
            CouplingStructure cs = build_couplings(
                build_area_networks(w, envs, false), c.horizon, c.dt_hours);
            warm_dist = warm_shift(res.dist_raw, cs);
            have_warm_dist = true;
        } else {
            warm_primal.clear();
            for (const auto& x : res.primal_raw) {
                const int n_stage = static_cast<int>(x.size()) / c.horizon;
                warm_primal.push_back(warm_shift_primal(x, c.horizon, n_stage));
            }
        }
    }
    return trace;
}

} // namespace itdflex
