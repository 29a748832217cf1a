#pragma once

#include <map>
#include <string>
#include <vector>

#include "itdflex/aladin/solver.hpp"
#include "itdflex/net/scenario.hpp"

namespace itdflex {

enum class DispatchMode { Isolated, Centralized, Distributed };

const char* to_string(DispatchMode m);
DispatchMode dispatch_mode_from_string(const std::string& s);

/// Measured plant quantities at a wall-clock step, ordered like the
/// AreaNetwork models (native storages first, then envelope devices per PCC).
struct PlantState {
    int step = 0;
    std::vector<Eigen::VectorXd> e;  // per area, per storage device
    std::vector<Eigen::VectorXd> pg; // per area, per generator
};

/// Per-area values of one period of a dispatch solution (own buses only;
/// consensus copies are averaged into the owner's slot before reporting).
struct AreaPeriodValues {
    Eigen::VectorXd theta, v, pg, qg, ps, e, dpg;
};

struct DispatchResult {
    DispatchMode mode = DispatchMode::Centralized;
    double total_objective = 0.0;
    std::vector<double> area_objective;                 // case area order
    std::vector<std::vector<AreaPeriodValues>> values;  // [area][k-1]
    bool converged = false;
    int iterations = 0;       // ALADIN iterations or max NLP iterations
    double max_balance_residual = 0.0;
    IterationTrace trace;     // distributed mode only

    // raw solver state, kept for receding-horizon warm shifts
    std::vector<Eigen::VectorXd> primal_raw; // centralized: one entry; isolated: per area
    DistributedSolution dist_raw;
};

/// Case with the load series of every covered bus replaced by the scenario
/// forecast window [t, t + horizon); buses the scenario does not cover carry
/// zero load in closed-loop experiments.
ItdCase make_window_case(const ItdCase& c, const ScenarioSeries& scenario, int t);

/// One-shot horizon dispatch in the given mode (the open-loop experiment).
/// `plant` overrides the initial states when given.
DispatchResult solve_dispatch(const ItdCase& c, const EnvelopeMap& envelopes, DispatchMode mode,
                              const AladinParams& params, const PlantState* plant = nullptr,
                              const AladinWarmStart* warm_dist = nullptr,
                              const std::vector<Eigen::VectorXd>* warm_primal = nullptr);

struct StepRecord {
    int step = 0;
    double realized_cost = 0.0;              // generation cost at the realized outputs
    std::vector<double> area_cost;
    std::vector<Eigen::VectorXd> ps_applied; // first inputs per area
    std::vector<Eigen::VectorXd> dpg_applied;
    std::vector<Eigen::VectorXd> pg;         // realized outputs after the step
    std::vector<Eigen::VectorXd> e;          // realized energies after the step
    double forecast_demand = 0.0;            // system net demand totals at t
    double actual_demand = 0.0;
    int iterations = 0;
    double primal_spatial = 0.0, primal_temporal = 0.0, dual = 0.0;
    double max_balance_residual = 0.0;
    double plan_deviation = 0.0; // vs. the previous solve's second-period plan; 0 at t=0
    double wall_ms = 0.0;
};

struct SimTrace {
    std::string case_name;
    DispatchMode mode = DispatchMode::Distributed;
    std::vector<std::string> area_ids;
    std::vector<std::vector<std::string>> gen_ids; // per area
    std::vector<std::vector<std::string>> sto_ids;
    std::vector<StepRecord> steps;

    double total_cost() const;
    double plan_consistency_max() const; // max plan deviation over steps >= 1
    int max_mismatch_step() const;       // argmax |actual - forecast|
};

struct ClosedLoopOptions {
    DispatchMode mode = DispatchMode::Distributed;
    int steps = 8;
    AladinParams params;
    bool record_walltime = false;
};

/// E <- E + dt*Ps, Pg <- Pg + dPg with hard bound checks; throws SolverError
/// naming the violated bound (an applied input outside its box means the
/// envelope or solver failed, which the simulation must surface, not mask).
PlantState step_plant(const PlantState& state, const std::vector<Eigen::VectorXd>& ps_first,
                      const std::vector<Eigen::VectorXd>& dpg_first,
                      const std::vector<AreaNetwork>& nets, double dt);

/// Receding-horizon shift: drop the first period, duplicate the last primal
/// block, zero the freed dual blocks.
AladinWarmStart warm_shift(const DistributedSolution& sol, const CouplingStructure& cs);
Eigen::VectorXd warm_shift_primal(const Eigen::VectorXd& x, int n_k, int stage_vars);

/// Full closed loop: per step, re-slice the forecast window, recompute
/// envelopes, dispatch in the selected mode, apply the first inputs against
/// the actual series, advance the plant and warm-shift.
SimTrace run_closed_loop(const ItdCase& c, const ScenarioSeries& scenario,
                         const ClosedLoopOptions& opt);

} // namespace itdflex
