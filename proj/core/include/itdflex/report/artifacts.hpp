#pragma once

#include <cstdint>
#include <string>

#include "itdflex/aladin/solver.hpp"
#include "itdflex/rhc/sim.hpp"

namespace itdflex {

/// FNV-1a 64-bit over the canonical config string; embedded in every output.
std::uint64_t fnv1a_hash(const std::string& text);
std::string hash_hex(std::uint64_t h);

/// Stamp placed at the top of CSV outputs / inside JSON outputs so a run's
/// provenance travels with its files.
struct RunStamp {
    int schema_version = 1;
    std::string config_hash; // hex
    std::uint64_t seed = 0;

    std::string csv_comment() const;
};

/// Solver parameter file (JSON): {"aladin": {...}, "nlp": {...}}; missing
/// fields keep their documented defaults.
AladinParams load_params(const std::string& path);
AladinParams parse_params(const std::string& json_text);
std::string params_to_json(const AladinParams& p);

/// iter,primal_spatial,primal_temporal,dual,objective,wall_ms
std::string trace_to_csv(const IterationTrace& trace, const RunStamp& stamp);

/// step,cost,pg_<id>...,dpg_<id>...,ps_<id>...,e_<id>... for one area.
std::string sim_area_csv(const SimTrace& trace, int area, const RunStamp& stamp);

/// step,total_cost,forecast_demand,actual_demand,mismatch,iterations,
/// primal_spatial,primal_temporal,dual,balance_residual,plan_deviation,wall_ms
std::string sim_aggregate_csv(const SimTrace& trace, const RunStamp& stamp);

/// area,cost rows plus a total row (total equals the sum of the entries).
std::string cost_table_csv(const std::vector<std::string>& area_ids,
                           const std::vector<double>& area_cost, const RunStamp& stamp);

std::string sim_summary_json(const SimTrace& trace, const RunStamp& stamp);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace itdflex
