#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "itdflex/net/case.hpp"

namespace itdflex {

/// Forecast/actual net-demand series per (area|feeder, bus), resolved from a
/// scenario CSV. Solar and wind enter as negative demand at ingestion, so a
/// consumer only ever sees net active power.
struct ScenarioSeries {
    struct BusSeries {
        Eigen::VectorXd p_forecast, p_actual; // net active demand
        Eigen::VectorXd q_forecast, q_actual;
    };
    using Key = std::pair<std::string, int>; // (entity id, bus)

    int n_steps = 0;
    std::map<Key, BusSeries> area_buses;   // keyed by (area id, bus)
    std::map<Key, BusSeries> feeder_buses; // keyed by (feeder id, bus)

    // Zero series for buses the scenario does not cover.
    double area_p(const std::string& area, int bus, int step, bool actual) const;
    double area_q(const std::string& area, int bus, int step, bool actual) const;
    double feeder_p(const std::string& feeder, int bus, int step, bool actual) const;
    double feeder_q(const std::string& feeder, int bus, int step, bool actual) const;
};

/// Reads a scenario CSV (docs/scenario-format.md):
///   step,entity_kind,entity_id,bus,field,forecast,actual
/// entity_kind in {area,feeder}; field in {p_load,q_load,p_solar,p_wind}.
/// Every declared (entity,bus,field) series must cover steps 0..T-1 exactly.
/// Throws ParseError / ValidationError with the offending row or id.
ScenarioSeries load_scenario(const std::string& path, const ItdCase& c);

ScenarioSeries parse_scenario(const std::string& csv_text, const ItdCase& c);

} // namespace itdflex
