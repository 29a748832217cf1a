#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace itdflex {

// All quantities are per-unit on ItdCase::base_mva (voltages p.u., feeder
// voltage bounds in squared magnitude p.u.^2, energies p.u.*h). Bus ids are
// 1..n_bus within each feeder / area, feeder bus 1 being the slack.

struct FeederLine {
    int from = 0; // head bus
    int to = 0;   // tail bus
    double r = 0.0;
    double x = 0.0;
};

struct EssUnit {
    std::string id;
    int bus = 0;
    double p_min = 0.0, p_max = 0.0; // charging power box, consumption-positive
    double e_min = 0.0, e_max = 0.0; // stored energy box
    double e0 = 0.0;                 // initial stored energy
};

struct RadialFeeder {
    std::string id;
    int n_bus = 0;
    std::vector<FeederLine> lines;
    std::vector<EssUnit> ess;
    Eigen::MatrixXd p_load; // n_bus x n_periods
    Eigen::MatrixXd q_load; // n_bus x n_periods
    Eigen::VectorXd u_min;  // squared-voltage lower bound per bus
    Eigen::VectorXd u_max;

    int n_line() const { return static_cast<int>(lines.size()); }
    int n_ess() const { return static_cast<int>(ess.size()); }
    int n_periods() const { return static_cast<int>(p_load.cols()); }
};

struct AreaBus {
    int id = 0;
    double v_min = 0.9, v_max = 1.1;
    Eigen::VectorXd p_load; // per period (length = case horizon)
    Eigen::VectorXd q_load;
};

struct Branch {
    int from = 0, to = 0;
    double r = 0.0, x = 0.0;
    double b_charge = 0.0; // total line charging susceptance
    double s_max = 0.0;    // apparent-flow limit; <= 0 means unlimited
};

struct Generator {
    std::string id;
    int bus = 0;
    double a0 = 0.0, a1 = 0.0, a2 = 0.0; // cost a2*Pg^2 + a1*Pg + a0 per period
    double p_min = 0.0, p_max = 0.0;
    double q_min = 0.0, q_max = 0.0;
    double ramp_min = 0.0, ramp_max = 0.0; // bounds on per-period change
    double pg0 = 0.0;                      // output before the first period
};

// Transmission-native storage device (constant power box). Devices coming
// from feeder envelopes are materialized at dispatch-assembly time instead.
struct StorageUnit {
    std::string id;
    int bus = 0;
    double p_min = 0.0, p_max = 0.0;
    double e_min = 0.0, e_max = 0.0;
    double e0 = 0.0;
};

struct PccAttachment {
    int bus = 0;
    std::string feeder_id;
};

struct TransmissionArea {
    std::string id;
    std::vector<AreaBus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> gens;
    std::vector<StorageUnit> storages;
    std::vector<PccAttachment> pccs;
    int ref_bus = 1;

    int n_bus() const { return static_cast<int>(buses.size()); }
};

struct TieLine {
    std::string area_a;
    int bus_a = 0;
    std::string area_b;
    int bus_b = 0;
    double r = 0.0, x = 0.0;
    double b_charge = 0.0;
    double s_max = 0.0;
};

struct ItdCase {
    int schema_version = 1;
    std::string name;
    double base_mva = 100.0;
    int horizon = 1;        // N_k
    double dt_hours = 1.0;  // period length
    std::vector<TransmissionArea> areas;
    std::vector<TieLine> tie_lines;
    std::vector<RadialFeeder> feeders;

    const TransmissionArea* find_area(const std::string& id) const;
    const RadialFeeder* find_feeder(const std::string& id) const;
};

/// Checks every structural invariant of an already-populated case and throws
/// ValidationError naming the violated invariant and element. load_case runs
/// this automatically; programmatically built cases can call it directly.
void validate_case(const ItdCase& c);

} // namespace itdflex
