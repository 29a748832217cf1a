#include "itdflex/report/artifacts.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "itdflex/errors.hpp"

namespace itdflex {

using nlohmann::json;

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << h;
    return os.str();
}

std::string RunStamp::csv_comment() const {
    std::ostringstream os;
    os << "# schema_version=" << schema_version << " config_hash=" << config_hash
       << " seed=" << seed << "\n";
    return os.str();
}

AladinParams parse_params(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("params JSON: ") + e.what());
    }
    AladinParams p;
    if (j.contains("aladin")) {
        const auto& a = j.at("aladin");
        p.rho = a.value("rho", p.rho);
        p.mu1 = a.value("mu1", p.mu1);
        p.mu2 = a.value("mu2", p.mu2);
        p.eps = a.value("eps", p.eps);
        p.eps_active = a.value("eps_active", p.eps_active);
        p.hess_floor = a.value("hess_floor", p.hess_floor);
        p.max_iters = a.value("max_iters", p.max_iters);
        p.dual_damping = a.value("dual_damping", p.dual_damping);
        p.threads = a.value("threads", p.threads);
    }
    if (j.contains("nlp")) {
        const auto& n = j.at("nlp");
        p.nlp.tol = n.value("tol", p.nlp.tol);
        p.nlp.max_iters = n.value("max_iters", p.nlp.max_iters);
        p.nlp.mu_init = n.value("mu_init", p.nlp.mu_init);
        p.nlp.tau = n.value("tau", p.nlp.tau);
        p.nlp.delta_init = n.value("delta_init", p.nlp.delta_init);
        p.nlp.scale_objective = n.value("scale_objective", p.nlp.scale_objective);
    }
    if (p.rho <= 0 || p.mu1 <= 0 || p.mu2 <= 0 || p.eps <= 0 || p.eps >= 1)
        throw ValidationError("params: rho/mu1/mu2 must be positive and 0 < eps < 1");
    return p;
}

AladinParams load_params(const std::string& path) {
    return parse_params(read_text_file(path));
}

std::string params_to_json(const AladinParams& p) {
    json j;
    j["aladin"] = {{"rho", p.rho},
                   {"mu1", p.mu1},
                   {"mu2", p.mu2},
                   {"eps", p.eps},
                   {"eps_active", p.eps_active},
                   {"hess_floor", p.hess_floor},
                   {"max_iters", p.max_iters},
                   {"dual_damping", p.dual_damping},
                   {"threads", p.threads}};
    j["nlp"] = {{"tol", p.nlp.tol},
                {"max_iters", p.nlp.max_iters},
                {"mu_init", p.nlp.mu_init},
                {"tau", p.nlp.tau},
                {"delta_init", p.nlp.delta_init},
                {"scale_objective", p.nlp.scale_objective}};
    return j.dump(2);
}

namespace {

void put_num(std::ostringstream& os, double v) {
    os << std::setprecision(17) << v;
}

} // namespace

std::string trace_to_csv(const IterationTrace& trace, const RunStamp& stamp) {
    std::ostringstream os;
    os << stamp.csv_comment();
    os << "iter,primal_spatial,primal_temporal,dual,objective,wall_ms\n";
    for (const auto& r : trace.records) {
        os << r.iter << ",";
        put_num(os, r.primal_spatial);
        os << ",";
        put_num(os, r.primal_temporal);
        os << ",";
        put_num(os, r.dual);
        os << ",";
        put_num(os, r.objective);
        os << ",";
        put_num(os, r.wall_ms);
        os << "\n";
    }
    return os.str();
}

std::string sim_area_csv(const SimTrace& trace, int area, const RunStamp& stamp) {
    std::ostringstream os;
    os << stamp.csv_comment();
    os << "step,cost";
    for (const auto& id : trace.gen_ids[area]) os << ",pg_" << id;
    for (const auto& id : trace.gen_ids[area]) os << ",dpg_" << id;
    for (const auto& id : trace.sto_ids[area]) os << ",ps_" << id;
    for (const auto& id : trace.sto_ids[area]) os << ",e_" << id;
    os << "\n";
    for (const auto& s : trace.steps) {
        os << s.step << ",";
        put_num(os, s.area_cost[area]);
        for (int g = 0; g < s.pg[area].size(); ++g) {
            os << ",";
            put_num(os, s.pg[area][g]);
        }
        for (int g = 0; g < s.dpg_applied[area].size(); ++g) {
            os << ",";
            put_num(os, s.dpg_applied[area][g]);
        }
        for (int d = 0; d < s.ps_applied[area].size(); ++d) {
            os << ",";
            put_num(os, s.ps_applied[area][d]);
        }
        for (int d = 0; d < s.e[area].size(); ++d) {
            os << ",";
            put_num(os, s.e[area][d]);
        }
        os << "\n";
    }
    return os.str();
}

std::string sim_aggregate_csv(const SimTrace& trace, const RunStamp& stamp) {
    std::ostringstream os;
    os << stamp.csv_comment();
    os << "step,total_cost,forecast_demand,actual_demand,mismatch,iterations,"
          "primal_spatial,primal_temporal,dual,balance_residual,plan_deviation,wall_ms\n";
    for (const auto& s : trace.steps) {
        os << s.step << ",";
        put_num(os, s.realized_cost);
        os << ",";
        put_num(os, s.forecast_demand);
        os << ",";
        put_num(os, s.actual_demand);
        os << ",";
        put_num(os, s.actual_demand - s.forecast_demand);
        os << "," << s.iterations << ",";
        put_num(os, s.primal_spatial);
        os << ",";
        put_num(os, s.primal_temporal);
        os << ",";
        put_num(os, s.dual);
        os << ",";
        put_num(os, s.max_balance_residual);
        os << ",";
        put_num(os, s.plan_deviation);
        os << ",";
        put_num(os, s.wall_ms);
        os << "\n";
    }
    return os.str();
}

std::string cost_table_csv(const std::vector<std::string>& area_ids,
                           const std::vector<double>& area_cost, const RunStamp& stamp) {
    std::ostringstream os;
    os << stamp.csv_comment();
    os << "area,cost\n";
    double total = 0.0;
    for (std::size_t a = 0; a < area_ids.size(); ++a) {
        os << area_ids[a] << ",";
        put_num(os, area_cost[a]);
        os << "\n";
        total += area_cost[a];
    }
    os << "total,";
    put_num(os, total);
    os << "\n";
    return os.str();
}

std::string sim_summary_json(const SimTrace& trace, const RunStamp& stamp) {
    json j;
    j["schema_version"] = stamp.schema_version;
    j["config_hash"] = stamp.config_hash;
    j["seed"] = stamp.seed;
    j["case"] = trace.case_name;
    j["mode"] = to_string(trace.mode);
    j["steps"] = trace.steps.size();
    j["total_cost"] = trace.total_cost();
    j["plan_consistency_max"] = trace.plan_consistency_max();
    j["max_mismatch_step"] = trace.max_mismatch_step();

    double max_bal = 0.0, max_primal = 0.0, max_dual = 0.0, total_ms = 0.0;
    int max_iters = 0;
    json iters = json::array();
    for (const auto& s : trace.steps) {
        max_bal = std::max(max_bal, s.max_balance_residual);
        max_primal = std::max(max_primal, std::max(s.primal_spatial, s.primal_temporal));
        max_dual = std::max(max_dual, s.dual);
        max_iters = std::max(max_iters, s.iterations);
        total_ms += s.wall_ms;
        iters.push_back(s.iterations);
    }
    j["max_balance_residual"] = max_bal;
    j["max_primal_residual"] = max_primal;
    j["max_dual_residual"] = max_dual;
    j["max_iterations"] = max_iters;
    j["iterations_per_step"] = iters;
    j["total_wall_ms"] = total_ms;

    json per_area = json::array();
    for (std::size_t a = 0; a < trace.area_ids.size(); ++a) {
        double cost = 0.0;
        for (const auto& s : trace.steps) cost += s.area_cost[a];
        per_area.push_back({{"area", trace.area_ids[a]}, {"cost", cost}});
    }
    j["area_costs"] = per_area;
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace itdflex
