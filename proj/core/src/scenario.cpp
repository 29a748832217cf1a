#include "itdflex/net/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>
#include <vector>

#include "itdflex/errors.hpp"

namespace itdflex {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    out.push_back(field);
    return out;
}

double parse_num(const std::string& s, int line_no, const char* what) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
        throw ParseError("scenario CSV line " + std::to_string(line_no) + ": non-numeric " +
                         what + " '" + s + "'");
    }
    return v;
}

long parse_int(const std::string& s, int line_no, const char* what) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ParseError("scenario CSV line " + std::to_string(line_no) + ": non-numeric " +
                         what + " '" + s + "'");
    }
    return v;
}

struct RawSeries {
    std::vector<double> fc, ac;
    std::vector<bool> has;
};

} // namespace

double ScenarioSeries::area_p(const std::string& area, int bus, int step, bool actual) const {
    auto it = area_buses.find({area, bus});
    if (it == area_buses.end()) return 0.0;
    return actual ? it->second.p_actual[step] : it->second.p_forecast[step];
}

double ScenarioSeries::area_q(const std::string& area, int bus, int step, bool actual) const {
    auto it = area_buses.find({area, bus});
    if (it == area_buses.end()) return 0.0;
    return actual ? it->second.q_actual[step] : it->second.q_forecast[step];
}

double ScenarioSeries::feeder_p(const std::string& feeder, int bus, int step, bool actual) const {
    auto it = feeder_buses.find({feeder, bus});
    if (it == feeder_buses.end()) return 0.0;
    return actual ? it->second.p_actual[step] : it->second.p_forecast[step];
}

double ScenarioSeries::feeder_q(const std::string& feeder, int bus, int step, bool actual) const {
    auto it = feeder_buses.find({feeder, bus});
    if (it == feeder_buses.end()) return 0.0;
    return actual ? it->second.q_actual[step] : it->second.q_forecast[step];
}

ScenarioSeries parse_scenario(const std::string& csv_text, const ItdCase& c) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("scenario CSV: empty file");

    const auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"step",  "entity_kind", "entity_id", "bus",
                                               "field", "forecast",    "actual"};
    if (header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        throw ParseError("scenario CSV: header must be '" + want + "'");
    }

    // (kind, id, bus, field) -> step-indexed values; sign of solar/wind applied later
    std::map<std::tuple<std::string, std::string, int, std::string>, std::map<long, std::pair<double, double>>>
        raw;
    int line_no = 1;
    long max_step = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7) {
            throw ParseError("scenario CSV line " + std::to_string(line_no) + ": expected 7 fields, got " +
                             std::to_string(f.size()));
        }
        const long step = parse_int(f[0], line_no, "step");
        const std::string& kind = f[1];
        const std::string& id = f[2];
        const int bus = static_cast<int>(parse_int(f[3], line_no, "bus"));
        const std::string& field = f[4];
        const double fc = parse_num(f[5], line_no, "forecast");
        const double ac = parse_num(f[6], line_no, "actual");

        if (kind != "area" && kind != "feeder") {
            throw ValidationError("scenario CSV line " + std::to_string(line_no) +
                                  ": entity_kind must be 'area' or 'feeder', got '" + kind + "'");
        }
        if (field != "p_load" && field != "q_load" && field != "p_solar" && field != "p_wind") {
            throw ValidationError("scenario CSV line " + std::to_string(line_no) +
                                  ": unknown field '" + field + "'");
        }
        if (kind == "area") {
            const auto* a = c.find_area(id);
            if (!a) throw ValidationError("scenario CSV: unknown area '" + id + "'");
            if (bus < 1 || bus > a->n_bus())
                throw ValidationError("scenario CSV: unknown bus " + std::to_string(bus) +
                                      " in area '" + id + "'");
        } else {
            const auto* fd = c.find_feeder(id);
            if (!fd) throw ValidationError("scenario CSV: unknown feeder '" + id + "'");
            if (bus < 1 || bus > fd->n_bus)
                throw ValidationError("scenario CSV: unknown bus " + std::to_string(bus) +
                                      " in feeder '" + id + "'");
        }
        if (step < 0) throw ValidationError("scenario CSV: negative step");
        auto& series = raw[{kind, id, bus, field}];
        if (series.count(step)) {
            throw ValidationError("scenario CSV: duplicate row for step " + std::to_string(step) +
                                  " of " + kind + " '" + id + "' bus " + std::to_string(bus) +
                                  " field " + field);
        }
        series[step] = {fc, ac};
        max_step = std::max(max_step, step);
    }

    const int n_steps = static_cast<int>(max_step + 1);
    if (n_steps <= 0) throw ValidationError("scenario CSV: no data rows");

    // every declared series must cover 0..T-1 (forecast and actual share the index)
    for (const auto& [key, series] : raw) {
        if (static_cast<long>(series.size()) != n_steps) {
            throw ValidationError("scenario CSV: series for " + std::get<0>(key) + " '" +
                                  std::get<1>(key) + "' bus " + std::to_string(std::get<2>(key)) +
                                  " field " + std::get<3>(key) + " has " +
                                  std::to_string(series.size()) + " steps, expected " +
                                  std::to_string(n_steps));
        }
    }

    ScenarioSeries out;
    out.n_steps = n_steps;
    for (const auto& [key, series] : raw) {
        const auto& [kind, id, bus, field] = key;
        auto& dst = (kind == "area") ? out.area_buses[{id, bus}] : out.feeder_buses[{id, bus}];
        if (dst.p_forecast.size() == 0) {
            dst.p_forecast = Eigen::VectorXd::Zero(n_steps);
            dst.p_actual = Eigen::VectorXd::Zero(n_steps);
            dst.q_forecast = Eigen::VectorXd::Zero(n_steps);
            dst.q_actual = Eigen::VectorXd::Zero(n_steps);
        }
        // solar and wind are negative demands
        const double sign = (field == "p_solar" || field == "p_wind") ? -1.0 : 1.0;
        const bool reactive = (field == "q_load");
        for (const auto& [step, v] : series) {
            if (reactive) {
                dst.q_forecast[step] += v.first;
                dst.q_actual[step] += v.second;
            } else {
                dst.p_forecast[step] += sign * v.first;
                dst.p_actual[step] += sign * v.second;
            }
        }
    }
    return out;
}

ScenarioSeries load_scenario(const std::string& path, const ItdCase& c) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), c);
}

} // namespace itdflex
