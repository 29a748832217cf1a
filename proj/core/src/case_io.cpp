#include "itdflex/net/case_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "itdflex/errors.hpp"
#include "itdflex/net/graph.hpp"

namespace itdflex {

using nlohmann::json;

namespace {

// scalar-or-array load entry, broadcast to horizon length
Eigen::VectorXd load_series(const json& j, const char* key, int horizon,
                            const std::string& where) {
    if (!j.contains(key)) return Eigen::VectorXd::Zero(horizon);
    const auto& v = j.at(key);
    if (v.is_number()) return Eigen::VectorXd::Constant(horizon, v.get<double>());
    if (v.is_array()) {
        if (static_cast<int>(v.size()) != horizon) {
            throw ValidationError(where + ": '" + key + "' has " +
                                  std::to_string(v.size()) + " entries, horizon is " +
                                  std::to_string(horizon));
        }
        Eigen::VectorXd out(horizon);
        for (int k = 0; k < horizon; ++k) out[k] = v.at(k).get<double>();
        return out;
    }
    throw ParseError(where + ": '" + key + "' must be a number or an array");
}

double num(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double dflt) {
    return j.contains(key) ? j.at(key).get<double>() : dflt;
}

int integer(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    return j.at(key).get<int>();
}

std::string str(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    return j.at(key).get<std::string>();
}

RadialFeeder parse_feeder(const json& jf, int horizon) {
    RadialFeeder f;
    f.id = str(jf, "id", "feeder");
    const std::string where = "feeder '" + f.id + "'";

    const auto& jbuses = jf.at("buses");
    f.n_bus = static_cast<int>(jbuses.size());
    f.u_min.resize(f.n_bus);
    f.u_max.resize(f.n_bus);
    f.p_load.resize(f.n_bus, horizon);
    f.q_load.resize(f.n_bus, horizon);
    std::set<int> seen;
    for (const auto& jb : jbuses) {
        const int id = integer(jb, "id", where + " bus");
        if (id < 1 || id > f.n_bus || !seen.insert(id).second) {
            throw ValidationError(where + ": bus ids must be exactly 1.." +
                                  std::to_string(f.n_bus) + ", got duplicate/out-of-range " +
                                  std::to_string(id));
        }
        f.u_min[id - 1] = num_or(jb, "u_min", 0.81);
        f.u_max[id - 1] = num_or(jb, "u_max", 1.21);
        f.p_load.row(id - 1) = load_series(jb, "p_load", horizon, where).transpose();
        f.q_load.row(id - 1) = load_series(jb, "q_load", horizon, where).transpose();
    }

    for (const auto& jl : jf.at("lines")) {
        FeederLine ln;
        ln.from = integer(jl, "from", where + " line");
        ln.to = integer(jl, "to", where + " line");
        ln.r = num(jl, "r", where + " line");
        ln.x = num(jl, "x", where + " line");
        f.lines.push_back(ln);
    }

    if (jf.contains("ess")) {
        for (const auto& je : jf.at("ess")) {
            EssUnit e;
            e.id = str(je, "id", where + " ess");
            e.bus = integer(je, "bus", where + " ess");
            e.p_min = num(je, "p_min", where + " ess");
            e.p_max = num(je, "p_max", where + " ess");
            e.e_min = num(je, "e_min", where + " ess");
            e.e_max = num(je, "e_max", where + " ess");
            e.e0 = num(je, "e0", where + " ess");
            f.ess.push_back(e);
        }
    }
    return f;
}

TransmissionArea parse_area(const json& ja, int horizon) {
    TransmissionArea a;
    a.id = str(ja, "id", "area");
    const std::string where = "area '" + a.id + "'";

    std::set<int> seen;
    const int nb = static_cast<int>(ja.at("buses").size());
    a.buses.resize(nb);
    for (const auto& jb : ja.at("buses")) {
        const int id = integer(jb, "id", where + " bus");
        if (id < 1 || id > nb || !seen.insert(id).second) {
            throw ValidationError(where + ": bus ids must be exactly 1.." +
                                  std::to_string(nb) + ", got duplicate/out-of-range " +
                                  std::to_string(id));
        }
        AreaBus& b = a.buses[id - 1];
        b.id = id;
        b.v_min = num_or(jb, "v_min", 0.9);
        b.v_max = num_or(jb, "v_max", 1.1);
        b.p_load = load_series(jb, "p_load", horizon, where);
        b.q_load = load_series(jb, "q_load", horizon, where);
    }

    if (ja.contains("branches")) {
        for (const auto& jl : ja.at("branches")) {
            Branch br;
            br.from = integer(jl, "from", where + " branch");
            br.to = integer(jl, "to", where + " branch");
            br.r = num(jl, "r", where + " branch");
            br.x = num(jl, "x", where + " branch");
            br.b_charge = num_or(jl, "b", 0.0);
            br.s_max = num_or(jl, "s_max", 0.0);
            a.branches.push_back(br);
        }
    }

    for (const auto& jg : ja.at("generators")) {
        Generator g;
        g.id = str(jg, "id", where + " generator");
        g.bus = integer(jg, "bus", where + " generator");
        g.a0 = num_or(jg, "a0", 0.0);
        g.a1 = num_or(jg, "a1", 0.0);
        g.a2 = num_or(jg, "a2", 0.0);
        g.p_min = num(jg, "p_min", where + " generator");
        g.p_max = num(jg, "p_max", where + " generator");
        g.q_min = num(jg, "q_min", where + " generator");
        g.q_max = num(jg, "q_max", where + " generator");
        g.ramp_min = num_or(jg, "ramp_min", -1e30);
        g.ramp_max = num_or(jg, "ramp_max", 1e30);
        g.pg0 = num_or(jg, "pg0", g.p_min);
        a.gens.push_back(g);
    }

    if (ja.contains("storages")) {
        for (const auto& js : ja.at("storages")) {
            StorageUnit s;
            s.id = str(js, "id", where + " storage");
            s.bus = integer(js, "bus", where + " storage");
            s.p_min = num(js, "p_min", where + " storage");
            s.p_max = num(js, "p_max", where + " storage");
            s.e_min = num(js, "e_min", where + " storage");
            s.e_max = num(js, "e_max", where + " storage");
            s.e0 = num(js, "e0", where + " storage");
            a.storages.push_back(s);
        }
    }

    if (ja.contains("pccs")) {
        for (const auto& jp : ja.at("pccs")) {
            PccAttachment p;
            p.bus = integer(jp, "bus", where + " pcc");
            p.feeder_id = str(jp, "feeder", where + " pcc");
            a.pccs.push_back(p);
        }
    }

    a.ref_bus = ja.contains("ref_bus") ? ja.at("ref_bus").get<int>() : 1;
    return a;
}

json series_json(const Eigen::VectorXd& v) {
    // collapse constant series back to a scalar for readability
    bool constant = true;
    for (int i = 1; i < v.size(); ++i) {
        if (v[i] != v[0]) {
            constant = false;
            break;
        }
    }
    if (v.size() > 0 && constant) return json(v[0]);
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

} // namespace

const TransmissionArea* ItdCase::find_area(const std::string& id) const {
    for (const auto& a : areas)
        if (a.id == id) return &a;
    return nullptr;
}

const RadialFeeder* ItdCase::find_feeder(const std::string& id) const {
    for (const auto& f : feeders)
        if (f.id == id) return &f;
    return nullptr;
}

void validate_case(const ItdCase& c) {
    if (c.schema_version != 1)
        throw ValidationError("unsupported schema_version " + std::to_string(c.schema_version));
    if (c.horizon < 1) throw ValidationError("horizon must be >= 1");
    if (c.dt_hours <= 0.0) throw ValidationError("dt_hours must be positive");
    if (c.base_mva <= 0.0) throw ValidationError("base_mva must be positive");

    std::set<std::string> area_ids, feeder_ids;
    for (const auto& a : c.areas) {
        if (!area_ids.insert(a.id).second)
            throw ValidationError("duplicate area id '" + a.id + "'");
    }
    for (const auto& f : c.feeders) {
        if (!feeder_ids.insert(f.id).second)
            throw ValidationError("duplicate feeder id '" + f.id + "'");
    }

    for (const auto& f : c.feeders) {
        const std::string where = "feeder '" + f.id + "'";
        if (f.n_bus != f.n_line() + 1) {
            throw ValidationError(where + ": not radial (" + std::to_string(f.n_bus) +
                                  " buses, " + std::to_string(f.n_line()) +
                                  " lines; need n_bus = n_line + 1)");
        }
        for (const auto& ln : f.lines) {
            if (ln.from < 1 || ln.from > f.n_bus || ln.to < 1 || ln.to > f.n_bus ||
                ln.from == ln.to) {
                throw ValidationError(where + ": line " + std::to_string(ln.from) + "-" +
                                      std::to_string(ln.to) + " references unknown bus");
            }
        }
        leaf_elimination_order(f); // throws "not radial" on cycles / disconnection
        for (const auto& e : f.ess) {
            if (e.bus < 1 || e.bus > f.n_bus)
                throw ValidationError(where + ": ess '" + e.id + "' at unknown bus " +
                                      std::to_string(e.bus));
            if (e.p_min > e.p_max)
                throw ValidationError(where + ": ess '" + e.id + "' has p_min > p_max");
            if (e.e_min > e.e_max || e.e0 < e.e_min || e.e0 > e.e_max)
                throw ValidationError(where + ": ess '" + e.id +
                                      "' initial energy outside [e_min, e_max]");
        }
        for (int b = 0; b < f.n_bus; ++b) {
            if (f.u_min[b] > f.u_max[b])
                throw ValidationError(where + ": bus " + std::to_string(b + 1) +
                                      " has u_min > u_max");
        }
    }

    for (const auto& a : c.areas) {
        const std::string where = "area '" + a.id + "'";
        auto check_bus = [&](int bus, const std::string& elem) {
            if (bus < 1 || bus > a.n_bus())
                throw ValidationError(where + ": " + elem + " references unknown bus " +
                                      std::to_string(bus));
        };
        for (const auto& br : a.branches) {
            check_bus(br.from, "branch");
            check_bus(br.to, "branch");
        }
        std::set<std::string> gen_ids;
        for (const auto& g : a.gens) {
            check_bus(g.bus, "generator '" + g.id + "'");
            if (!gen_ids.insert(g.id).second)
                throw ValidationError(where + ": duplicate generator id '" + g.id + "'");
            if (g.a2 < 0.0)
                throw ValidationError(where + ": generator '" + g.id +
                                      "' has negative cost curvature a2");
            if (g.p_min > g.p_max || g.q_min > g.q_max || g.ramp_min > g.ramp_max)
                throw ValidationError(where + ": generator '" + g.id + "' has inverted bounds");
            if (g.pg0 < g.p_min - 1e-12 || g.pg0 > g.p_max + 1e-12)
                throw ValidationError(where + ": generator '" + g.id +
                                      "' initial output pg0 outside [p_min, p_max]");
        }
        for (const auto& s : a.storages) {
            check_bus(s.bus, "storage '" + s.id + "'");
            if (s.p_min > s.p_max || s.e_min > s.e_max || s.e0 < s.e_min || s.e0 > s.e_max)
                throw ValidationError(where + ": storage '" + s.id + "' has inconsistent bounds");
        }
        for (const auto& p : a.pccs) {
            check_bus(p.bus, "pcc");
            if (!feeder_ids.count(p.feeder_id))
                throw ValidationError(where + ": pcc references unknown feeder '" +
                                      p.feeder_id + "'");
        }
        check_bus(a.ref_bus, "ref_bus");
    }

    // every feeder attaches to exactly one PCC
    std::map<std::string, int> attach_count;
    for (const auto& a : c.areas)
        for (const auto& p : a.pccs) attach_count[p.feeder_id]++;
    for (const auto& f : c.feeders) {
        const int n = attach_count.count(f.id) ? attach_count.at(f.id) : 0;
        if (n != 1)
            throw ValidationError("feeder '" + f.id + "' attached to " + std::to_string(n) +
                                  " PCCs, expected exactly 1");
    }

    for (const auto& t : c.tie_lines) {
        const auto* aa = c.find_area(t.area_a);
        const auto* ab = c.find_area(t.area_b);
        if (!aa || !ab)
            throw ValidationError("tie-line references unknown area '" +
                                  (aa ? t.area_b : t.area_a) + "'");
        if (t.area_a == t.area_b)
            throw ValidationError("tie-line endpoints must be in different areas");
        if (t.bus_a < 1 || t.bus_a > aa->n_bus())
            throw ValidationError("tie-line bus " + std::to_string(t.bus_a) +
                                  " unknown in area '" + t.area_a + "'");
        if (t.bus_b < 1 || t.bus_b > ab->n_bus())
            throw ValidationError("tie-line bus " + std::to_string(t.bus_b) +
                                  " unknown in area '" + t.area_b + "'");
    }
}

ItdCase parse_case(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("case JSON: ") + e.what());
    }

    ItdCase c;
    try {
        c.schema_version = j.contains("schema_version") ? j.at("schema_version").get<int>() : 1;
        c.name = j.contains("name") ? j.at("name").get<std::string>() : "case";
        c.base_mva = num(j, "base_mva", "case");
        c.horizon = integer(j, "horizon", "case");
        c.dt_hours = num(j, "dt_hours", "case");
        for (const auto& ja : j.at("areas")) c.areas.push_back(parse_area(ja, c.horizon));
        if (j.contains("tie_lines")) {
            for (const auto& jt : j.at("tie_lines")) {
                TieLine t;
                t.area_a = str(jt, "area_a", "tie_line");
                t.bus_a = integer(jt, "bus_a", "tie_line");
                t.area_b = str(jt, "area_b", "tie_line");
                t.bus_b = integer(jt, "bus_b", "tie_line");
                t.r = num(jt, "r", "tie_line");
                t.x = num(jt, "x", "tie_line");
                t.b_charge = num_or(jt, "b", 0.0);
                t.s_max = num_or(jt, "s_max", 0.0);
                c.tie_lines.push_back(t);
            }
        }
        if (j.contains("feeders")) {
            for (const auto& jf : j.at("feeders")) c.feeders.push_back(parse_feeder(jf, c.horizon));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("case JSON: ") + e.what());
    }

    validate_case(c);
    return c;
}

ItdCase load_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open case file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_case(ss.str());
}

std::string case_to_json(const ItdCase& c) {
    json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    j["base_mva"] = c.base_mva;
    j["horizon"] = c.horizon;
    j["dt_hours"] = c.dt_hours;

    j["areas"] = json::array();
    for (const auto& a : c.areas) {
        json ja;
        ja["id"] = a.id;
        ja["ref_bus"] = a.ref_bus;
        ja["buses"] = json::array();
        for (const auto& b : a.buses) {
            json jb;
            jb["id"] = b.id;
            jb["v_min"] = b.v_min;
            jb["v_max"] = b.v_max;
            jb["p_load"] = series_json(b.p_load);
            jb["q_load"] = series_json(b.q_load);
            ja["buses"].push_back(jb);
        }
        ja["branches"] = json::array();
        for (const auto& br : a.branches) {
            ja["branches"].push_back({{"from", br.from},
                                      {"to", br.to},
                                      {"r", br.r},
                                      {"x", br.x},
                                      {"b", br.b_charge},
                                      {"s_max", br.s_max}});
        }
        ja["generators"] = json::array();
        for (const auto& g : a.gens) {
            ja["generators"].push_back({{"id", g.id},
                                        {"bus", g.bus},
                                        {"a0", g.a0},
                                        {"a1", g.a1},
                                        {"a2", g.a2},
                                        {"p_min", g.p_min},
                                        {"p_max", g.p_max},
                                        {"q_min", g.q_min},
                                        {"q_max", g.q_max},
                                        {"ramp_min", g.ramp_min},
                                        {"ramp_max", g.ramp_max},
                                        {"pg0", g.pg0}});
        }
        ja["storages"] = json::array();
        for (const auto& s : a.storages) {
            ja["storages"].push_back({{"id", s.id},
                                      {"bus", s.bus},
                                      {"p_min", s.p_min},
                                      {"p_max", s.p_max},
                                      {"e_min", s.e_min},
                                      {"e_max", s.e_max},
                                      {"e0", s.e0}});
        }
        ja["pccs"] = json::array();
        for (const auto& p : a.pccs)
            ja["pccs"].push_back({{"bus", p.bus}, {"feeder", p.feeder_id}});
        j["areas"].push_back(ja);
    }

    j["tie_lines"] = json::array();
    for (const auto& t : c.tie_lines) {
        j["tie_lines"].push_back({{"area_a", t.area_a},
                                  {"bus_a", t.bus_a},
                                  {"area_b", t.area_b},
                                  {"bus_b", t.bus_b},
                                  {"r", t.r},
                                  {"x", t.x},
                                  {"b", t.b_charge},
                                  {"s_max", t.s_max}});
    }

    j["feeders"] = json::array();
    for (const auto& f : c.feeders) {
        json jf;
        jf["id"] = f.id;
        jf["buses"] = json::array();
        for (int b = 0; b < f.n_bus; ++b) {
            json jb;
            jb["id"] = b + 1;
            jb["u_min"] = f.u_min[b];
            jb["u_max"] = f.u_max[b];
            jb["p_load"] = series_json(f.p_load.row(b).transpose());
            jb["q_load"] = series_json(f.q_load.row(b).transpose());
            jf["buses"].push_back(jb);
        }
        jf["lines"] = json::array();
        for (const auto& ln : f.lines)
            jf["lines"].push_back({{"from", ln.from}, {"to", ln.to}, {"r", ln.r}, {"x", ln.x}});
        jf["ess"] = json::array();
        for (const auto& e : f.ess) {
            jf["ess"].push_back({{"id", e.id},
                                 {"bus", e.bus},
                                 {"p_min", e.p_min},
                                 {"p_max", e.p_max},
                                 {"e_min", e.e_min},
                                 {"e_max", e.e_max},
                                 {"e0", e.e0}});
        }
        j["feeders"].push_back(jf);
    }

    return j.dump(2);
}

void save_case(const ItdCase& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write case file '" + path + "'");
    out << case_to_json(c) << "\n";
}

} // namespace itdflex
