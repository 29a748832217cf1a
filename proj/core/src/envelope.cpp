#include "itdflex/envelope/envelope.hpp"

#include <json.hpp>

#include "itdflex/errors.hpp"
#include "itdflex/ldf/compact.hpp"
#include "itdflex/ldf/polytope.hpp"

namespace itdflex {

using nlohmann::json;

PccEnvelope aggregate_feeder(const RadialFeeder& feeder, const std::vector<Hyperbox>& boxes) {
    const int nk = feeder.n_periods();
    const int e = feeder.n_ess();
    if (e > 0 && static_cast<int>(boxes.size()) != nk) {
        throw ValidationError("feeder '" + feeder.id + "': " + std::to_string(boxes.size()) +
                              " boxes for " + std::to_string(nk) + " periods");
    }

    PccEnvelope env;
    env.feeder_id = feeder.id;
    env.devices = feeder.ess;
    env.periods.resize(nk);
    for (int k = 1; k <= nk; ++k) {
        EnvelopePeriod& pk = env.periods[k - 1];
        pk.k = k;
        pk.p_base = feeder.p_load.col(k - 1).sum();
        pk.q_base = feeder.q_load.col(k - 1).sum();
        if (e > 0) {
            const Hyperbox& box = boxes[k - 1];
            if (box.dim() != e || box.period != k) {
                throw ValidationError("feeder '" + feeder.id + "': box for period " +
                                      std::to_string(k) + " missing or mismatched");
            }
            pk.ps_min = box.lower;
            pk.ps_max = box.upper;
            pk.unidirectional = (box.variant == BoxVariant::Volume);
        } else {
            pk.ps_min.resize(0);
            pk.ps_max.resize(0);
        }
    }
    return env;
}

PccEnvelope compute_envelope(const RadialFeeder& feeder) {
    std::vector<Hyperbox> boxes;
    if (feeder.n_ess() > 0) {
        boxes.reserve(feeder.n_periods());
        for (int k = 1; k <= feeder.n_periods(); ++k) {
            const CompactModel model = assemble_compact(feeder, k);
            const FlexPolytope poly = build_polytope(model, feeder);
            try {
                boxes.push_back(max_bidirectional_box(poly));
            } catch (const SolverError&) {
                // origin excluded: fall back to the plain maximum-volume box
                boxes.push_back(max_volume_box(poly));
            }
        }
    }
    return aggregate_feeder(feeder, boxes);
}

std::string envelope_to_json(const PccEnvelope& env) {
    json j;
    j["feeder"] = env.feeder_id;
    j["periods"] = json::array();
    for (const auto& pk : env.periods) {
        json jp;
        jp["k"] = pk.k;
        jp["p_base"] = pk.p_base;
        jp["q_base"] = pk.q_base;
        jp["unidirectional"] = pk.unidirectional;
        jp["ess"] = json::array();
        for (int d = 0; d < env.n_devices(); ++d) {
            const auto& dev = env.devices[d];
            jp["ess"].push_back({{"id", dev.id},
                                 {"p_min", pk.ps_min[d]},
                                 {"p_max", pk.ps_max[d]},
                                 {"e_min", dev.e_min},
                                 {"e_max", dev.e_max},
                                 {"e0", dev.e0}});
        }
        j["periods"].push_back(jp);
    }
    return j.dump(2);
}

PccEnvelope envelope_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("envelope JSON: ") + e.what());
    }
    PccEnvelope env;
    env.feeder_id = j.at("feeder").get<std::string>();
    bool devices_set = false;
    for (const auto& jp : j.at("periods")) {
        EnvelopePeriod pk;
        pk.k = jp.at("k").get<int>();
        pk.p_base = jp.at("p_base").get<double>();
        pk.q_base = jp.at("q_base").get<double>();
        pk.unidirectional = jp.value("unidirectional", false);
        const auto& jess = jp.at("ess");
        pk.ps_min.resize(jess.size());
        pk.ps_max.resize(jess.size());
        int d = 0;
        for (const auto& je : jess) {
            pk.ps_min[d] = je.at("p_min").get<double>();
            pk.ps_max[d] = je.at("p_max").get<double>();
            if (!devices_set) {
                EssUnit dev;
                dev.id = je.at("id").get<std::string>();
                dev.e_min = je.at("e_min").get<double>();
                dev.e_max = je.at("e_max").get<double>();
                dev.e0 = je.at("e0").get<double>();
                dev.p_min = pk.ps_min[d];
                dev.p_max = pk.ps_max[d];
                env.devices.push_back(dev);
            }
            ++d;
        }
        devices_set = true;
        env.periods.push_back(pk);
    }
    return env;
}

} // namespace itdflex
