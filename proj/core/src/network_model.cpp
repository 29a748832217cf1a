#include "itdflex/acopf/network_model.hpp"

#include <algorithm>

#include "itdflex/errors.hpp"
#include "itdflex/net/ybus.hpp"

namespace itdflex {

namespace {

ModelGen to_model_gen(const Generator& g, int local_bus) {
    ModelGen m;
    m.id = g.id;
    m.bus = local_bus;
    m.a0 = g.a0;
    m.a1 = g.a1;
    m.a2 = g.a2;
    m.p_min = g.p_min;
    m.p_max = g.p_max;
    m.q_min = g.q_min;
    m.q_max = g.q_max;
    m.ramp_min = g.ramp_min;
    m.ramp_max = g.ramp_max;
    m.pg0 = g.pg0;
    return m;
}

ModelStorage native_storage(const StorageUnit& s, int local_bus, int n_k) {
    ModelStorage m;
    m.id = s.id;
    m.bus = local_bus;
    m.e_min = s.e_min;
    m.e_max = s.e_max;
    m.e0 = s.e0;
    m.p_box.resize(n_k, 2);
    m.p_box.col(0).setConstant(s.p_min);
    m.p_box.col(1).setConstant(s.p_max);
    return m;
}

// fold one feeder's envelope into the PCC bus: base loads onto the load
// series, devices as per-period-boxed storages
void attach_envelope(AreaNetwork& net, const PccEnvelope& env, int pcc_local_bus, int n_k) {
    if (static_cast<int>(env.periods.size()) < n_k) {
        throw ValidationError("envelope for feeder '" + env.feeder_id + "' covers " +
                              std::to_string(env.periods.size()) + " periods, case horizon is " +
                              std::to_string(n_k));
    }
    for (int k = 0; k < n_k; ++k) {
        net.p_load(pcc_local_bus, k) += env.periods[k].p_base;
        net.q_load(pcc_local_bus, k) += env.periods[k].q_base;
    }
    for (int d = 0; d < env.n_devices(); ++d) {
        ModelStorage m;
        m.id = env.feeder_id + ":" + env.devices[d].id;
        m.bus = pcc_local_bus;
        m.e_min = env.devices[d].e_min;
        m.e_max = env.devices[d].e_max;
        m.e0 = env.devices[d].e0;
        m.p_box.resize(n_k, 2);
        for (int k = 0; k < n_k; ++k) {
            m.p_box(k, 0) = env.periods[k].ps_min[d];
            m.p_box(k, 1) = env.periods[k].ps_max[d];
        }
        net.storages.push_back(m);
    }
}

AreaNetwork base_area_model(const TransmissionArea& a, const ItdCase& c,
                            const EnvelopeMap& envelopes) {
    AreaNetwork net;
    net.area_id = a.id;
    net.n_own = a.n_bus();
    net.v_min.resize(net.n_own);
    net.v_max.resize(net.n_own);
    net.p_load.setZero(net.n_own, c.horizon);
    net.q_load.setZero(net.n_own, c.horizon);
    for (int b = 0; b < net.n_own; ++b) {
        net.v_min[b] = a.buses[b].v_min;
        net.v_max[b] = a.buses[b].v_max;
        net.p_load.row(b) = a.buses[b].p_load.transpose();
        net.q_load.row(b) = a.buses[b].q_load.transpose();
    }
    for (const auto& br : a.branches) {
        net.branches.push_back(
            make_flow_branch(br.from - 1, br.to - 1, br.r, br.x, br.b_charge, br.s_max, true));
    }
    for (const auto& g : a.gens) net.gens.push_back(to_model_gen(g, g.bus - 1));
    for (const auto& s : a.storages)
        net.storages.push_back(native_storage(s, s.bus - 1, c.horizon));
    for (const auto& p : a.pccs) {
        auto it = envelopes.find(p.feeder_id);
        if (it == envelopes.end()) {
            throw ValidationError("no envelope provided for feeder '" + p.feeder_id + "'");
        }
        attach_envelope(net, it->second, p.bus - 1, c.horizon);
    }
    return net;
}

} // namespace

std::vector<AreaNetwork> build_area_networks(const ItdCase& c, const EnvelopeMap& envelopes,
                                             bool isolated) {
    std::vector<AreaNetwork> nets;
    nets.reserve(c.areas.size());
    for (const auto& a : c.areas) nets.push_back(base_area_model(a, c, envelopes));

    for (std::size_t i = 0; i < nets.size(); ++i) {
        nets[i].ref_bus = isolated ? (c.areas[i].ref_bus - 1) : -1;
    }
    if (!isolated && !nets.empty()) nets[0].ref_bus = c.areas[0].ref_bus - 1;

    if (!isolated) {
        // replicate each tie-line on both sides against a copy of the remote
        // terminal; the smaller area id keeps the flow-limit row
        auto copy_index = [](AreaNetwork& net, const std::string& area, int bus) {
            for (std::size_t k = 0; k < net.copies.size(); ++k) {
                if (net.copies[k].area == area && net.copies[k].bus == bus)
                    return net.n_own + static_cast<int>(k);
            }
            net.copies.push_back({area, bus});
            return net.n_own + static_cast<int>(net.copies.size()) - 1;
        };
        auto net_of = [&](const std::string& id) -> AreaNetwork& {
            for (auto& n : nets)
                if (n.area_id == id) return n;
            throw ValidationError("tie-line references unknown area '" + id + "'");
        };
        for (const auto& t : c.tie_lines) {
            AreaNetwork& na = net_of(t.area_a);
            AreaNetwork& nb = net_of(t.area_b);
            const bool a_owns = t.area_a < t.area_b;
            const int cb_in_a = copy_index(na, t.area_b, t.bus_b);
            na.branches.push_back(make_flow_branch(t.bus_a - 1, cb_in_a, t.r, t.x, t.b_charge,
                                                   t.s_max, a_owns));
            const int ca_in_b = copy_index(nb, t.area_a, t.bus_a);
            nb.branches.push_back(make_flow_branch(ca_in_b, t.bus_b - 1, t.r, t.x, t.b_charge,
                                                   t.s_max, !a_owns));
        }
    }

    for (auto& net : nets) {
        std::vector<Eigen::Triplet<std::complex<double>>> trip;
        trip.reserve(4 * net.branches.size());
        for (const auto& br : net.branches) {
            trip.emplace_back(br.from, br.from, br.yff);
            trip.emplace_back(br.to, br.to, br.ytt);
            trip.emplace_back(br.from, br.to, br.yft);
            trip.emplace_back(br.to, br.from, br.ytf);
        }
        net.ybus.resize(net.n_bus(), net.n_bus());
        net.ybus.setFromTriplets(trip.begin(), trip.end());
    }
    return nets;
}

UnionNetwork build_union_network(const ItdCase& c, const EnvelopeMap& envelopes) {
    UnionNetwork u;
    AreaNetwork& net = u.net;
    net.area_id = "union";

    int n_total = 0;
    for (const auto& a : c.areas) {
        u.bus_offset[a.id] = n_total;
        n_total += a.n_bus();
    }
    net.n_own = n_total;
    net.v_min.resize(n_total);
    net.v_max.resize(n_total);
    net.p_load.setZero(n_total, c.horizon);
    net.q_load.setZero(n_total, c.horizon);

    for (const auto& a : c.areas) {
        const int off = u.bus_offset.at(a.id);
        for (int b = 0; b < a.n_bus(); ++b) {
            net.v_min[off + b] = a.buses[b].v_min;
            net.v_max[off + b] = a.buses[b].v_max;
            net.p_load.row(off + b) = a.buses[b].p_load.transpose();
            net.q_load.row(off + b) = a.buses[b].q_load.transpose();
        }
        for (const auto& br : a.branches) {
            net.branches.push_back(make_flow_branch(off + br.from - 1, off + br.to - 1, br.r,
                                                    br.x, br.b_charge, br.s_max, true));
        }
        int gi = 0;
        for (const auto& g : a.gens) {
            net.gens.push_back(to_model_gen(g, off + g.bus - 1));
            u.gen_origin.emplace_back(a.id, gi++);
        }
        int si = 0;
        for (const auto& s : a.storages) {
            net.storages.push_back(native_storage(s, off + s.bus - 1, c.horizon));
            u.sto_origin.emplace_back(a.id, si++);
        }
        for (const auto& p : a.pccs) {
            auto it = envelopes.find(p.feeder_id);
            if (it == envelopes.end()) {
                throw ValidationError("no envelope provided for feeder '" + p.feeder_id + "'");
            }
            const int before = net.n_sto();
            attach_envelope(net, it->second, off + p.bus - 1, c.horizon);
            for (int d = before; d < net.n_sto(); ++d) u.sto_origin.emplace_back(a.id, si++);
        }
    }

    for (const auto& t : c.tie_lines) {
        const int fa = u.bus_offset.at(t.area_a) + t.bus_a - 1;
        const int fb = u.bus_offset.at(t.area_b) + t.bus_b - 1;
        net.branches.push_back(make_flow_branch(fa, fb, t.r, t.x, t.b_charge, t.s_max, true));
    }

    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    trip.reserve(4 * net.branches.size());
    for (const auto& br : net.branches) {
        trip.emplace_back(br.from, br.from, br.yff);
        trip.emplace_back(br.to, br.to, br.ytt);
        trip.emplace_back(br.from, br.to, br.yft);
        trip.emplace_back(br.to, br.from, br.ytf);
    }
    net.ybus.resize(n_total, n_total);
    net.ybus.setFromTriplets(trip.begin(), trip.end());

    net.ref_bus = c.areas.empty() ? -1 : (u.bus_offset.at(c.areas[0].id) + c.areas[0].ref_bus - 1);
    return u;
}

EnvelopeMap compute_case_envelopes(const ItdCase& c) {
    EnvelopeMap envs;
    for (const auto& f : c.feeders) envs.emplace(f.id, compute_envelope(f));
    return envs;
}

} // namespace itdflex
