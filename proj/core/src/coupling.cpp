#include "itdflex/aladin/coupling.hpp"

#include "itdflex/errors.hpp"

namespace itdflex {

Eigen::VectorXd ConsensusGroup::apply(const std::vector<Eigen::VectorXd>& x) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n_rows);
    for (const auto& [b, cb] : per_block) r += cb * x[b];
    return r;
}

CouplingStructure build_couplings(const std::vector<AreaNetwork>& nets, int n_k, double dt) {
    CouplingStructure cs;
    cs.n_areas = static_cast<int>(nets.size());
    cs.n_k = n_k;

    std::vector<StageLayout> lay;
    lay.reserve(nets.size());
    for (const auto& n : nets) lay.push_back(StageLayout::make(n));

    auto area_index = [&](const std::string& id) {
        for (int a = 0; a < cs.n_areas; ++a)
            if (nets[a].area_id == id) return a;
        throw ValidationError("coupling references unknown area '" + id + "'");
    };

    // spatial rows: one (angle, magnitude) pair per copy bus; identical row
    // layout in every period group
    struct RowSpec {
        int owner_area, owner_var;
        int copier_area, copier_var;
    };
    std::vector<RowSpec> rows;
    for (int a = 0; a < cs.n_areas; ++a) {
        for (int ci = 0; ci < nets[a].n_copy(); ++ci) {
            const auto& cb = nets[a].copies[ci];
            const int o = area_index(cb.area);
            if (cb.bus < 1 || cb.bus > nets[o].n_own) {
                throw ValidationError("copy of bus " + std::to_string(cb.bus) + " in area '" +
                                      nets[a].area_id + "' has no owner slot in '" + cb.area +
                                      "'");
            }
            const int copy_local = nets[a].n_own + ci;
            rows.push_back({o, lay[o].theta(cb.bus - 1), a, lay[a].theta(copy_local)});
            cs.spatial_rows.push_back({cb.area, nets[a].area_id, cb.bus, true});
            rows.push_back({o, lay[o].v(cb.bus - 1), a, lay[a].v(copy_local)});
            cs.spatial_rows.push_back({cb.area, nets[a].area_id, cb.bus, false});
        }
    }

    cs.spatial.resize(n_k);
    for (int k = 1; k <= n_k; ++k) {
        ConsensusGroup& g = cs.spatial[k - 1];
        g.n_rows = static_cast<int>(rows.size());
        std::map<int, std::vector<Eigen::Triplet<double>>> trip;
        for (int r = 0; r < g.n_rows; ++r) {
            trip[cs.block_index(k, rows[r].owner_area)].emplace_back(r, rows[r].owner_var, 1.0);
            trip[cs.block_index(k, rows[r].copier_area)].emplace_back(r, rows[r].copier_var,
                                                                      -1.0);
        }
        for (auto& [b, t] : trip) {
            const int area = b % cs.n_areas;
            Eigen::SparseMatrix<double> m(g.n_rows, lay[area].n_vars);
            m.setFromTriplets(t.begin(), t.end());
            g.per_block.emplace(b, std::move(m));
        }
    }

    // temporal rows: storage and ramp recursions between adjacent periods
    cs.temporal.resize(cs.n_areas);
    cs.temporal_rows_per_step.resize(cs.n_areas);
    for (int a = 0; a < cs.n_areas; ++a) {
        const int n_sto = nets[a].n_sto();
        const int n_gen = nets[a].n_gen();
        const int per_k = n_sto + n_gen;
        cs.temporal_rows_per_step[a] = per_k;
        ConsensusGroup& g = cs.temporal[a];
        g.n_rows = (n_k - 1) * per_k;
        std::map<int, std::vector<Eigen::Triplet<double>>> trip;
        for (int k = 2; k <= n_k; ++k) {
            const int r0 = (k - 2) * per_k;
            for (int s = 0; s < n_sto; ++s) {
                trip[cs.block_index(k, a)].emplace_back(r0 + s, lay[a].e(s), 1.0);
                trip[cs.block_index(k, a)].emplace_back(r0 + s, lay[a].ps(s), -dt);
                trip[cs.block_index(k - 1, a)].emplace_back(r0 + s, lay[a].e(s), -1.0);
            }
            for (int gi = 0; gi < n_gen; ++gi) {
                trip[cs.block_index(k, a)].emplace_back(r0 + n_sto + gi, lay[a].pg(gi), 1.0);
                trip[cs.block_index(k, a)].emplace_back(r0 + n_sto + gi, lay[a].dpg(gi), -1.0);
                trip[cs.block_index(k - 1, a)].emplace_back(r0 + n_sto + gi, lay[a].pg(gi),
                                                            -1.0);
            }
        }
        for (auto& [b, t] : trip) {
            Eigen::SparseMatrix<double> m(g.n_rows, lay[a].n_vars);
            m.setFromTriplets(t.begin(), t.end());
            g.per_block.emplace(b, std::move(m));
        }
    }
    return cs;
}

} // namespace itdflex
