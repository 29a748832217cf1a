#pragma once

#include <memory>
#include <vector>

#include "itdflex/acopf/network_model.hpp"
#include "itdflex/nlp/problem.hpp"

namespace itdflex {

/// Flat index map of one (period, area) decision block:
/// [theta; v; Pg; Qg; Ps; E; dPg], copy buses appended after own buses inside
/// the theta/v segments.
struct StageLayout {
    int n_bus = 0, n_own = 0, n_gen = 0, n_sto = 0;
    int off_theta = 0, off_v = 0, off_pg = 0, off_qg = 0, off_ps = 0, off_e = 0, off_dpg = 0;
    int n_vars = 0;

    static StageLayout make(const AreaNetwork& net);

    int theta(int bus) const { return off_theta + bus; }
    int v(int bus) const { return off_v + bus; }
    int pg(int g) const { return off_pg + g; }
    int qg(int g) const { return off_qg + g; }
    int ps(int s) const { return off_ps + s; }
    int e(int s) const { return off_e + s; }
    int dpg(int g) const { return off_dpg + g; }
};

struct StageValues {
    Eigen::VectorXd theta, v, pg, qg, ps, e, dpg;
};

StageValues unpack_stage(const StageLayout& lay, const Eigen::VectorXd& x_stage);

/// Single-period physics and cost of one area model: nodal balances, flow
/// limits, operating boxes, quadratic generation cost. Multi- and
/// single-period problems delegate here so both dispatch routes share one
/// set of kernels.
class OpfStage {
public:
    OpfStage(const AreaNetwork& net, int period); // period is 1-based

    const StageLayout& layout() const { return lay_; }
    const AreaNetwork& net() const { return *net_; }
    int period() const { return period_; }

    int num_eq() const;   // P/Q balances per own bus + optional reference row
    int num_ineq() const; // boxes + enforced flow limits (both ends)

    double cost(const Eigen::VectorXd& xs) const;
    void add_cost_grad(const Eigen::VectorXd& xs, double w, Eigen::VectorXd& grad) const;

    Eigen::VectorXd eq(const Eigen::VectorXd& xs) const;
    Eigen::VectorXd ineq(const Eigen::VectorXd& xs) const;
    void eq_jacobian(const Eigen::VectorXd& xs, int row0, int col0,
                     std::vector<Eigen::Triplet<double>>& trip) const;
    void ineq_jacobian(const Eigen::VectorXd& xs, int row0, int col0,
                       std::vector<Eigen::Triplet<double>>& trip) const;
    void lagrangian_hessian(const Eigen::VectorXd& xs, double sigma,
                            const Eigen::VectorXd& y_eq_stage,
                            const Eigen::VectorXd& z_ineq_stage, int col0,
                            std::vector<Eigen::Triplet<double>>& trip) const;

    /// flat start: unit voltages, zero angles, operating point pushed inside
    /// the boxes
    Eigen::VectorXd flat_start() const;

private:
    const AreaNetwork* net_;
    StageLayout lay_;
    int period_;
    std::vector<int> limited_; // indices of branches with an enforced flow limit
};

/// Horizon problem over one network (an isolated area or the union network):
/// N_k stage blocks plus storage/ramp recursions as plain equality rows.
/// This is the centralized reference of the coordination experiments.
class MultiPeriodOpf : public NlpProblem {
public:
    MultiPeriodOpf(AreaNetwork net, int n_k, double dt_hours);

    int num_vars() const override;
    int num_eq() const override;
    int num_ineq() const override;
    double objective(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd objective_grad(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd eq_constraints(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd ineq_constraints(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> eq_jacobian(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> ineq_jacobian(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> lagrangian_hessian(const Eigen::VectorXd& x, double sigma,
                                                   const Eigen::VectorXd& y_eq,
                                                   const Eigen::VectorXd& y_ineq) const override;
    Eigen::VectorXd initial_point() const override;

    const AreaNetwork& net() const { return net_; }
    int horizon() const { return n_k_; }
    double dt() const { return dt_; }
    const StageLayout& stage_layout() const { return stages_[0].layout(); }
    int stage_offset(int k) const { return (k - 1) * stages_[0].layout().n_vars; }
    StageValues stage_values(const Eigen::VectorXd& x, int k) const;

private:
    AreaNetwork net_;
    int n_k_;
    double dt_;
    std::vector<OpfStage> stages_;
    int n_stage_vars_, n_stage_eq_total_;
};

/// One (period, area) block of the distributed formulation. Period 1 carries
/// the measured-initial-state equalities E_1 - dt*Ps_1 = E0(t) and
/// Pg_1 - dPg_1 = Pg0(t); later periods leave the dynamics to the temporal
/// consensus rows.
class SinglePeriodOpf : public NlpProblem {
public:
    SinglePeriodOpf(const AreaNetwork* net, int period, double dt_hours,
                    Eigen::VectorXd e_init, Eigen::VectorXd pg_init);

    int num_vars() const override;
    int num_eq() const override;
    int num_ineq() const override;
    double objective(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd objective_grad(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd eq_constraints(const Eigen::VectorXd& x) const override;
    Eigen::VectorXd ineq_constraints(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> eq_jacobian(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> ineq_jacobian(const Eigen::VectorXd& x) const override;
    Eigen::SparseMatrix<double> lagrangian_hessian(const Eigen::VectorXd& x, double sigma,
                                                   const Eigen::VectorXd& y_eq,
                                                   const Eigen::VectorXd& y_ineq) const override;
    Eigen::VectorXd initial_point() const override;

    const OpfStage& stage() const { return stage_; }
    bool has_init_rows() const { return period_ == 1; }

private:
    const AreaNetwork* net_;
    OpfStage stage_;
    int period_;
    double dt_;
    Eigen::VectorXd e_init_, pg_init_;
};

/// Centralized multiperiod OPF over the union of all areas (the reference
/// solver of the paper-style comparisons).
std::unique_ptr<MultiPeriodOpf> assemble_mpopf(const UnionNetwork& u, const ItdCase& c);

} // namespace itdflex
