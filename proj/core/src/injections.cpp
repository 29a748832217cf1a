#include "itdflex/acopf/injections.hpp"

#include <cmath>
#include <vector>

namespace itdflex {

namespace {

// shared algebra for the pair term p = v_i v_j (g c + b s), q = v_i v_j (g s - b c)
// with c = cos(th_i - th_j), s = sin(th_i - th_j)
struct PairTerm {
    double t, u;          // t = g c + b s, u = g s - b c
    double vi, vj;

    PairTerm(double g, double b, double thi, double thj, double vi_, double vj_)
        : vi(vi_), vj(vj_) {
        const double c = std::cos(thi - thj), s = std::sin(thi - thj);
        t = g * c + b * s;
        u = g * s - b * c;
    }

    double p() const { return vi * vj * t; }
    double q() const { return vi * vj * u; }

    // first derivatives of p and q over (thi, thj, vi, vj)
    void dp(double& dthi, double& dthj, double& dvi, double& dvj) const {
        dthi = -vi * vj * u;
        dthj = vi * vj * u;
        dvi = vj * t;
        dvj = vi * t;
    }
    void dq(double& dthi, double& dthj, double& dvi, double& dvj) const {
        dthi = vi * vj * t;
        dthj = -vi * vj * t;
        dvi = vj * u;
        dvj = vi * u;
    }
    // symmetric 4x4 second derivatives over (thi, thj, vi, vj)
    Eigen::Matrix4d hess_p() const {
        Eigen::Matrix4d h;
        const double vvt = vi * vj * t;
        h << -vvt, vvt, -vj * u, -vi * u,
             vvt, -vvt, vj * u, vi * u,
             -vj * u, vj * u, 0.0, t,
             -vi * u, vi * u, t, 0.0;
        return h;
    }
    Eigen::Matrix4d hess_q() const {
        Eigen::Matrix4d h;
        const double vvu = vi * vj * u;
        h << -vvu, vvu, vj * t, vi * t,
             vvu, -vvu, -vj * t, -vi * t,
             vj * t, -vj * t, 0.0, u,
             vi * t, -vi * t, u, 0.0;
        return h;
    }
};

} // namespace

Injections power_injections(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                            const YMatrix& y) {
    const int n = static_cast<int>(theta.size());
    Injections inj;
    inj.p = Eigen::VectorXd::Zero(n);
    inj.q = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < y.outerSize(); ++k) {
        for (YMatrix::InnerIterator it(y, k); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            const double g = it.value().real(), b = it.value().imag();
            if (i == j) {
                inj.p[i] += v[i] * v[i] * g;
                inj.q[i] -= v[i] * v[i] * b;
            } else {
                PairTerm pt(g, b, theta[i], theta[j], v[i], v[j]);
                inj.p[i] += pt.p();
                inj.q[i] += pt.q();
            }
        }
    }
    return inj;
}

InjectionJacobian injection_jacobian(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                                     const YMatrix& y) {
    const int n = static_cast<int>(theta.size());
    std::vector<Eigen::Triplet<double>> tp_th, tp_v, tq_th, tq_v;
    tp_th.reserve(2 * y.nonZeros());
    tp_v.reserve(2 * y.nonZeros());
    tq_th.reserve(2 * y.nonZeros());
    tq_v.reserve(2 * y.nonZeros());

    for (int k = 0; k < y.outerSize(); ++k) {
        for (YMatrix::InnerIterator it(y, k); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            const double g = it.value().real(), b = it.value().imag();
            if (i == j) {
                tp_v.emplace_back(i, i, 2.0 * v[i] * g);
                tq_v.emplace_back(i, i, -2.0 * v[i] * b);
            } else {
                PairTerm pt(g, b, theta[i], theta[j], v[i], v[j]);
                double dthi, dthj, dvi, dvj;
                pt.dp(dthi, dthj, dvi, dvj);
                tp_th.emplace_back(i, i, dthi);
                tp_th.emplace_back(i, j, dthj);
                tp_v.emplace_back(i, i, dvi);
                tp_v.emplace_back(i, j, dvj);
                pt.dq(dthi, dthj, dvi, dvj);
                tq_th.emplace_back(i, i, dthi);
                tq_th.emplace_back(i, j, dthj);
                tq_v.emplace_back(i, i, dvi);
                tq_v.emplace_back(i, j, dvj);
            }
        }
    }

    InjectionJacobian jac;
    jac.dp_dth.resize(n, n);
    jac.dp_dv.resize(n, n);
    jac.dq_dth.resize(n, n);
    jac.dq_dv.resize(n, n);
    jac.dp_dth.setFromTriplets(tp_th.begin(), tp_th.end());
    jac.dp_dv.setFromTriplets(tp_v.begin(), tp_v.end());
    jac.dq_dth.setFromTriplets(tq_th.begin(), tq_th.end());
    jac.dq_dv.setFromTriplets(tq_v.begin(), tq_v.end());
    return jac;
}

Eigen::SparseMatrix<double> injection_hessian(const Eigen::VectorXd& theta,
                                              const Eigen::VectorXd& v, const YMatrix& y,
                                              const Eigen::VectorXd& lp,
                                              const Eigen::VectorXd& lq) {
    const int n = static_cast<int>(theta.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(16 * y.nonZeros());

    for (int k = 0; k < y.outerSize(); ++k) {
        for (YMatrix::InnerIterator it(y, k); it; ++it) {
            const int i = static_cast<int>(it.row());
            const int j = static_cast<int>(it.col());
            const double g = it.value().real(), b = it.value().imag();
            const double wp = lp[i], wq = lq[i];
            if (wp == 0.0 && wq == 0.0) continue;
            if (i == j) {
                // v_i^2 terms only
                const double d2 = 2.0 * g * wp - 2.0 * b * wq;
                if (d2 != 0.0) trip.emplace_back(n + i, n + i, d2);
            } else {
                PairTerm pt(g, b, theta[i], theta[j], v[i], v[j]);
                const Eigen::Matrix4d h = wp * pt.hess_p() + wq * pt.hess_q();
                const int idx[4] = {i, j, n + i, n + j}; // (thi, thj, vi, vj)
                for (int a = 0; a < 4; ++a)
                    for (int c = 0; c < 4; ++c)
                        if (h(a, c) != 0.0) trip.emplace_back(idx[a], idx[c], h(a, c));
            }
        }
    }
    Eigen::SparseMatrix<double> hess(2 * n, 2 * n);
    hess.setFromTriplets(trip.begin(), trip.end());
    return hess;
}

FlowBranch make_flow_branch(int from, int to, double r, double x, double b_charge,
                            double s_max, bool enforce_limit) {
    const std::complex<double> ys = 1.0 / std::complex<double>(r, x);
    const std::complex<double> ysh(0.0, b_charge / 2.0);
    FlowBranch br;
    br.from = from;
    br.to = to;
    br.yff = ys + ysh;
    br.yft = -ys;
    br.ytf = -ys;
    br.ytt = ys + ysh;
    br.s_max = s_max;
    br.enforce_limit = enforce_limit && s_max > 0.0;
    return br;
}

namespace {

// P, Q at a branch terminal: self admittance a on bus i, mutual b toward bus j
void end_pq(double thi, double thj, double vi, double vj, std::complex<double> a,
            std::complex<double> b, double& p, double& q) {
    PairTerm pt(b.real(), b.imag(), thi, thj, vi, vj);
    p = vi * vi * a.real() + pt.p();
    q = -vi * vi * a.imag() + pt.q();
}

} // namespace

BranchFlows branch_flows(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                         const std::vector<FlowBranch>& branches) {
    const int m = static_cast<int>(branches.size());
    BranchFlows out;
    out.s2_from.resize(m);
    out.s2_to.resize(m);
    for (int a = 0; a < m; ++a) {
        const auto& br = branches[a];
        double pf, qf, pt, qt;
        end_pq(theta[br.from], theta[br.to], v[br.from], v[br.to], br.yff, br.yft, pf, qf);
        end_pq(theta[br.to], theta[br.from], v[br.to], v[br.from], br.ytt, br.ytf, pt, qt);
        out.s2_from[a] = pf * pf + qf * qf;
        out.s2_to[a] = pt * pt + qt * qt;
    }
    return out;
}

FlowEndDerivatives flow_end_derivatives(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                                        const FlowBranch& branch, bool from_end) {
    // local variable order: (th_f, th_t, v_f, v_t)
    const int i = from_end ? branch.from : branch.to;
    const int j = from_end ? branch.to : branch.from;
    const std::complex<double> a = from_end ? branch.yff : branch.ytt;
    const std::complex<double> b = from_end ? branch.yft : branch.ytf;

    PairTerm pt(b.real(), b.imag(), theta[i], theta[j], v[i], v[j]);
    const double p = v[i] * v[i] * a.real() + pt.p();
    const double q = -v[i] * v[i] * a.imag() + pt.q();

    // gradients over (th_i, th_j, v_i, v_j)
    Eigen::Vector4d gp, gq;
    double dthi, dthj, dvi, dvj;
    pt.dp(dthi, dthj, dvi, dvj);
    gp << dthi, dthj, dvi + 2.0 * v[i] * a.real(), dvj;
    pt.dq(dthi, dthj, dvi, dvj);
    gq << dthi, dthj, dvi - 2.0 * v[i] * a.imag(), dvj;

    Eigen::Matrix4d hp = pt.hess_p();
    hp(2, 2) += 2.0 * a.real();
    Eigen::Matrix4d hq = pt.hess_q();
    hq(2, 2) += -2.0 * a.imag();

    FlowEndDerivatives d;
    d.value = p * p + q * q;
    d.grad = 2.0 * (p * gp + q * gq);
    d.hess = 2.0 * (gp * gp.transpose() + p * hp + gq * gq.transpose() + q * hq);

    if (!from_end) {
        // reorder from (th_t, th_f, v_t, v_f) in local terms to the caller's
        // fixed (th_f, th_t, v_f, v_t) order
        const Eigen::Vector4i perm(1, 0, 3, 2);
        Eigen::Vector4d g2;
        Eigen::Matrix4d h2;
        for (int r = 0; r < 4; ++r) {
            g2[perm[r]] = d.grad[r];
            for (int c = 0; c < 4; ++c) h2(perm[r], perm[c]) = d.hess(r, c);
        }
        d.grad = g2;
        d.hess = h2;
    }
    return d;
}

} // namespace itdflex
