#include "itdflex/nlp/eq_qp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "itdflex/errors.hpp"

namespace itdflex {

namespace {

// indices of an independent row subset (pivoted QR on J^T, tolerance 1e-10)
std::vector<int> independent_rows(const Eigen::MatrixXd& j) {
    std::vector<int> keep;
    if (j.rows() == 0) return keep;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(j.transpose());
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    const auto& perm = qr.colsPermutation().indices();
    keep.reserve(rank);
    for (int i = 0; i < rank; ++i) keep.push_back(perm[i]);
    std::sort(keep.begin(), keep.end());
    return keep;
}

} // namespace

QpSolution solve_eq_qp(const EqQpProblem& qp) {
    const int n_blocks = static_cast<int>(qp.blocks.size());

    std::vector<int> block_offset(n_blocks, 0);
    int n = 0;
    for (int b = 0; b < n_blocks; ++b) {
        block_offset[b] = n;
        n += static_cast<int>(qp.blocks[b].grad.size());
    }

    // rank-filter the active rows per block
    std::vector<std::vector<int>> kept(n_blocks);
    int m_active = 0;
    for (int b = 0; b < n_blocks; ++b) {
        kept[b] = independent_rows(qp.blocks[b].jac_active);
        m_active += static_cast<int>(kept[b].size());
    }

    int m_spatial = 0, m_temporal = 0;
    for (const auto& g : qp.spatial) m_spatial += static_cast<int>(g.residual.size());
    for (const auto& g : qp.temporal) m_temporal += static_cast<int>(g.residual.size());

    const int dim = n + m_spatial + m_temporal + m_active;
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

    // Hessian blocks and gradients
    for (int b = 0; b < n_blocks; ++b) {
        const auto& blk = qp.blocks[b];
        const int nb = static_cast<int>(blk.grad.size());
        for (int i = 0; i < nb; ++i) {
            for (int j = 0; j < nb; ++j) {
                const double v = blk.hess(i, j);
                if (v != 0.0) trip.emplace_back(block_offset[b] + i, block_offset[b] + j, v);
            }
        }
        rhs.segment(block_offset[b], nb) = -blk.grad;
    }

    // consensus rows with eliminated slacks: C dy - (1/mu) lqp = -residual - dual/mu
    auto add_groups = [&](const std::vector<CouplingGroup>& groups, int row0) {
        int r = row0;
        for (const auto& g : groups) {
            const int mg = static_cast<int>(g.residual.size());
            for (const auto& [b, cb] : g.per_block) {
                for (int k = 0; k < cb.outerSize(); ++k) {
                    for (Eigen::SparseMatrix<double>::InnerIterator it(cb, k); it; ++it) {
                        trip.emplace_back(r + it.row(), block_offset[b] + it.col(), it.value());
                        trip.emplace_back(block_offset[b] + it.col(), r + it.row(), it.value());
                    }
                }
            }
            for (int i = 0; i < mg; ++i) {
                trip.emplace_back(r + i, r + i, -1.0 / g.penalty);
                rhs[r + i] = -g.residual[i] - g.dual[i] / g.penalty;
            }
            r += mg;
        }
        return r;
    };
    const int row_spatial = n;
    const int row_temporal = add_groups(qp.spatial, row_spatial);
    const int row_active = add_groups(qp.temporal, row_temporal);

    // null-space rows of the filtered active Jacobians
    {
        int r = row_active;
        for (int b = 0; b < n_blocks; ++b) {
            const auto& j = qp.blocks[b].jac_active;
            for (int idx : kept[b]) {
                for (int c = 0; c < j.cols(); ++c) {
                    const double v = j(idx, c);
                    if (v != 0.0) {
                        trip.emplace_back(r, block_offset[b] + c, v);
                        trip.emplace_back(block_offset[b] + c, r, v);
                    }
                }
                ++r;
            }
        }
    }

    Eigen::SparseMatrix<double> kkt0(dim, dim);
    kkt0.setFromTriplets(trip.begin(), trip.end());

    // factor with a tiny dual regularization on the active rows, then refine
    // against the unregularized matrix
    Eigen::VectorXd sol;
    double delta = 1e-11;
    bool ok = false;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
        Eigen::SparseMatrix<double> kkt = kkt0;
        std::vector<Eigen::Triplet<double>> reg;
        for (int i = row_active; i < dim; ++i) reg.emplace_back(i, i, -delta);
        Eigen::SparseMatrix<double> regm(dim, dim);
        regm.setFromTriplets(reg.begin(), reg.end());
        kkt += regm;
        ldlt.compute(kkt);
        if (ldlt.info() == Eigen::Success) {
            sol = ldlt.solve(rhs);
            for (int refine = 0; refine < 3; ++refine) {
                const Eigen::VectorXd resid = rhs - kkt0 * sol;
                sol += ldlt.solve(resid);
            }
            ok = sol.allFinite();
        }
        delta *= 2.0;
    }
    if (!ok) {
        throw SolverError("rank-deficient active set: coordination KKT is singular "
                          "after row filtering");
    }

    QpSolution out;
    out.kkt_residual = (rhs - kkt0 * sol).lpNorm<Eigen::Infinity>() /
                       std::max(1.0, rhs.lpNorm<Eigen::Infinity>());

    out.dy.resize(n_blocks);
    for (int b = 0; b < n_blocks; ++b) {
        const int nb = static_cast<int>(qp.blocks[b].grad.size());
        out.dy[b] = sol.segment(block_offset[b], nb);
    }
    int r = row_spatial;
    for (const auto& g : qp.spatial) {
        const int mg = static_cast<int>(g.residual.size());
        const Eigen::VectorXd lqp = sol.segment(r, mg);
        out.lambda_qp.push_back(lqp);
        out.s1.push_back((lqp - g.dual) / g.penalty);
        r += mg;
    }
    for (const auto& g : qp.temporal) {
        const int mg = static_cast<int>(g.residual.size());
        const Eigen::VectorXd kqp = sol.segment(r, mg);
        out.kappa_qp.push_back(kqp);
        out.s2.push_back((kqp - g.dual) / g.penalty);
        r += mg;
    }
    return out;
}

} // namespace itdflex
