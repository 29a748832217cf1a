#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace itdflex {

/// Smooth NLP in the form
///     min f(x)   s.t.  c_eq(x) = 0,  c_ineq(x) <= 0.
/// Variable bounds are posed as linear inequality rows by the assemblers, so
/// inequality multipliers cover box constraints too (the active-set machinery
/// downstream relies on that). Callbacks must be deterministic and reentrant;
/// Jacobian/Hessian sparsity must not change between calls at the same
/// dimensions.
class NlpProblem {
public:
    virtual ~NlpProblem() = default;

    virtual int num_vars() const = 0;
    virtual int num_eq() const = 0;
    virtual int num_ineq() const = 0;

    virtual double objective(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd objective_grad(const Eigen::VectorXd& x) const = 0;

    virtual Eigen::VectorXd eq_constraints(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::VectorXd ineq_constraints(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::SparseMatrix<double> eq_jacobian(const Eigen::VectorXd& x) const = 0;
    virtual Eigen::SparseMatrix<double> ineq_jacobian(const Eigen::VectorXd& x) const = 0;

    /// sigma*hess(f) + sum_i y_eq[i]*hess(c_eq_i) + sum_j y_ineq[j]*hess(c_ineq_j),
    /// returned as a full symmetric sparse matrix.
    virtual Eigen::SparseMatrix<double>
    lagrangian_hessian(const Eigen::VectorXd& x, double sigma, const Eigen::VectorXd& y_eq,
                       const Eigen::VectorXd& y_ineq) const = 0;

    /// A point to start from when the caller has nothing better.
    virtual Eigen::VectorXd initial_point() const {
        return Eigen::VectorXd::Zero(num_vars());
    }
};

} // namespace itdflex
