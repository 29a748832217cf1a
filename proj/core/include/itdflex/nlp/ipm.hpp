#pragma once

#include <string>

#include "itdflex/nlp/problem.hpp"

namespace itdflex {

struct IpmOptions {
    double tol = 1e-9;          // KKT tolerance (unscaled residuals)
    int max_iters = 400;
    double mu_init = 1e-1;      // initial barrier parameter
    double mu_linear = 0.2;     // mu <- max(floor, min(mu_linear*mu, mu^mu_super))
    double mu_super = 1.5;
    double tau = 0.995;         // fraction-to-boundary
    double delta_init = 1e-8;   // inertia-correction seed, doubled on retry
    bool scale_objective = true;
};

enum class NlpStatus { Optimal, Infeasible, IterationLimit };

const char* to_string(NlpStatus s);

struct KktResidual {
    double stationarity = 0.0;
    double feasibility = 0.0;
    double complementarity = 0.0;
    double max() const;
};

struct NlpSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd y_eq;   // equality multipliers
    Eigen::VectorXd z_ineq; // inequality multipliers, >= 0
    NlpStatus status = NlpStatus::IterationLimit;
    KktResidual kkt;
    double objective = 0.0;
    int iterations = 0;
    double wall_seconds = 0.0;
    std::string message;
};

/// Optional warm-start data; multipliers are pushed into the interior
/// (clipped away from zero) before use.
struct WarmStart {
    Eigen::VectorXd y_eq;
    Eigen::VectorXd z_ineq;
};

/// Primal-dual interior-point solve: slacked barrier on the inequalities,
/// Newton on the KKT system (sparse LDLt with inertia correction),
/// fraction-to-boundary rule and an l1-penalty merit line search.
NlpSolution solve_nlp(const NlpProblem& problem, const Eigen::VectorXd& x0,
                      const IpmOptions& options = {}, const WarmStart* warm = nullptr);

/// KKT residuals of (x, y, z) for `problem`; used by the acceptance tests.
KktResidual kkt_residual(const NlpProblem& problem, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y_eq, const Eigen::VectorXd& z_ineq);

} // namespace itdflex
