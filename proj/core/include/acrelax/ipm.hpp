#pragma once

// Primal-dual path-following interior-point method for conic programs over
// nonnegative, second-order, rotated second-order and PSD cones.
//
// The solver works on the homogeneous self-dual embedding
//
//     A x - b tau = 0,   A'y + s - c tau = 0,   c'x - b'y + kappa = 0,
//     x in K, s in K*, tau, kappa >= 0,
//
// uses Nesterov-Todd scaling with Mehrotra predictor-corrector steps, and
// factors the quasi-definite augmented KKT system with a sparse LDL'.

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "acrelax/conic_program.hpp"

namespace acrelax {

enum class SolveStatus {
    optimal,
    primal_infeasible,
    dual_infeasible,
    numerical_failure,
};

const char* to_string(SolveStatus s) noexcept;

struct IpmSettings {
    int max_iterations = 200;
    double feasibility_tol = 1e-8;
    double gap_tol = 1e-8;
    double step_fraction = 0.99;
    double infeasibility_tol = 1e-8;
    double static_regularization = 1e-10;
    int refinement_steps = 20;

    void validate() const;
};

/// Snapshot passed to the optional iteration observer (unscaled by tau).
struct IpmIterate {
    int iteration = 0;
    const Eigen::VectorXd* x = nullptr;
    const Eigen::VectorXd* y = nullptr;
    const Eigen::VectorXd* s = nullptr;
    double tau = 1.0;
    double kappa = 1.0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double mu = 0.0;
    double step = 0.0;
    double x_margin = 0.0;  // smallest Jordan eigenvalue of x over all blocks
    double s_margin = 0.0;
};

struct IpmResult {
    SolveStatus status = SolveStatus::numerical_failure;
    Eigen::VectorXd x;  // primal (or dual-infeasibility ray)
    Eigen::VectorXd y;  // equality multipliers (or primal-infeasibility ray)
    Eigen::VectorXd s;  // dual slack
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
};

class IpmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by presolve when zero or duplicate equality rows disagree with b.
class InconsistentEqualities : public IpmError {
public:
    using IpmError::IpmError;
};

using IpmObserver = std::function<void(const IpmIterate&)>;

IpmResult solve(const ConicProgram& prog, const IpmSettings& settings = {},
                const IpmObserver& observer = {}, std::ostream* log = nullptr);

struct KktResiduals {
    double primal = 0.0;  // ||A x - b||
    double dual = 0.0;    // ||A'y + s - c||
    double gap = 0.0;     // |x's| (complementarity)
};

KktResiduals kkt_residuals(const ConicProgram& prog, const IpmResult& result);

/// True when x lies in K (up to `tol` on Jordan eigenvalues) for the program's cones.
bool in_cone(const ConicProgram& prog, const Eigen::VectorXd& x, double tol);
/// True when s lies in the dual cone K* (up to `tol`).
bool in_dual_cone(const ConicProgram& prog, const Eigen::VectorXd& s, double tol);

/// Mechanical certificate checks. Primal infeasibility: -A'y in K*, b'y > 0.
/// Dual infeasibility: A x = 0 (relative), x in K, c'x < 0.
bool verify_primal_infeasibility(const ConicProgram& prog, const Eigen::VectorXd& y, double tol);
bool verify_dual_infeasibility(const ConicProgram& prog, const Eigen::VectorXd& x, double tol);

}  // namespace acrelax
