#pragma once

// Local solution of the non-convex AC OPF in rectangular voltage coordinates
// by a primal-dual log-barrier Newton method, plus voltage recovery from
// relaxation solutions and an AC feasibility check.

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "acrelax/conemodel.hpp"
#include "acrelax/netcase.hpp"

namespace acrelax {

struct VoltageProfile {
    std::vector<double> e;  // real parts, pu
    std::vector<double> f;  // imaginary parts, pu

    std::size_t size() const noexcept { return e.size(); }
    double magnitude(std::size_t i) const { return std::hypot(e[i], f[i]); }
};

/// e = 1, f = 0 at every bus.
VoltageProfile flat_profile(const Network& net);

enum class NlStatus { local_optimal, infeasible_or_stalled };

const char* to_string(NlStatus s) noexcept;

struct NlSettings {
    int max_iterations = 150;
    double feasibility_tol = 1e-8;
    double gradient_tol = 1e-6;
    double complementarity_tol = 1e-6;
    double cost_tol = 1e-8;
    double step_fraction = 0.99995;
    double centering = 0.1;
};

struct NlResult {
    NlStatus status = NlStatus::infeasible_or_stalled;
    VoltageProfile voltage;
    std::vector<double> p_gen, q_gen;
    double objective = 0.0;      // $/h
    double max_violation = 0.0;  // ac_residual at the returned point
    int iterations = 0;
    std::string diagnostics;
};

/// Smooth NLP over z = (e, f, p_g, q_g):
///   equalities    nodal P and Q balance, f_slack = 0
///   inequalities  voltage magnitude squared, generation bounds, squared
///                 apparent flow on rated branches (both ends)
class AcProblem {
public:
    explicit AcProblem(const Network& net);

    int num_vars() const noexcept { return nv_; }
    int num_eq() const noexcept { return 2 * nb_ + 1; }
    int num_ineq() const noexcept { return static_cast<int>(ineq_.size()); }

    Eigen::VectorXd pack(const VoltageProfile& v, const std::vector<double>& pg,
                         const std::vector<double>& qg) const;
    VoltageProfile voltage(const Eigen::VectorXd& z) const;
    std::vector<double> p_gen(const Eigen::VectorXd& z) const;
    std::vector<double> q_gen(const Eigen::VectorXd& z) const;

    double objective(const Eigen::VectorXd& z) const;
    Eigen::VectorXd objective_gradient(const Eigen::VectorXd& z) const;

    /// Balance mismatch: injections leaving each bus through branches and
    /// shunts plus demand minus generation; rows (P_0..P_n-1, Q_0.., f_slack).
    Eigen::VectorXd eq(const Eigen::VectorXd& z) const;
    Eigen::MatrixXd eq_jacobian(const Eigen::VectorXd& z) const;
    Eigen::VectorXd ineq(const Eigen::VectorXd& z) const;  // h(z) <= 0
    Eigen::MatrixXd ineq_jacobian(const Eigen::VectorXd& z) const;
    /// Hessian of f + lam'g + mu'h.
    Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd& z, const Eigen::VectorXd& lam,
                                       const Eigen::VectorXd& mu) const;

private:
    // u' Q u over u = (e_a, f_a, e_b, f_b)
    struct Quad {
        int a = 0, b = 0;
        Eigen::Matrix4d q;
        double eval(const Eigen::VectorXd& z, int nb) const;
        Eigen::Vector4d grad(const Eigen::VectorXd& z, int nb) const;
    };
    enum class IneqKind { vmin, vmax, pmin, pmax, qmin, qmax, flow };
    struct Ineq {
        IneqKind kind;
        int index;      // bus, generator, or flow quad pair index
        double bound;
    };

    void scatter_grad(const Quad& q, const Eigen::Vector4d& g, double w, Eigen::Ref<Eigen::VectorXd> row) const;
    void scatter_hess(const Quad& q, const Eigen::Matrix4d& h, double w, Eigen::MatrixXd& out) const;

    const Network& net_;
    int nb_ = 0, ng_ = 0, nv_ = 0;
    std::vector<Quad> p_quads_, q_quads_;  // one per branch end: 2k from side, 2k+1 to side
    std::vector<int> quad_bus_;
    std::vector<Ineq> ineq_;
};

/// Primal-dual barrier Newton from `start` (dispatch starts mid-range).
NlResult solve_acopf(const Network& net, const VoltageProfile& start, const NlSettings& settings = {});

/// Runs from the voltage recovered from the clique SDP at the same demand
/// (when that relaxation solves to optimality) and from the flat profile;
/// returns the lower-cost local optimum, else the flat-start result.
NlResult solve_acopf_warm(const Network& net, const NlSettings& settings = {}, const IpmSettings& ipm = {});

/// |V_i| = sqrt(c_ii); angles propagated from the slack over the BFS tree of
/// the network graph with theta_j = theta_i + atan2(s_ij, c_ij).
VoltageProfile recover_voltage(const RelaxSolution& sol, const Network& net);

/// Max nodal balance mismatch plus max bound violation (voltage magnitude,
/// generation, apparent flow), in pu.
double ac_residual(const Network& net, const VoltageProfile& v, const std::vector<double>& p_gen,
                   const std::vector<double>& q_gen);

}  // namespace acrelax
