#pragma once

// Generators and independent oracles shared by the unit, property and
// acceptance tests.

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "acrelax/acnl.hpp"
#include "acrelax/conemodel.hpp"
#include "acrelax/conic_program.hpp"
#include "acrelax/ipm.hpp"
#include "acrelax/netcase.hpp"

namespace fixtures {

using acrelax::ConicProgram;
using acrelax::Network;
using Rng = std::mt19937_64;

std::string data_path(const std::string& file);

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Tree network: a random spanning tree on n buses, no line charging or taps,
/// loose voltage bounds, generators with increasing linear-quadratic costs and
/// enough capacity for the random positive demands.
Network random_radial(Rng& rng, int n);

/// Five buses with one cycle, line charging, an off-nominal tap with phase
/// shift, rated branches and two generators. Used for derivative checks.
Network random_meshed5(Rng& rng);

// --- conic programs ---------------------------------------------------------

/// min c'z over {G z <= h} in dimension n with a box |z_i| <= box, mapped to
/// standard form with shifted variables and slacks.
struct InequalityLp {
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    Eigen::VectorXd c;
    double box = 0.0;
};

InequalityLp random_lp(Rng& rng, int n);
/// Standard form with columns (z + box, slack), rows G (u - box) + w = h.
ConicProgram to_conic(const InequalityLp& lp);
/// Smallest objective over all feasible basic solutions; +inf when empty.
double vertex_enumeration(const InequalityLp& lp);

/// Strictly feasible primal and dual by construction, so an optimum exists:
/// b = A x0, c = A'y0 + s0 with x0, s0 interior.
ConicProgram random_socp(Rng& rng);
ConicProgram random_sdp(Rng& rng);

struct RelativeKkt {
    double primal = 0.0;  // ||Ax - b|| / (1 + ||b||)
    double dual = 0.0;    // ||A'y + s - c|| / (1 + ||c||)
    double gap = 0.0;     // |x's| / (1 + |c'x|)
    double cone = 0.0;    // most negative Jordan eigenvalue of x or s, as a positive number

    double worst() const;
};

RelativeKkt relative_kkt(const ConicProgram& p, const acrelax::IpmResult& r);

// --- relaxation helpers -----------------------------------------------------

/// Lifted solution of an actual voltage assignment: every clique matrix is
/// V_c V_c^* and every pair matches the phasors.
acrelax::RelaxSolution solution_from_voltage(const Network& net, const std::vector<acrelax::Clique>& cliques,
                                             const acrelax::VoltageProfile& v, acrelax::Relaxation method);

/// Largest (c_ii c_jj - c_ij^2 - s_ij^2) / (c_ii c_jj) over lifted pairs.
double max_cone_slack(const acrelax::RelaxSolution& sol);

}  // namespace fixtures
