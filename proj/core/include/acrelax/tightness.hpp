#pragma once

// Tightness measures of a solved relaxation: eigenvalue ratio of clique
// moment matrices, optimality gap against a local nonlinear optimum, and
// angle sums of lifted pairs around cycles.

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <vector>

#include "acrelax/conemodel.hpp"
#include "acrelax/graphkit.hpp"

namespace acrelax {

class TightnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kTrCap = 16.0;
/// Negative second eigenvalues down to -kPsdSlack * l1 count as zero. SOCP
/// clique matrices read c_ii from the bus columns while each cone holds a copy
/// tied by an equality row, so they inherit the solver's feasibility error.
inline constexpr double kPsdSlack = 1e-6;

struct CliqueMatrixView {
    int clique_index = 0;
    std::vector<int> members;
    Eigen::MatrixXcd matrix;      // Hermitian
    Eigen::VectorXd eigenvalues;  // descending
};

/// Wraps a Hermitian matrix (checked within 1e-9 relative) and computes its
/// eigenvalues.
CliqueMatrixView make_view(int clique_index, std::vector<int> members, Eigen::MatrixXcd matrix);

/// SOCP: diagonal c_ii, off-diagonal c_ij + j s_ij from lifted pairs.
/// SDP: the moment matrix read from the clique's PSD block.
CliqueMatrixView clique_matrix(const RelaxSolution& sol, const Clique& c);

/// log10(l1 / max(l2, 1e-16 l1)), capped at 16. A missing second eigenvalue
/// counts as 0. Throws when l1 <= 0 or l2 < -kPsdSlack l1.
double tr_from_eigenvalues(double l1, double l2);
double tr_measure(const CliqueMatrixView& m);

/// 100 (obj_nl - obj_relax) / obj_nl; throws for obj_nl = 0 or non-finite input.
double gap_measure(double obj_nl, double obj_relax);

struct CycleSum {
    double raw_deg = 0.0;      // plain sum of pair angles
    double wrapped_deg = 0.0;  // raw reduced to (-180, 180]
};

double wrap_degrees(double deg);

/// Sum of atan2(s, c) of the oriented pair on each cycle edge, in degrees.
/// Throws TightnessError when an edge has no lifted pair.
CycleSum cycle_measure(const RelaxSolution& sol, const Cycle& cyc);

struct CliqueTr {
    int clique_id = 0;
    int clique_size = 0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double tr = 0.0;
};

struct CycleRow {
    int cycle_id = 0;
    int cycle_len = 0;
    CycleSum sum;
};

struct TightnessReport {
    double lambda = 1.0;
    Relaxation method = Relaxation::socp;
    std::vector<CliqueTr> cliques;
    std::vector<CycleRow> cycles;
    double relax_objective = 0.0;
    std::optional<double> nl_objective;
    std::optional<double> gap_pct;
};

/// Requires an optimal solution.
TightnessReport tightness_report(const RelaxSolution& sol, const std::vector<Cycle>& cycles, double lambda,
                                 std::optional<double> nl_objective = std::nullopt);

}  // namespace acrelax
