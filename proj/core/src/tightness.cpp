#include "acrelax/tightness.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <string>

namespace acrelax {

CliqueMatrixView make_view(int clique_index, std::vector<int> members, Eigen::MatrixXcd matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
        throw TightnessError("clique matrix must be square and nonempty");
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw TightnessError("clique matrix is not Hermitian");
    CliqueMatrixView v;
    v.clique_index = clique_index;
    v.members = std::move(members);
    v.matrix = 0.5 * (matrix + matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(v.matrix, Eigen::EigenvaluesOnly);
    v.eigenvalues = es.eigenvalues().reverse();
    return v;
}

CliqueMatrixView clique_matrix(const RelaxSolution& sol, const Clique& c) {
    if (!sol.optimal()) throw TightnessError("clique matrix needs an optimal solution");
    if (sol.method == Relaxation::sdp) {
        if (c.index < 0 || c.index >= static_cast<int>(sol.clique_w.size()))
            throw TightnessError("clique index out of range");
        return make_view(c.index, c.members, sol.clique_w[c.index]);
    }
    const int k = static_cast<int>(c.members.size());
    Eigen::MatrixXcd w(k, k);
    for (int a = 0; a < k; ++a) {
        w(a, a) = sol.c_diag.at(c.members[a]);
        for (int z = a + 1; z < k; ++z) {
            if (!sol.has_pair(c.members[a], c.members[z]))
                throw TightnessError("missing lifted pair inside clique " + std::to_string(c.index));
            const auto [cv, sv] = sol.pair(c.members[a], c.members[z]);
            w(a, z) = {cv, sv};
            w(z, a) = {cv, -sv};
        }
    }
    return make_view(c.index, c.members, w);
}

double tr_from_eigenvalues(double l1, double l2) {
    if (!(l1 > 0.0)) throw TightnessError("largest eigenvalue is not positive");
    if (l2 < -kPsdSlack * l1) throw TightnessError("clique matrix is not positive semidefinite");
    const double tr = std::log10(l1 / std::max(l2, 1e-16 * l1));
    return std::min(tr, kTrCap);
}

double tr_measure(const CliqueMatrixView& m) {
    const double l1 = m.eigenvalues[0];
    const double l2 = m.eigenvalues.size() > 1 ? m.eigenvalues[1] : 0.0;
    return tr_from_eigenvalues(l1, l2);
}

double gap_measure(double obj_nl, double obj_relax) {
    if (!std::isfinite(obj_nl) || !std::isfinite(obj_relax)) throw TightnessError("objectives must be finite");
    if (obj_nl == 0.0) throw TightnessError("nonlinear objective is zero");
    return 100.0 * (obj_nl - obj_relax) / obj_nl;
}

double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

CycleSum cycle_measure(const RelaxSolution& sol, const Cycle& cyc) {
    if (!sol.optimal()) throw TightnessError("cycle measure needs an optimal solution");
    double sum = 0.0;
    for (auto [i, j] : cyc.oriented_edges()) {
        if (!sol.has_pair(i, j))
            throw TightnessError("cycle " + std::to_string(cyc.index) + " edge has no lifted pair");
        const auto [c, s] = sol.pair(i, j);
        sum += std::atan2(s, c);
    }
    CycleSum out;
    out.raw_deg = sum * 180.0 / std::numbers::pi;
    out.wrapped_deg = wrap_degrees(out.raw_deg);
    return out;
}

TightnessReport tightness_report(const RelaxSolution& sol, const std::vector<Cycle>& cycles, double lambda,
                                 std::optional<double> nl_objective) {
    if (!sol.optimal()) throw TightnessError("tightness report needs an optimal solution");
    TightnessReport r;
    r.lambda = lambda;
    r.method = sol.method;
    r.relax_objective = sol.objective;
    r.nl_objective = nl_objective;
    if (nl_objective) r.gap_pct = gap_measure(*nl_objective, sol.objective);
    for (const Clique& c : sol.cliques) {
        const CliqueMatrixView v = clique_matrix(sol, c);
        CliqueTr row;
        row.clique_id = c.index;
        row.clique_size = static_cast<int>(c.members.size());
        row.lambda1 = v.eigenvalues[0];
        row.lambda2 = v.eigenvalues.size() > 1 ? v.eigenvalues[1] : 0.0;
        row.tr = tr_measure(v);
        r.cliques.push_back(row);
    }
    for (const Cycle& cyc : cycles)
        r.cycles.push_back({cyc.index, static_cast<int>(cyc.buses.size()), cycle_measure(sol, cyc)});
    return r;
}

}  // namespace acrelax
