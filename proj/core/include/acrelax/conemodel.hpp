#pragma once

// Conic relaxations of AC optimal power flow in lifted variables
//
//     c_ii = |V_i|^2,   c_ij + j s_ij = V_i^* V_j   (i < j, bus positions)
//
// SOCP: one rotated cone c_ij^2 + s_ij^2 <= c_ii c_jj per lifted pair.
// SDP:  one PSD block per maximal clique holding the realified moment matrix
//       [Re W, -Im W; Im W, Re W] with W_ab = V_a^* V_b over clique members.
//
// Both share the linear skeleton: nodal balance, branch flows, voltage and
// generation bounds, flow-limit cones on rated branches, and quadratic cost
// epigraphs (t_g >= c2 p_g^2 as a rotated cone).

#include <Eigen/Core>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "acrelax/conic_program.hpp"
#include "acrelax/graphkit.hpp"
#include "acrelax/ipm.hpp"
#include "acrelax/netcase.hpp"

namespace acrelax {

enum class Relaxation { socp, sdp };

const char* to_string(Relaxation r) noexcept;

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Affine view of one column: value = scale * x[column] + offset. A negative
/// column denotes a constant.
struct VarRef {
    int column = -1;
    double scale = 1.0;
    double offset = 0.0;

    bool is_column() const noexcept { return column >= 0; }
    double value(const Eigen::VectorXd& x) const { return is_column() ? scale * x[column] + offset : offset; }
};

struct PairRef {
    VarRef c;  // Re(V_i^* V_j)
    VarRef s;  // Im(V_i^* V_j)
};

struct FlowRef {
    VarRef p;
    VarRef q;
};

/// Physical dimension of a column or row, used by the construction audit.
enum class Unit { voltage_sq, power, money, root_money, unitless };

struct VariableMap {
    Relaxation method = Relaxation::socp;
    std::vector<VarRef> c_diag;             // per bus position
    std::map<Edge, PairRef> pairs;          // key (i, j) with i < j
    std::vector<VarRef> p_gen, q_gen;       // per generator
    std::vector<VarRef> t_gen;              // cost epigraph, constant 0 when c2 = 0
    std::vector<FlowRef> flow_from, flow_to;  // columns only on rated branches
    std::vector<Clique> cliques;            // SDP blocks, or SOCP clique-complete pairs
    std::vector<int> block_start;           // SDP: first column of each clique block
    std::vector<Unit> column_units;
    std::vector<Unit> row_units;

    const PairRef* find_pair(int i, int j) const;
};

struct ConicModel {
    ConicProgram program;
    VariableMap map;
};

/// Maximal cliques of the chordal extension of the network graph.
std::vector<Clique> network_cliques(const Network& net);

/// With `clique_complete`, every pair inside a maximal clique of the chordal
/// extension is lifted; otherwise only branch pairs are.
ConicModel build_socp(const Network& net, bool clique_complete = true);

/// Throws ModelError when a branch is not covered by any clique or a clique
/// refers to unknown buses.
ConicModel build_sdp(const Network& net, const std::vector<Clique>& cliques);
ConicModel build_sdp(const Network& net);

/// Rows or objective entries whose column units do not fit the row's unit.
/// Empty for a consistent model.
std::vector<std::string> unit_audit(const ConicModel& model);

struct RelaxSolution {
    SolveStatus status = SolveStatus::numerical_failure;
    Relaxation method = Relaxation::socp;
    double objective = 0.0;  // $/h
    std::vector<double> c_diag;
    std::map<Edge, std::pair<double, double>> pairs;  // (c, s) keyed i < j
    std::vector<double> p_gen, q_gen;
    std::vector<std::complex<double>> flow_from, flow_to;  // per branch, pu
    std::vector<Clique> cliques;
    std::vector<Eigen::MatrixXcd> clique_w;  // SDP: W_c read from each PSD block

    bool optimal() const noexcept { return status == SolveStatus::optimal; }
    bool has_pair(int i, int j) const;
    /// (c_ij, s_ij) oriented from i to j; throws ModelError when absent.
    std::pair<double, double> pair(int i, int j) const;
};

/// Throws ModelError when the result vectors do not fit the program.
RelaxSolution extract_solution(const ConicProgram& prog, const VariableMap& map, const Network& net,
                               const IpmResult& result);

}  // namespace acrelax
