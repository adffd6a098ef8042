#pragma once

// Network model for AC optimal power flow: MATPOWER-style case parsing,
// per-unit conversion, demand scaling and pi-model branch admittances.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace acrelax {

/// Raised for malformed case text. `line()` is 1-based, 0 when not tied to a line.
class CaseParseError : public std::runtime_error {
public:
    CaseParseError(const std::string& what, int line);
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Raised when a network fails validation (bad references, bounds, topology).
class NetworkError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// All quantities below are per-unit on the system MVA base once they live in
// a Network. The parser converts from MW / MVAr / $ forms.

struct Bus {
    int id = 0;
    double p_demand = 0.0;
    double q_demand = 0.0;
    double gs_shunt = 0.0;  // conductance draw at 1 pu voltage
    double bs_shunt = 0.0;  // susceptance injection at 1 pu voltage
    double v_min = 0.9;
    double v_max = 1.1;
    double base_kv = 0.0;
    bool is_slack = false;

    bool operator==(const Bus&) const = default;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double b_charge = 0.0;  // total line charging susceptance
    double tap = 1.0;
    double shift = 0.0;     // degrees
    double s_max = 0.0;     // 0 = unlimited

    bool rated() const noexcept { return s_max > 0.0; }
    bool operator==(const Branch&) const = default;
};

struct Generator {
    int bus = 0;
    double p_min = 0.0;
    double p_max = 0.0;
    double q_min = 0.0;
    double q_max = 0.0;
    // cost = c2 * p^2 + c1 * p + c0 with p in per-unit, cost in $/h
    double cost_c2 = 0.0;
    double cost_c1 = 0.0;
    double cost_c0 = 0.0;

    double cost(double p) const noexcept { return (cost_c2 * p + cost_c1) * p + cost_c0; }
    bool operator==(const Generator&) const = default;
};

/// Bus-admittance entries contributed by one branch (pi-model with tap and
/// phase shift). With Y_ff = g_ff + j b_ff etc., the branch current is
/// I_f = Y_ff V_f + Y_ft V_t and I_t = Y_tf V_f + Y_tt V_t.
///
/// Flows are expressed through the lifted products of the from-oriented pair,
/// c = Re(V_f^* V_t), s = Im(V_f^* V_t), so s changes sign when the pair is
/// read in the to-from direction.
struct BranchCoeffs {
    double g_ff = 0.0, b_ff = 0.0;
    double g_ft = 0.0, b_ft = 0.0;
    double g_tt = 0.0, b_tt = 0.0;
    double g_tf = 0.0, b_tf = 0.0;

    /// p_ft + j q_ft from c_ff = |V_f|^2 and the from-oriented pair (c, s).
    std::complex<double> from_flow(double c_ff, double c, double s) const noexcept {
        return {g_ff * c_ff + g_ft * c - b_ft * s, -b_ff * c_ff - b_ft * c - g_ft * s};
    }
    /// p_tf + j q_tf from c_tt = |V_t|^2 and the from-oriented pair (c, s).
    std::complex<double> to_flow(double c_tt, double c, double s) const noexcept {
        return {g_tt * c_tt + g_tf * c + b_tf * s, -b_tt * c_tt - b_tf * c + g_tf * s};
    }
};

BranchCoeffs branch_admittances(const Branch& br);

/// Immutable, validated network. Bus indices used across the library are
/// positions in `buses()` (file order); ids are the labels from the case file.
class Network {
public:
    Network(double base_mva, std::vector<Bus> buses, std::vector<Branch> branches,
            std::vector<Generator> generators, std::string name = {});

    double base_mva() const noexcept { return base_mva_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<Bus>& buses() const noexcept { return buses_; }
    const std::vector<Branch>& branches() const noexcept { return branches_; }
    const std::vector<Generator>& generators() const noexcept { return generators_; }
    const std::vector<BranchCoeffs>& coeffs() const noexcept { return coeffs_; }

    std::size_t num_buses() const noexcept { return buses_.size(); }
    std::size_t num_branches() const noexcept { return branches_.size(); }
    std::size_t num_generators() const noexcept { return generators_.size(); }

    /// Position of bus `id`; throws NetworkError for unknown ids.
    std::size_t bus_index(int id) const;
    bool has_bus(int id) const noexcept { return index_.contains(id); }
    std::size_t slack_index() const noexcept { return slack_; }

    std::size_t from_index(std::size_t k) const noexcept { return from_idx_[k]; }
    std::size_t to_index(std::size_t k) const noexcept { return to_idx_[k]; }
    /// Generator positions attached to each bus position.
    const std::vector<std::vector<std::size_t>>& gens_at_bus() const noexcept { return gens_at_; }

    double total_p_demand() const noexcept;
    double total_q_demand() const noexcept;
    /// Cumulative demand multiplier relative to the parsed case (1 after parse).
    double demand_ratio() const noexcept { return demand_ratio_; }

    bool operator==(const Network& other) const;

private:
    friend Network scale_demand(const Network& net, double lambda);

    double base_mva_;
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<Generator> generators_;
    std::string name_;

    std::unordered_map<int, std::size_t> index_;
    std::vector<std::size_t> from_idx_, to_idx_;
    std::vector<std::vector<std::size_t>> gens_at_;
    std::vector<BranchCoeffs> coeffs_;
    std::size_t slack_ = 0;

    // demands as parsed; scaled copies recompute from these so that
    // successive scalings compose exactly
    std::vector<double> nominal_p_, nominal_q_;
    double demand_ratio_ = 1.0;
};

/// Parse MATPOWER v2 case text. Out-of-service branches and generators are
/// dropped; gencost rows follow generator rows.
Network parse_case(std::string_view text, std::string name = {});
Network load_case_file(const std::string& path);

/// Inverse of parse_case (values written back in MW / MVAr / $ units).
std::string serialize_case(const Network& net);

/// Copy of `net` with every bus demand multiplied by `lambda` (> 0).
Network scale_demand(const Network& net, double lambda);

struct ShuntTotals {
    double g_sh = 0.0;
    double b_sh = 0.0;
};

/// Shunt admittance seen at bus `id`: the bus shunt plus the line-charging
/// halves of incident branches (from-side charging scaled by 1/tap^2).
ShuntTotals bus_shunt(const Network& net, int id);

}  // namespace acrelax
