#pragma once

// Demand sweeps over (lambda, method) pairs and the CSV / SVG reports built
// from them.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acrelax/acnl.hpp"
#include "acrelax/graphkit.hpp"
#include "acrelax/ipm.hpp"
#include "acrelax/netcase.hpp"
#include "acrelax/tightness.hpp"

namespace acrelax {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Method { socp, sdp, nl };

const char* to_string(Method m) noexcept;
Method parse_method(std::string_view name);
/// Comma-separated list, duplicates removed, original order kept.
std::vector<Method> parse_methods(std::string_view list);

enum class CycleSource { basis, chordless };

const char* to_string(CycleSource c) noexcept;
CycleSource parse_cycle_source(std::string_view name);

/// "a:b:step" inclusive of b (within step/1e6), or a comma-separated list.
std::vector<double> parse_lambdas(std::string_view text);
std::vector<double> default_lambdas();

struct SweepConfig {
    std::string case_path;
    std::vector<double> lambdas = default_lambdas();
    std::vector<Method> methods = {Method::socp, Method::sdp, Method::nl};
    CycleSource cycle_source = CycleSource::basis;
    int max_cycle_len = 8;
    std::filesystem::path out_dir = "out";
    IpmSettings ipm;
    NlSettings nl;
    int threads = 0;  // 0: hardware concurrency

    /// Throws ConfigError.
    void validate() const;
};

struct RunRecord {
    std::string case_name;
    double lambda = 1.0;
    Method method = Method::socp;
    std::string status;
    std::optional<double> objective;
    double walltime_s = 0.0;
    std::vector<CliqueTr> tr_rows;
    std::vector<CycleRow> cycle_rows;
    std::optional<double> gap_pct;

    /// optimal (relaxations) or local_optimal (nl)
    bool solved() const noexcept;
};

/// Cycles of the network graph used for the angle-sum measure; the basis is
/// rooted at the slack bus.
std::vector<Cycle> network_cycles(const Network& net, CycleSource source, int max_len);

/// One scale, build, solve, measure pass. Gap is left empty.
RunRecord run_single(const Network& base, double lambda, Method method, const std::vector<Cycle>& cycles,
                     const SweepConfig& cfg);

/// Fills gap_pct of each solved relaxation record from the solved nl record
/// at the same (case, lambda).
void attach_gaps(std::vector<RunRecord>& records);

std::vector<RunRecord> run_sweep(const Network& net, const SweepConfig& cfg);
/// Loads cfg.case_path; parse failures propagate as CaseParseError.
std::vector<RunRecord> run_sweep(const SweepConfig& cfg);

std::string summary_csv(const std::vector<RunRecord>& records);
std::string tr_csv(const std::vector<RunRecord>& records);
std::string cycles_csv(const std::vector<RunRecord>& records);

/// Inverse of the three CSV writers; throws ConfigError on malformed input.
std::vector<RunRecord> parse_reports(std::string_view summary, std::string_view tr, std::string_view cycles);
std::vector<RunRecord> read_reports(const std::filesystem::path& dir);

/// summary.csv, tr.csv, cycles.csv and the SVG plots into out_dir.
/// Returns the paths written. Throws std::runtime_error on I/O failure.
std::vector<std::filesystem::path> write_reports(const std::vector<RunRecord>& records,
                                                 const std::filesystem::path& out_dir);

}  // namespace acrelax
