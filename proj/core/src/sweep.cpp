#include "acrelax/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "acrelax/conemodel.hpp"
#include "acrelax/svg_plot.hpp"

namespace acrelax {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto p = s.find(sep);
        out.push_back(s.substr(0, p));
        if (p == std::string_view::npos) break;
        s.remove_prefix(p + 1);
    }
    return out;
}

double parse_number(std::string_view text, const char* what) {
    const std::string s(trim(text));
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw ConfigError(std::string("bad ") + what + " '" + s + "'");
    return v;
}

int parse_int(std::string_view text, const char* what) {
    const double v = parse_number(text, what);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(std::string("bad ") + what);
    return static_cast<int>(v);
}

// 12 significant digits: short, stable, and enough to tell grid points apart
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

double round_grid(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

const std::string& checked_case(const std::string& name) {
    if (name.find_first_of(",\n\r") != std::string::npos)
        throw ConfigError("case name '" + name + "' cannot be written to CSV");
    return name;
}

std::string key_prefix(const RunRecord& r) {
    return checked_case(r.case_name) + ',' + num(r.lambda) + ',' + to_string(r.method);
}

using Key = std::tuple<std::string, double, Method>;

Key key_of(const RunRecord& r) { return {r.case_name, r.lambda, r.method}; }

void check_header(std::string_view line, std::string_view expected, const char* file) {
    if (trim(line) != expected) throw ConfigError(std::string(file) + ": unexpected header");
}

std::vector<std::string_view> data_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    for (auto line : split(text, '\n'))
        if (!trim(line).empty()) lines.push_back(line);
    return lines;
}

constexpr std::string_view kSummaryHeader = "case,lambda,method,status,objective,gap_pct,walltime_s";
constexpr std::string_view kTrHeader = "case,lambda,method,clique_id,clique_size,lambda1,lambda2,tr";
constexpr std::string_view kCyclesHeader =
    "case,lambda,method,cycle_id,cycle_len,angle_sum_deg_raw,angle_sum_deg_wrapped";

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::string lambda_label(double l) { return "lambda=" + num(l); }

}  // namespace

const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::socp: return "socp";
        case Method::sdp: return "sdp";
        case Method::nl: return "nl";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    name = trim(name);
    if (name == "socp") return Method::socp;
    if (name == "sdp") return Method::sdp;
    if (name == "nl") return Method::nl;
    throw ConfigError("unknown method '" + std::string(name) + "' (expected socp, sdp or nl)");
}

std::vector<Method> parse_methods(std::string_view list) {
    std::vector<Method> out;
    for (auto part : split(list, ',')) {
        const Method m = parse_method(part);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    return out;
}

const char* to_string(CycleSource c) noexcept { return c == CycleSource::basis ? "basis" : "chordless"; }

CycleSource parse_cycle_source(std::string_view name) {
    name = trim(name);
    if (name == "basis") return CycleSource::basis;
    if (name == "chordless") return CycleSource::chordless;
    throw ConfigError("unknown cycle source '" + std::string(name) + "' (expected basis or chordless)");
}

std::vector<double> parse_lambdas(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ConfigError("empty lambda list");
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw ConfigError("lambda range must be start:stop:step");
        const double a = parse_number(parts[0], "lambda start");
        const double b = parse_number(parts[1], "lambda stop");
        const double step = parse_number(parts[2], "lambda step");
        if (step <= 0 || b < a) throw ConfigError("lambda range needs step > 0 and stop >= start");
        const double n = std::floor((b - a) / step + 1e-6);
        if (n > 1e5) throw ConfigError("lambda range too long");
        for (int k = 0; k <= static_cast<int>(n); ++k) out.push_back(round_grid(a + k * step));
    } else {
        for (auto part : split(text, ',')) out.push_back(parse_number(part, "lambda"));
    }
    for (double l : out)
        if (!(l > 0)) throw ConfigError("lambda values must be positive");
    return out;
}

std::vector<double> default_lambdas() { return {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}; }

void SweepConfig::validate() const {
    if (lambdas.empty()) throw ConfigError("empty lambda list");
    for (double l : lambdas)
        if (!(l > 0) || !std::isfinite(l)) throw ConfigError("lambda values must be positive");
    if (methods.empty()) throw ConfigError("no methods selected");
    if (cycle_source == CycleSource::chordless && max_cycle_len < 3)
        throw ConfigError("max cycle length must be at least 3");
    if (threads < 0) throw ConfigError("thread count must be >= 0");
    try {
        ipm.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

bool RunRecord::solved() const noexcept {
    return method == Method::nl ? status == to_string(NlStatus::local_optimal)
                                : status == to_string(SolveStatus::optimal);
}

std::vector<Cycle> network_cycles(const Network& net, CycleSource source, int max_len) {
    const BusGraph g = build_graph(net);
    if (source == CycleSource::basis) return cycle_basis(g, static_cast<int>(net.slack_index()));
    return enumerate_chordless_cycles(g, max_len);
}

RunRecord run_single(const Network& base, double lambda, Method method, const std::vector<Cycle>& cycles,
                     const SweepConfig& cfg) {
    RunRecord rec;
    rec.case_name = base.name();
    rec.lambda = lambda;
    rec.method = method;
    const auto t0 = std::chrono::steady_clock::now();
    const Network net = scale_demand(base, lambda);
    if (method == Method::nl) {
        const NlResult r = solve_acopf_warm(net, cfg.nl, cfg.ipm);
        rec.status = to_string(r.status);
        if (r.status == NlStatus::local_optimal) rec.objective = r.objective;
    } else {
        try {
            const ConicModel m = method == Method::socp ? build_socp(net) : build_sdp(net);
            const IpmResult r = solve(m.program, cfg.ipm);
            rec.status = to_string(r.status);
            if (r.status == SolveStatus::optimal) {
                const RelaxSolution sol = extract_solution(m.program, m.map, net, r);
                const TightnessReport rep = tightness_report(sol, cycles, lambda);
                rec.objective = sol.objective;
                rec.tr_rows = rep.cliques;
                rec.cycle_rows = rep.cycles;
            }
        } catch (const IpmError&) {
            rec.status = to_string(SolveStatus::numerical_failure);
        } catch (const TightnessError&) {
            rec.status = to_string(SolveStatus::numerical_failure);
            rec.objective.reset();
            rec.tr_rows.clear();
            rec.cycle_rows.clear();
        }
    }
    rec.walltime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

void attach_gaps(std::vector<RunRecord>& records) {
    std::map<std::pair<std::string, double>, double> nl;
    for (const auto& r : records)
        if (r.method == Method::nl && r.solved() && r.objective) nl[{r.case_name, r.lambda}] = *r.objective;
    for (auto& r : records) {
        r.gap_pct.reset();
        if (r.method == Method::nl || !r.solved() || !r.objective) continue;
        const auto it = nl.find({r.case_name, r.lambda});
        if (it != nl.end() && it->second != 0.0) r.gap_pct = gap_measure(it->second, *r.objective);
    }
}

std::vector<RunRecord> run_sweep(const Network& net, const SweepConfig& cfg) {
    cfg.validate();
    const std::vector<Cycle> cycles = network_cycles(net, cfg.cycle_source, cfg.max_cycle_len);

    std::vector<std::pair<double, Method>> tasks;
    for (double l : cfg.lambdas)
        for (Method m : cfg.methods) tasks.emplace_back(l, m);
    std::sort(tasks.begin(), tasks.end());
    tasks.erase(std::unique(tasks.begin(), tasks.end()), tasks.end());

    std::vector<RunRecord> out(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
            try {
                out[k] = run_single(net, tasks[k].first, tasks[k].second, cycles, cfg);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t nthreads =
        std::min<std::size_t>(tasks.size(), cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    if (std::find(cfg.methods.begin(), cfg.methods.end(), Method::nl) != cfg.methods.end()) attach_gaps(out);
    return out;
}

std::vector<RunRecord> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    return run_sweep(load_case_file(cfg.case_path), cfg);
}

std::string summary_csv(const std::vector<RunRecord>& records) {
    std::string s(kSummaryHeader);
    s += '\n';
    for (const auto& r : records) {
        char wall[32];
        std::snprintf(wall, sizeof wall, "%.3f", r.walltime_s);
        s += key_prefix(r) + ',' + r.status + ',' + opt_num(r.objective) + ',' + opt_num(r.gap_pct) + ',' + wall +
             '\n';
    }
    return s;
}

std::string tr_csv(const std::vector<RunRecord>& records) {
    std::string s(kTrHeader);
    s += '\n';
    for (const auto& r : records)
        for (const auto& t : r.tr_rows)
            s += key_prefix(r) + ',' + std::to_string(t.clique_id) + ',' + std::to_string(t.clique_size) + ',' +
                 num(t.lambda1) + ',' + num(t.lambda2) + ',' + num(t.tr) + '\n';
    return s;
}

std::string cycles_csv(const std::vector<RunRecord>& records) {
    std::string s(kCyclesHeader);
    s += '\n';
    for (const auto& r : records)
        for (const auto& c : r.cycle_rows)
            s += key_prefix(r) + ',' + std::to_string(c.cycle_id) + ',' + std::to_string(c.cycle_len) + ',' +
                 num(c.sum.raw_deg) + ',' + num(c.sum.wrapped_deg) + '\n';
    return s;
}

std::vector<RunRecord> parse_reports(std::string_view summary, std::string_view tr, std::string_view cycles) {
    std::vector<RunRecord> out;
    std::map<Key, std::size_t> index;

    auto lines = data_lines(summary);
    if (lines.empty()) throw ConfigError("summary.csv: empty");
    check_header(lines[0], kSummaryHeader, "summary.csv");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        if (f.size() != 7) throw ConfigError("summary.csv: line " + std::to_string(i + 1) + " has wrong field count");
        RunRecord r;
        r.case_name = std::string(trim(f[0]));
        r.lambda = parse_number(f[1], "lambda");
        r.method = parse_method(f[2]);
        r.status = std::string(trim(f[3]));
        if (!trim(f[4]).empty()) r.objective = parse_number(f[4], "objective");
        if (!trim(f[5]).empty()) r.gap_pct = parse_number(f[5], "gap_pct");
        r.walltime_s = parse_number(f[6], "walltime_s");
        if (!index.emplace(key_of(r), out.size()).second) throw ConfigError("summary.csv: duplicate record");
        out.push_back(std::move(r));
    }

    auto lookup = [&](const std::vector<std::string_view>& f, const char* file) -> RunRecord& {
        const Key k{std::string(trim(f[0])), parse_number(f[1], "lambda"), parse_method(f[2])};
        const auto it = index.find(k);
        if (it == index.end()) throw ConfigError(std::string(file) + ": row without summary record");
        return out[it->second];
    };

    lines = data_lines(tr);
    if (lines.empty()) throw ConfigError("tr.csv: empty");
    check_header(lines[0], kTrHeader, "tr.csv");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        if (f.size() != 8) throw ConfigError("tr.csv: line " + std::to_string(i + 1) + " has wrong field count");
        CliqueTr t;
        t.clique_id = parse_int(f[3], "clique_id");
        t.clique_size = parse_int(f[4], "clique_size");
        t.lambda1 = parse_number(f[5], "lambda1");
        t.lambda2 = parse_number(f[6], "lambda2");
        t.tr = parse_number(f[7], "tr");
        lookup(f, "tr.csv").tr_rows.push_back(t);
    }

    lines = data_lines(cycles);
    if (lines.empty()) throw ConfigError("cycles.csv: empty");
    check_header(lines[0], kCyclesHeader, "cycles.csv");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        if (f.size() != 7) throw ConfigError("cycles.csv: line " + std::to_string(i + 1) + " has wrong field count");
        CycleRow c;
        c.cycle_id = parse_int(f[3], "cycle_id");
        c.cycle_len = parse_int(f[4], "cycle_len");
        c.sum.raw_deg = parse_number(f[5], "angle_sum_deg_raw");
        c.sum.wrapped_deg = parse_number(f[6], "angle_sum_deg_wrapped");
        lookup(f, "cycles.csv").cycle_rows.push_back(c);
    }
    return out;
}

std::vector<RunRecord> read_reports(const std::filesystem::path& dir) {
    return parse_reports(read_file(dir / "summary.csv"), read_file(dir / "tr.csv"), read_file(dir / "cycles.csv"));
}

std::vector<std::filesystem::path> write_reports(const std::vector<RunRecord>& records,
                                                 const std::filesystem::path& out_dir) {
    if (records.empty()) throw ConfigError("no records to report");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        write_file(out_dir / name, text);
        written.push_back(out_dir / name);
    };
    emit("summary.csv", summary_csv(records));
    emit("tr.csv", tr_csv(records));
    emit("cycles.csv", cycles_csv(records));

    std::set<std::string> cases;
    for (const auto& r : records) cases.insert(r.case_name);
    for (const auto& cs : cases) {
        std::vector<const RunRecord*> recs;
        std::set<double> lambdas;
        for (const auto& r : records)
            if (r.case_name == cs) {
                recs.push_back(&r);
                lambdas.insert(r.lambda);
            }
        const std::vector<double> grid(lambdas.begin(), lambdas.end());

        for (Method m : {Method::socp, Method::sdp}) {
            std::vector<const RunRecord*> solved;
            for (const auto* r : recs)
                if (r->method == m && r->solved()) solved.push_back(r);
            if (solved.empty()) continue;

            Chart tr{cs + " " + to_string(m) + ": tightness ratio per clique", "clique", "TR", {}, {}};
            Chart cyc{cs + " " + to_string(m) + ": angle sum per cycle (wrapped)", "cycle", "degrees", {}, {}};
            int ncl = 0, ncy = 0;
            for (const auto* r : solved) {
                for (const auto& t : r->tr_rows) ncl = std::max(ncl, t.clique_id + 1);
                for (const auto& c : r->cycle_rows) ncy = std::max(ncy, c.cycle_id + 1);
            }
            for (int k = 0; k < ncl; ++k) tr.categories.push_back(std::to_string(k + 1));
            for (int k = 0; k < ncy; ++k) cyc.categories.push_back(std::to_string(k + 1));
            for (const auto* r : solved) {
                Series st{lambda_label(r->lambda), std::vector<double>(ncl, std::nan(""))};
                for (const auto& t : r->tr_rows) st.values[t.clique_id] = t.tr;
                tr.series.push_back(std::move(st));
                Series sc{lambda_label(r->lambda), std::vector<double>(ncy, std::nan(""))};
                for (const auto& c : r->cycle_rows) sc.values[c.cycle_id] = c.sum.wrapped_deg;
                cyc.series.push_back(std::move(sc));
            }
            if (ncl > 0) emit(cs + "_tr_" + to_string(m) + ".svg", render_grouped_bars(tr));
            if (ncy > 0) emit(cs + "_cycles_" + to_string(m) + ".svg", render_grouped_bars(cyc));
        }

        Chart obj{cs + ": objective by demand ratio", "lambda", "$/h", {}, {}};
        Chart gap{cs + ": optimality gap by demand ratio", "lambda", "gap %", {}, {}};
        for (double l : grid) {
            obj.categories.push_back(num(l));
            gap.categories.push_back(num(l));
        }
        bool any_gap = false;
        for (Method m : {Method::socp, Method::sdp, Method::nl}) {
            Series so{to_string(m), std::vector<double>(grid.size(), std::nan(""))};
            Series sg{to_string(m), std::vector<double>(grid.size(), std::nan(""))};
            bool present = false;
            for (const auto* r : recs) {
                if (r->method != m) continue;
                present = true;
                const auto k = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), r->lambda) -
                                                        grid.begin());
                if (r->objective) so.values[k] = *r->objective;
                if (r->gap_pct) {
                    sg.values[k] = *r->gap_pct;
                    any_gap = true;
                }
            }
            if (!present) continue;
            obj.series.push_back(std::move(so));
            if (m != Method::nl) gap.series.push_back(std::move(sg));
        }
        emit(cs + "_objective.svg", render_lines(obj));
        if (any_gap) emit(cs + "_gap.svg", render_lines(gap));
    }
    return written;
}

}  // namespace acrelax
