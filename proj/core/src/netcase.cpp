#include "acrelax/netcase.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

namespace acrelax {

CaseParseError::CaseParseError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

BranchCoeffs branch_admittances(const Branch& br) {
    using cd = std::complex<double>;
    const cd ys = 1.0 / cd(br.r, br.x);
    const cd tap = std::polar(br.tap, br.shift * std::numbers::pi / 180.0);
    const cd ytt = ys + cd(0.0, br.b_charge / 2.0);
    const cd yff = ytt / (br.tap * br.tap);
    const cd yft = -ys / std::conj(tap);
    const cd ytf = -ys / tap;

    BranchCoeffs k;
    k.g_ff = yff.real();
    k.b_ff = yff.imag();
    k.g_ft = yft.real();
    k.b_ft = yft.imag();
    k.g_tt = ytt.real();
    k.b_tt = ytt.imag();
    k.g_tf = ytf.real();
    k.b_tf = ytf.imag();
    return k;
}

Network::Network(double base_mva, std::vector<Bus> buses, std::vector<Branch> branches,
                 std::vector<Generator> generators, std::string name)
    : base_mva_(base_mva),
      buses_(std::move(buses)),
      branches_(std::move(branches)),
      generators_(std::move(generators)),
      name_(std::move(name)) {
    if (!(base_mva_ > 0.0)) throw NetworkError("baseMVA must be positive");
    if (buses_.empty()) throw NetworkError("network has no buses");

    bool have_slack = false;
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        const Bus& b = buses_[i];
        if (!index_.emplace(b.id, i).second)
            throw NetworkError("duplicate bus id " + std::to_string(b.id));
        if (!(b.v_min > 0.0) || b.v_min > b.v_max)
            throw NetworkError("bus " + std::to_string(b.id) + ": need 0 < v_min <= v_max");
        if (b.is_slack) {
            if (have_slack) throw NetworkError("more than one slack bus");
            have_slack = true;
            slack_ = i;
        }
    }
    if (!have_slack) throw NetworkError("no slack bus");
    nominal_p_.reserve(buses_.size());
    nominal_q_.reserve(buses_.size());
    for (const Bus& b : buses_) {
        nominal_p_.push_back(b.p_demand);
        nominal_q_.push_back(b.q_demand);
    }

    from_idx_.reserve(branches_.size());
    to_idx_.reserve(branches_.size());
    coeffs_.reserve(branches_.size());
    for (const Branch& br : branches_) {
        const std::string tag =
            "branch " + std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus);
        if (!has_bus(br.from_bus) || !has_bus(br.to_bus))
            throw NetworkError(tag + ": unknown bus reference");
        if (br.from_bus == br.to_bus) throw NetworkError(tag + ": self loop");
        if (br.r == 0.0 && br.x == 0.0) throw NetworkError(tag + ": zero impedance");
        if (!(br.tap > 0.0)) throw NetworkError(tag + ": tap must be positive");
        from_idx_.push_back(index_.at(br.from_bus));
        to_idx_.push_back(index_.at(br.to_bus));
        coeffs_.push_back(branch_admittances(br));
    }

    gens_at_.assign(buses_.size(), {});
    for (std::size_t g = 0; g < generators_.size(); ++g) {
        const Generator& gen = generators_[g];
        if (!has_bus(gen.bus))
            throw NetworkError("generator at unknown bus " + std::to_string(gen.bus));
        if (gen.p_min > gen.p_max || gen.q_min > gen.q_max)
            throw NetworkError("generator at bus " + std::to_string(gen.bus) +
                               ": inverted limits");
        if (gen.cost_c2 < 0.0)
            throw NetworkError("generator at bus " + std::to_string(gen.bus) +
                               ": negative quadratic cost");
        gens_at_[index_.at(gen.bus)].push_back(g);
    }

    // connectivity
    std::vector<std::vector<std::size_t>> adj(buses_.size());
    for (std::size_t k = 0; k < branches_.size(); ++k) {
        adj[from_idx_[k]].push_back(to_idx_[k]);
        adj[to_idx_[k]].push_back(from_idx_[k]);
    }
    std::vector<char> seen(buses_.size(), 0);
    std::vector<std::size_t> stack{slack_};
    seen[slack_] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : adj[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
        }
    }
    if (reached != buses_.size()) throw NetworkError("network is not connected");
}

std::size_t Network::bus_index(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw NetworkError("unknown bus " + std::to_string(id));
    return it->second;
}

double Network::total_p_demand() const noexcept {
    double t = 0.0;
    for (const Bus& b : buses_) t += b.p_demand;
    return t;
}

double Network::total_q_demand() const noexcept {
    double t = 0.0;
    for (const Bus& b : buses_) t += b.q_demand;
    return t;
}

bool Network::operator==(const Network& other) const {
    return base_mva_ == other.base_mva_ && buses_ == other.buses_ &&
           branches_ == other.branches_ && generators_ == other.generators_;
}

namespace {

struct Matrix {
    std::vector<std::vector<double>> rows;
    std::vector<int> lines;
};

class CaseReader {
public:
    explicit CaseReader(std::string_view text) : text_(text) {}

    void run() {
        std::size_t pos = 0;
        line_ = 1;
        while (pos < text_.size()) {
            const std::size_t eol = std::min(text_.find('\n', pos), text_.size());
            std::string_view line = text_.substr(pos, eol - pos);
            pos = eol + 1;
            handle_line(strip_comment(line));
            ++line_;
        }
        if (current_) throw CaseParseError("unterminated matrix block '" + *current_ + "'", start_);
    }

    std::optional<double> base_mva;
    std::unordered_map<std::string, Matrix> blocks;

private:
    static std::string_view strip_comment(std::string_view s) {
        const auto p = s.find('%');
        return p == std::string_view::npos ? s : s.substr(0, p);
    }
    static std::string_view trim(std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    void handle_line(std::string_view line) {
        line = trim(line);
        if (line.empty()) return;
        if (skipping_cell_) {
            if (line.find('}') != std::string_view::npos) skipping_cell_ = false;
            return;
        }
        if (current_) {
            consume_rows(line);
            return;
        }
        if (!line.starts_with("mpc.")) return;  // function header and other statements

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw CaseParseError("expected '=' after field", line_);
        const std::string field(trim(line.substr(4, eq - 4)));
        std::string_view rhs = trim(line.substr(eq + 1));

        if (field == "baseMVA") {
            if (rhs.ends_with(';')) rhs.remove_suffix(1);
            base_mva = number(trim(rhs));
            return;
        }
        if (rhs.starts_with('{')) {
            skipping_cell_ = rhs.find('}') == std::string_view::npos;
            return;
        }
        if (!rhs.starts_with('[')) return;  // version string etc.
        if (blocks.contains(field)) throw CaseParseError("duplicate block mpc." + field, line_);
        current_ = field;
        start_ = line_;
        blocks[field];
        consume_rows(rhs.substr(1));
    }

    void consume_rows(std::string_view s) {
        Matrix& m = blocks[*current_];
        std::size_t i = 0;
        while (i < s.size()) {
            const char ch = s[i];
            if (ch == ' ' || ch == '\t' || ch == '\r' || ch == ',') {
                ++i;
                continue;
            }
            if (ch == ';') {
                finish_row(m);
                ++i;
                continue;
            }
            if (ch == ']') {
                finish_row(m);
                current_.reset();
                const auto rest = trim(s.substr(i + 1));
                if (!rest.empty() && rest != ";")
                    throw CaseParseError("unexpected text after ']'", line_);
                return;
            }
            std::size_t j = i;
            while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ';' && s[j] != ']' &&
                   s[j] != ',' && s[j] != '\r')
                ++j;
            if (row_.empty()) row_line_ = line_;
            row_.push_back(number(s.substr(i, j - i)));
            i = j;
        }
        // newline also ends a row in MATLAB matrix syntax
        finish_row(m);
    }

    void finish_row(Matrix& m) {
        if (row_.empty()) return;
        m.rows.push_back(std::move(row_));
        m.lines.push_back(row_line_);
        row_.clear();
    }

    double number(std::string_view tok) const {
        if (tok == "Inf" || tok == "inf") return std::numeric_limits<double>::infinity();
        if (tok == "-Inf" || tok == "-inf") return -std::numeric_limits<double>::infinity();
        double v = 0.0;
        const char* first = tok.data();
        if (!tok.empty() && tok.front() == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
            throw CaseParseError("invalid number '" + std::string(tok) + "'", line_);
        return v;
    }

    std::string_view text_;
    int line_ = 0;
    int start_ = 0;
    int row_line_ = 0;
    bool skipping_cell_ = false;
    std::optional<std::string> current_;
    std::vector<double> row_;
};

const Matrix& require(const CaseReader& r, const std::string& name, std::size_t min_cols) {
    auto it = r.blocks.find(name);
    if (it == r.blocks.end()) throw CaseParseError("missing section mpc." + name, 0);
    const Matrix& m = it->second;
    for (std::size_t k = 0; k < m.rows.size(); ++k)
        if (m.rows[k].size() < min_cols)
            throw CaseParseError("mpc." + name + " row has " + std::to_string(m.rows[k].size()) +
                                     " columns, need " + std::to_string(min_cols),
                                 m.lines[k]);
    return m;
}

int as_id(double v, int line) {
    if (v != std::floor(v)) throw CaseParseError("non-integer bus id", line);
    return static_cast<int>(v);
}

}  // namespace

Network parse_case(std::string_view text, std::string name) {
    CaseReader reader(text);
    reader.run();
    if (!reader.base_mva) throw CaseParseError("missing section mpc.baseMVA", 0);
    const double base = *reader.base_mva;
    if (!(base > 0.0)) throw CaseParseError("baseMVA must be positive", 0);

    const Matrix& bus_m = require(reader, "bus", 13);
    const Matrix& gen_m = require(reader, "gen", 10);
    const Matrix& br_m = require(reader, "branch", 11);
    const Matrix& cost_m = require(reader, "gencost", 4);

    std::vector<Bus> buses;
    buses.reserve(bus_m.rows.size());
    std::unordered_map<int, int> seen_ids;
    for (std::size_t k = 0; k < bus_m.rows.size(); ++k) {
        const auto& r = bus_m.rows[k];
        const int line = bus_m.lines[k];
        Bus b;
        b.id = as_id(r[0], line);
        const int type = static_cast<int>(r[1]);
        if (type == 4) continue;  // isolated bus
        if (!seen_ids.emplace(b.id, line).second)
            throw CaseParseError("duplicate bus id " + std::to_string(b.id), line);
        b.is_slack = type == 3;
        b.p_demand = r[2] / base;
        b.q_demand = r[3] / base;
        b.gs_shunt = r[4] / base;
        b.bs_shunt = r[5] / base;
        b.base_kv = r[9];
        b.v_max = r[11];
        b.v_min = r[12];
        if (!(b.v_min > 0.0) || b.v_min > b.v_max)
            throw CaseParseError("bus " + std::to_string(b.id) + ": need 0 < Vmin <= Vmax", line);
        buses.push_back(b);
    }

    std::vector<Branch> branches;
    for (std::size_t k = 0; k < br_m.rows.size(); ++k) {
        const auto& r = br_m.rows[k];
        const int line = br_m.lines[k];
        if (r[10] == 0.0) continue;  // out of service
        Branch br;
        br.from_bus = as_id(r[0], line);
        br.to_bus = as_id(r[1], line);
        if (!seen_ids.contains(br.from_bus) || !seen_ids.contains(br.to_bus))
            throw CaseParseError("branch references unknown bus", line);
        if (br.from_bus == br.to_bus) throw CaseParseError("branch is a self loop", line);
        br.r = r[2];
        br.x = r[3];
        if (br.r == 0.0 && br.x == 0.0) throw CaseParseError("zero-impedance branch", line);
        br.b_charge = r[4];
        br.s_max = r[5] / base;
        br.tap = r[8] == 0.0 ? 1.0 : r[8];
        br.shift = r[9];
        if (!(br.tap > 0.0)) throw CaseParseError("tap ratio must be positive", line);
        branches.push_back(br);
    }

    if (cost_m.rows.size() < gen_m.rows.size())
        throw CaseParseError("mpc.gencost has fewer rows than mpc.gen", 0);

    std::vector<Generator> gens;
    for (std::size_t k = 0; k < gen_m.rows.size(); ++k) {
        const auto& r = gen_m.rows[k];
        const int line = gen_m.lines[k];
        const auto& c = cost_m.rows[k];
        const int cline = cost_m.lines[k];
        if (r[7] <= 0.0) continue;  // out of service
        Generator g;
        g.bus = as_id(r[0], line);
        if (!seen_ids.contains(g.bus)) throw CaseParseError("generator at unknown bus", line);
        g.q_max = r[3] / base;
        g.q_min = r[4] / base;
        g.p_max = r[8] / base;
        g.p_min = r[9] / base;
        if (g.p_min > g.p_max || g.q_min > g.q_max)
            throw CaseParseError("generator limits are inverted", line);

        if (c[0] != 2.0)
            throw CaseParseError("only polynomial (model 2) costs are supported", cline);
        const int n = static_cast<int>(c[3]);
        if (n < 0 || static_cast<std::size_t>(4 + n) > c.size())
            throw CaseParseError("gencost row has too few coefficients", cline);
        // coefficients are listed highest order first
        for (int p = 0; p < n; ++p) {
            const int order = n - 1 - p;
            const double coef = c[4 + p];
            if (order > 2) {
                if (coef != 0.0) throw CaseParseError("cost polynomial above quadratic", cline);
            } else if (order == 2) {
                g.cost_c2 = coef * base * base;
            } else if (order == 1) {
                g.cost_c1 = coef * base;
            } else {
                g.cost_c0 = coef;
            }
        }
        if (g.cost_c2 < 0.0) throw CaseParseError("negative quadratic cost", cline);
        gens.push_back(g);
    }

    try {
        return Network(base, std::move(buses), std::move(branches), std::move(gens),
                       std::move(name));
    } catch (const NetworkError& e) {
        throw CaseParseError(e.what(), 0);
    }
}

Network load_case_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open case file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string name = path;
    if (auto p = name.find_last_of("/\\"); p != std::string::npos) name = name.substr(p + 1);
    if (name.ends_with(".m")) name.resize(name.size() - 2);
    return parse_case(ss.str(), name);
}

std::string serialize_case(const Network& net) {
    const double base = net.base_mva();
    std::ostringstream out;
    out << std::setprecision(17);
    out << "function mpc = " << (net.name().empty() ? "case" : net.name()) << "\n";
    out << "mpc.version = '2';\n";
    out << "mpc.baseMVA = " << base << ";\n\n";

    out << "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin\n";
    out << "mpc.bus = [\n";
    for (const Bus& b : net.buses()) {
        out << '\t' << b.id << '\t' << (b.is_slack ? 3 : 1) << '\t' << b.p_demand * base << '\t'
            << b.q_demand * base << '\t' << b.gs_shunt * base << '\t' << b.bs_shunt * base
            << "\t1\t1\t0\t" << b.base_kv << "\t1\t" << b.v_max << '\t' << b.v_min << ";\n";
    }
    out << "];\n\n";

    out << "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin\n";
    out << "mpc.gen = [\n";
    for (const Generator& g : net.generators()) {
        out << '\t' << g.bus << "\t0\t0\t" << g.q_max * base << '\t' << g.q_min * base << "\t1\t"
            << base << "\t1\t" << g.p_max * base << '\t' << g.p_min * base << ";\n";
    }
    out << "];\n\n";

    out << "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax\n";
    out << "mpc.branch = [\n";
    for (const Branch& br : net.branches()) {
        out << '\t' << br.from_bus << '\t' << br.to_bus << '\t' << br.r << '\t' << br.x << '\t'
            << br.b_charge << '\t' << br.s_max * base << "\t0\t0\t" << br.tap << '\t' << br.shift
            << "\t1\t-360\t360;\n";
    }
    out << "];\n\n";

    out << "mpc.gencost = [\n";
    for (const Generator& g : net.generators()) {
        out << "\t2\t0\t0\t3\t" << g.cost_c2 / (base * base) << '\t' << g.cost_c1 / base << '\t'
            << g.cost_c0 << ";\n";
    }
    out << "];\n";
    return out.str();
}

Network scale_demand(const Network& net, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("demand ratio must be positive");
    Network out = net;
    out.demand_ratio_ = net.demand_ratio_ * lambda;
    for (std::size_t i = 0; i < out.buses_.size(); ++i) {
        out.buses_[i].p_demand = out.nominal_p_[i] * out.demand_ratio_;
        out.buses_[i].q_demand = out.nominal_q_[i] * out.demand_ratio_;
    }
    return out;
}

ShuntTotals bus_shunt(const Network& net, int id) {
    const std::size_t i = net.bus_index(id);
    ShuntTotals t{net.buses()[i].gs_shunt, net.buses()[i].bs_shunt};
    for (std::size_t k = 0; k < net.num_branches(); ++k) {
        const Branch& br = net.branches()[k];
        if (net.from_index(k) == i) t.b_sh += br.b_charge / 2.0 / (br.tap * br.tap);
        if (net.to_index(k) == i) t.b_sh += br.b_charge / 2.0;
    }
    return t;
}

}  // namespace acrelax
