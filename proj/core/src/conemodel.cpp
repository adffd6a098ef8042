#include "acrelax/conemodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace acrelax {

const char* to_string(Relaxation r) noexcept {
    return r == Relaxation::socp ? "socp" : "sdp";
}

const PairRef* VariableMap::find_pair(int i, int j) const {
    auto it = pairs.find({std::min(i, j), std::max(i, j)});
    return it == pairs.end() ? nullptr : &it->second;
}

bool RelaxSolution::has_pair(int i, int j) const {
    return pairs.contains({std::min(i, j), std::max(i, j)});
}

std::pair<double, double> RelaxSolution::pair(int i, int j) const {
    auto it = pairs.find({std::min(i, j), std::max(i, j)});
    if (it == pairs.end())
        throw ModelError("no lifted pair for buses at positions " + std::to_string(i) + ", " + std::to_string(j));
    auto [c, s] = it->second;
    return {c, i < j ? s : -s};
}

std::vector<Clique> network_cliques(const Network& net) {
    const BusGraph g = build_graph(net);
    const ChordalExtension ext = chordal_extension(g);
    return maximal_cliques(ext.graph, ext.ordering);
}

namespace {

constexpr double kFixedTol = 1e-12;

// Columns are created as handles and laid out at the end: all orthant
// columns first as one cone, then every other cone in creation order.
class Builder {
public:
    struct Row {
        std::vector<std::pair<int, double>> terms;
        double rhs = 0.0;

        Row& add(int handle, double coef) {
            terms.emplace_back(handle, coef);
            return *this;
        }
        Row& add(const VarRef& r, double coef) {
            if (r.is_column()) terms.emplace_back(r.column, coef * r.scale);
            rhs -= coef * r.offset;
            return *this;
        }
        Row& constant(double v) {
            rhs -= v;
            return *this;
        }
    };

    int nonneg(Unit u) {
        const int h = fresh(u);
        orthant_.push_back(h);
        return h;
    }

    int cone(ConeKind kind, const std::vector<Unit>& units) {
        const int first = static_cast<int>(units_.size());
        for (Unit u : units) fresh(u);
        blocks_.push_back({kind, first, static_cast<int>(units.size())});
        return first;
    }

    int psd(int side) {
        return cone(ConeKind::psd, std::vector<Unit>(svec_dim(side), Unit::voltage_sq));
    }

    void row(const Row& r, Unit unit) {
        rows_.push_back(r);
        row_units_.push_back(unit);
    }

    void cost(const VarRef& r, double coef) {
        if (r.is_column()) cost_[r.column] += coef * r.scale;
        offset_ += coef * r.offset;
    }
    void cost_constant(double v) { offset_ += v; }

    /// Lays out columns and returns the handle -> column map.
    std::vector<int> finalize(ConicProgram& prog, VariableMap& map) const {
        const int n = static_cast<int>(units_.size());
        std::vector<int> col(n, -1);
        int next = 0;
        if (!orthant_.empty()) {
            for (int h : orthant_) col[h] = next++;
            prog.cones.push_back({ConeKind::nonnegative, 0, static_cast<int>(orthant_.size())});
        }
        for (const auto& b : blocks_) {
            prog.cones.push_back({b.kind, next, b.dim});
            for (int k = 0; k < b.dim; ++k) col[b.first + k] = next++;
        }

        prog.c = Eigen::VectorXd::Zero(n);
        for (auto [h, v] : cost_) prog.c[col[h]] += v;
        prog.objective_offset = offset_;

        std::vector<Triplet> trips;
        prog.b.resize(static_cast<int>(rows_.size()));
        for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
            for (auto [h, v] : rows_[i].terms)
                if (v != 0.0) trips.emplace_back(i, col[h], v);
            prog.b[i] = rows_[i].rhs;
        }
        prog.A.resize(static_cast<int>(rows_.size()), n);
        prog.A.setFromTriplets(trips.begin(), trips.end());

        map.column_units.assign(n, Unit::unitless);
        for (int h = 0; h < n; ++h) map.column_units[col[h]] = units_[h];
        map.row_units = row_units_;
        return col;
    }

private:
    struct Block {
        ConeKind kind;
        int first;
        int dim;
    };

    int fresh(Unit u) {
        units_.push_back(u);
        return static_cast<int>(units_.size()) - 1;
    }

    std::vector<Unit> units_;
    std::vector<int> orthant_;
    std::vector<Block> blocks_;
    std::vector<Row> rows_;
    std::vector<Unit> row_units_;
    std::map<int, double> cost_;
    double offset_ = 0.0;
};

// lo <= v <= hi as an affine view of orthant (or free) columns
VarRef bounded(Builder& b, double lo, double hi, Unit u) {
    if (hi < lo) throw ModelError("empty bound interval");
    const bool flo = std::isfinite(lo), fhi = std::isfinite(hi);
    if (flo && fhi) {
        if (hi - lo <= kFixedTol * (1.0 + std::abs(lo))) return {-1, 0.0, lo};
        const int l = b.nonneg(u), w = b.nonneg(u);
        b.row(Builder::Row{}.add(l, 1.0).add(w, 1.0).constant(lo - hi), u);
        return {l, 1.0, lo};
    }
    if (flo) return {b.nonneg(u), 1.0, lo};
    if (fhi) return {b.nonneg(u), -1.0, hi};
    // free: second coordinate of a 2-dim second-order cone
    const int h = b.cone(ConeKind::second_order, {u, u});
    return {h + 1, 1.0, 0.0};
}

void remap(VarRef& r, const std::vector<int>& col) {
    if (r.is_column()) r.column = col[r.column];
}

void remap(VariableMap& map, const std::vector<int>& col) {
    for (auto& r : map.c_diag) remap(r, col);
    for (auto& [k, p] : map.pairs) {
        remap(p.c, col);
        remap(p.s, col);
    }
    for (auto* v : {&map.p_gen, &map.q_gen, &map.t_gen})
        for (auto& r : *v) remap(r, col);
    for (auto* v : {&map.flow_from, &map.flow_to})
        for (auto& f : *v) {
            remap(f.p, col);
            remap(f.q, col);
        }
    for (int& s : map.block_start) s = col[s];
}

// Adds coef * s_ft (from-oriented) to a row, given the canonical i < j pair.
void add_oriented_s(Builder::Row& row, const PairRef& pr, bool forward, double coef) {
    row.add(pr.s, forward ? coef : -coef);
}

// Generators, cost, branch flows, flow limits and nodal balance. Requires
// map.c_diag and every branch pair in map.pairs.
void add_skeleton(Builder& b, const Network& net, VariableMap& map) {
    const auto& gens = net.generators();
    map.p_gen.resize(gens.size());
    map.q_gen.resize(gens.size());
    map.t_gen.assign(gens.size(), VarRef{-1, 0.0, 0.0});
    for (std::size_t g = 0; g < gens.size(); ++g) {
        const Generator& gen = gens[g];
        map.p_gen[g] = bounded(b, gen.p_min, gen.p_max, Unit::power);
        map.q_gen[g] = bounded(b, gen.q_min, gen.q_max, Unit::power);
        if (gen.cost_c2 > 0.0) {
            // t * 1 >= (sqrt(c2) p)^2
            const int h = b.cone(ConeKind::rotated_second_order, {Unit::money, Unit::unitless, Unit::root_money});
            b.row(Builder::Row{}.add(h + 1, 1.0).constant(-1.0), Unit::unitless);
            b.row(Builder::Row{}.add(h + 2, 1.0).add(map.p_gen[g], -std::sqrt(gen.cost_c2)), Unit::root_money);
            map.t_gen[g] = {h, 1.0, 0.0};
            b.cost(map.t_gen[g], 1.0);
        }
        b.cost(map.p_gen[g], gen.cost_c1);
        b.cost_constant(gen.cost_c0);
    }

    const auto& branches = net.branches();
    const auto& coeffs = net.coeffs();
    map.flow_from.resize(branches.size());
    map.flow_to.resize(branches.size());
    for (std::size_t k = 0; k < branches.size(); ++k) {
        if (!branches[k].rated()) continue;
        const int f = static_cast<int>(net.from_index(k)), t = static_cast<int>(net.to_index(k));
        const PairRef& pr = *map.find_pair(f, t);
        const bool fwd = f < t;
        const BranchCoeffs& y = coeffs[k];
        for (int side = 0; side < 2; ++side) {
            const int h = b.cone(ConeKind::second_order, {Unit::power, Unit::power, Unit::power});
            b.row(Builder::Row{}.add(h, 1.0).constant(-branches[k].s_max), Unit::power);
            FlowRef fr{{h + 1, 1.0, 0.0}, {h + 2, 1.0, 0.0}};
            Builder::Row rp, rq;
            rp.add(fr.p, 1.0);
            rq.add(fr.q, 1.0);
            if (side == 0) {
                rp.add(map.c_diag[f], -y.g_ff).add(pr.c, -y.g_ft);
                add_oriented_s(rp, pr, fwd, y.b_ft);
                rq.add(map.c_diag[f], y.b_ff).add(pr.c, y.b_ft);
                add_oriented_s(rq, pr, fwd, y.g_ft);
                map.flow_from[k] = fr;
            } else {
                rp.add(map.c_diag[t], -y.g_tt).add(pr.c, -y.g_tf);
                add_oriented_s(rp, pr, fwd, -y.b_tf);
                rq.add(map.c_diag[t], y.b_tt).add(pr.c, y.b_tf);
                add_oriented_s(rq, pr, fwd, -y.g_tf);
                map.flow_to[k] = fr;
            }
            b.row(rp, Unit::power);
            b.row(rq, Unit::power);
        }
    }

    // balance: sum p_g - P_d - Gs c_ii = sum of branch injections leaving bus i
    const std::size_t n = net.num_buses();
    std::vector<Builder::Row> bp(n), bq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Bus& bus = net.buses()[i];
        bp[i].constant(-bus.p_demand).add(map.c_diag[i], -bus.gs_shunt);
        bq[i].constant(-bus.q_demand).add(map.c_diag[i], bus.bs_shunt);
        for (std::size_t g : net.gens_at_bus()[i]) {
            bp[i].add(map.p_gen[g], 1.0);
            bq[i].add(map.q_gen[g], 1.0);
        }
    }
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const int f = static_cast<int>(net.from_index(k)), t = static_cast<int>(net.to_index(k));
        const PairRef& pr = *map.find_pair(f, t);
        const bool fwd = f < t;
        const BranchCoeffs& y = coeffs[k];
        // subtract p_ft, q_ft at f
        bp[f].add(map.c_diag[f], -y.g_ff).add(pr.c, -y.g_ft);
        add_oriented_s(bp[f], pr, fwd, y.b_ft);
        bq[f].add(map.c_diag[f], y.b_ff).add(pr.c, y.b_ft);
        add_oriented_s(bq[f], pr, fwd, y.g_ft);
        // subtract p_tf, q_tf at t
        bp[t].add(map.c_diag[t], -y.g_tt).add(pr.c, -y.g_tf);
        add_oriented_s(bp[t], pr, fwd, -y.b_tf);
        bq[t].add(map.c_diag[t], y.b_tt).add(pr.c, y.b_tf);
        add_oriented_s(bq[t], pr, fwd, -y.g_tf);
    }
    for (std::size_t i = 0; i < n; ++i) {
        b.row(bp[i], Unit::power);
        b.row(bq[i], Unit::power);
    }
}

ConicModel finish(Builder& b, VariableMap map) {
    ConicModel model;
    const auto col = b.finalize(model.program, map);
    remap(map, col);
    model.map = std::move(map);
    model.program.validate();
    return model;
}

}  // namespace

ConicModel build_socp(const Network& net, bool clique_complete) {
    Builder b;
    VariableMap map;
    map.method = Relaxation::socp;

    const std::size_t n = net.num_buses();
    map.c_diag.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Bus& bus = net.buses()[i];
        map.c_diag[i] = bounded(b, bus.v_min * bus.v_min, bus.v_max * bus.v_max, Unit::voltage_sq);
    }

    std::set<Edge> lifted;
    for (std::size_t k = 0; k < net.num_branches(); ++k) {
        const int f = static_cast<int>(net.from_index(k)), t = static_cast<int>(net.to_index(k));
        lifted.emplace(std::min(f, t), std::max(f, t));
    }
    if (clique_complete) {
        map.cliques = network_cliques(net);
        for (const Clique& c : map.cliques)
            for (std::size_t a = 0; a < c.members.size(); ++a)
                for (std::size_t z = a + 1; z < c.members.size(); ++z)
                    lifted.emplace(c.members[a], c.members[z]);
    }

    for (auto [i, j] : lifted) {
        const int h = b.cone(ConeKind::rotated_second_order,
                             {Unit::voltage_sq, Unit::voltage_sq, Unit::voltage_sq, Unit::voltage_sq});
        b.row(Builder::Row{}.add(h, 1.0).add(map.c_diag[i], -1.0), Unit::voltage_sq);
        b.row(Builder::Row{}.add(h + 1, 1.0).add(map.c_diag[j], -1.0), Unit::voltage_sq);
        map.pairs[{i, j}] = PairRef{{h + 2, 1.0, 0.0}, {h + 3, 1.0, 0.0}};
    }

    add_skeleton(b, net, map);
    return finish(b, std::move(map));
}

ConicModel build_sdp(const Network& net) {
    return build_sdp(net, network_cliques(net));
}

ConicModel build_sdp(const Network& net, const std::vector<Clique>& cliques) {
    const int n = static_cast<int>(net.num_buses());
    for (const Clique& c : cliques) {
        if (c.members.empty()) throw ModelError("empty clique");
        for (std::size_t a = 0; a < c.members.size(); ++a) {
            if (c.members[a] < 0 || c.members[a] >= n) throw ModelError("clique member out of range");
            if (a > 0 && c.members[a] <= c.members[a - 1])
                throw ModelError("clique members must be strictly ascending");
        }
    }
    auto covers = [&](int i, int j) {
        return std::any_of(cliques.begin(), cliques.end(), [&](const Clique& c) {
            return std::binary_search(c.members.begin(), c.members.end(), i) &&
                   std::binary_search(c.members.begin(), c.members.end(), j);
        });
    };
    for (int i = 0; i < n; ++i)
        if (!covers(i, i)) throw ModelError("bus " + std::to_string(net.buses()[i].id) + " is in no clique");
    for (std::size_t k = 0; k < net.num_branches(); ++k)
        if (!covers(static_cast<int>(net.from_index(k)), static_cast<int>(net.to_index(k))))
            throw ModelError("branch " + std::to_string(k) + " is not covered by any clique");

    Builder b;
    VariableMap map;
    map.method = Relaxation::sdp;
    map.cliques = cliques;
    map.c_diag.assign(n, VarRef{});

    const double r2 = std::sqrt(2.0);
    // packed column of entry (r, q) of block, and the factor undoing the sqrt(2)
    auto entry = [&](int start, int side, int r, int q) -> VarRef {
        if (r < q) std::swap(r, q);
        return {start + svec_index(side, r, q), r == q ? 1.0 : 1.0 / r2, 0.0};
    };

    for (const Clique& c : cliques) {
        const int k = static_cast<int>(c.members.size());
        const int side = 2 * k;
        const int start = b.psd(side);
        map.block_start.push_back(start);

        // equal diagonal blocks, zero Im diagonal, antisymmetric Im
        for (int q = 0; q < k; ++q)
            for (int r = q; r < k; ++r) {
                const VarRef lo = entry(start, side, k + r, k + q), hi = entry(start, side, r, q);
                b.row(Builder::Row{}.add(lo.column, 1.0).add(hi.column, -1.0), Unit::voltage_sq);
            }
        for (int a = 0; a < k; ++a)
            b.row(Builder::Row{}.add(entry(start, side, k + a, a).column, 1.0), Unit::voltage_sq);
        for (int q = 0; q < k; ++q)
            for (int r = q + 1; r < k; ++r)
                b.row(Builder::Row{}
                          .add(entry(start, side, k + r, q).column, 1.0)
                          .add(entry(start, side, k + q, r).column, 1.0),
                      Unit::voltage_sq);

        // canonical gamma entries, or links to the first clique carrying them
        for (int a = 0; a < k; ++a) {
            const int i = c.members[a];
            const VarRef d = entry(start, side, a, a);
            if (!map.c_diag[i].is_column()) {
                map.c_diag[i] = d;
            } else {
                b.row(Builder::Row{}.add(d.column, 1.0).add(map.c_diag[i].column, -1.0), Unit::voltage_sq);
            }
            for (int z = a + 1; z < k; ++z) {
                const int j = c.members[z];
                const VarRef re = entry(start, side, z, a);      // Re W_ij
                const VarRef im = entry(start, side, k + a, z);  // Im W_ij
                auto it = map.pairs.find({i, j});
                if (it == map.pairs.end()) {
                    map.pairs[{i, j}] = PairRef{re, im};
                } else {
                    b.row(Builder::Row{}.add(re.column, 1.0).add(it->second.c.column, -1.0), Unit::voltage_sq);
                    b.row(Builder::Row{}.add(im.column, 1.0).add(it->second.s.column, -1.0), Unit::voltage_sq);
                }
            }
        }
    }

    // voltage bounds on the canonical diagonal
    for (int i = 0; i < n; ++i) {
        const Bus& bus = net.buses()[i];
        const double lo = bus.v_min * bus.v_min, hi = bus.v_max * bus.v_max;
        if (hi - lo <= kFixedTol * (1.0 + lo)) {
            b.row(Builder::Row{}.add(map.c_diag[i], 1.0).constant(-lo), Unit::voltage_sq);
            continue;
        }
        const int l = b.nonneg(Unit::voltage_sq), u = b.nonneg(Unit::voltage_sq);
        b.row(Builder::Row{}.add(map.c_diag[i], 1.0).add(l, -1.0).constant(-lo), Unit::voltage_sq);
        b.row(Builder::Row{}.add(map.c_diag[i], 1.0).add(u, 1.0).constant(-hi), Unit::voltage_sq);
    }

    add_skeleton(b, net, map);
    return finish(b, std::move(map));
}

std::vector<std::string> unit_audit(const ConicModel& model) {
    const auto& prog = model.program;
    const auto& map = model.map;
    std::vector<std::string> issues;
    if (static_cast<int>(map.column_units.size()) != prog.num_vars() ||
        static_cast<int>(map.row_units.size()) != prog.num_rows()) {
        issues.emplace_back("unit tags do not match program dimensions");
        return issues;
    }
    // power rows may carry voltage_sq columns through admittance coefficients;
    // root_money rows carry power through sqrt(c2)
    auto allowed = [](Unit row, Unit col) {
        if (row == col) return true;
        if (row == Unit::power && col == Unit::voltage_sq) return true;
        if (row == Unit::root_money && col == Unit::power) return true;
        return false;
    };
    for (int j = 0; j < prog.A.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(prog.A, j); it; ++it)
            if (!allowed(map.row_units[it.row()], map.column_units[j])) {
                std::ostringstream os;
                os << "row " << it.row() << " mixes unit " << static_cast<int>(map.row_units[it.row()])
                   << " with column " << j << " of unit " << static_cast<int>(map.column_units[j]);
                issues.push_back(os.str());
            }
    for (int j = 0; j < prog.num_vars(); ++j)
        if (prog.c[j] != 0.0 && map.column_units[j] != Unit::money && map.column_units[j] != Unit::power)
            issues.push_back("objective weight on column " + std::to_string(j) + " without a cost unit");
    return issues;
}

RelaxSolution extract_solution(const ConicProgram& prog, const VariableMap& map, const Network& net,
                               const IpmResult& result) {
    RelaxSolution sol;
    sol.status = result.status;
    sol.method = map.method;
    sol.cliques = map.cliques;
    if (result.status != SolveStatus::optimal) return sol;

    if (result.x.size() != prog.num_vars() || static_cast<int>(map.column_units.size()) != prog.num_vars())
        throw ModelError("solution does not match the variable map");
    if (map.c_diag.size() != net.num_buses() || map.p_gen.size() != net.num_generators())
        throw ModelError("variable map does not match the network");

    const Eigen::VectorXd& x = result.x;
    sol.objective = result.primal_objective;
    for (const auto& r : map.c_diag) sol.c_diag.push_back(r.value(x));
    for (const auto& [key, pr] : map.pairs) sol.pairs[key] = {pr.c.value(x), pr.s.value(x)};
    for (std::size_t g = 0; g < map.p_gen.size(); ++g) {
        sol.p_gen.push_back(map.p_gen[g].value(x));
        sol.q_gen.push_back(map.q_gen[g].value(x));
    }
    for (std::size_t k = 0; k < net.num_branches(); ++k) {
        const int f = static_cast<int>(net.from_index(k)), t = static_cast<int>(net.to_index(k));
        const auto [c, s] = sol.pair(f, t);
        sol.flow_from.push_back(net.coeffs()[k].from_flow(sol.c_diag[f], c, s));
        sol.flow_to.push_back(net.coeffs()[k].to_flow(sol.c_diag[t], c, s));
    }

    if (map.method == Relaxation::sdp) {
        for (std::size_t q = 0; q < map.cliques.size(); ++q) {
            const int k = static_cast<int>(map.cliques[q].members.size());
            const Eigen::MatrixXd X = smat(x.segment(map.block_start[q], svec_dim(2 * k)));
            Eigen::MatrixXcd w(k, k);
            for (int a = 0; a < k; ++a)
                for (int z = 0; z < k; ++z) w(a, z) = {X(a, z), X(k + a, z)};
            sol.clique_w.push_back(w);
        }
    }
    return sol;
}

}  // namespace acrelax
