#include <doctest.h>

#include <cmath>
#include <set>

#include "acrelax/conemodel.hpp"
#include "support/fixtures.hpp"

using namespace acrelax;
using fixtures::data_path;

namespace {

IpmSettings tight() {
    IpmSettings s;
    s.feasibility_tol = 1e-9;
    s.gap_tol = 1e-9;
    return s;
}

struct Solved {
    ConicModel model;
    IpmResult raw;
    RelaxSolution sol;
};

Solved solve_case(const char* file, double lambda, Relaxation method, const IpmSettings& s = tight()) {
    const Network net = scale_demand(load_case_file(data_path(file)), lambda);
    Solved out{method == Relaxation::socp ? build_socp(net) : build_sdp(net), {}, {}};
    out.raw = solve(out.model.program, s);
    if (out.raw.status == SolveStatus::optimal) out.sol = extract_solution(out.model.program, out.model.map, net, out.raw);
    return out;
}

}  // namespace

TEST_CASE("relaxation objectives match an external conic solver") {
    // SOCP references from one interior-point code, SDP from a splitting code
    // run to 1e-11, both on the same lifted formulation
    struct Row {
        const char* file;
        double lambda, socp, sdp;
    };
    for (const Row& r : {Row{"case9.m", 0.5, 2296.0891814632373, 2296.089596734241},
                         Row{"case9.m", 1.0, 5296.666075605219, 5296.686203908072},
                         Row{"case14.m", 0.75, 5518.682938757556, 5523.731724449259},
                         Row{"case14.m", 1.0, 8075.12318245545, 8081.524742718523},
                         Row{"case30.m", 0.5, 237.25555140957397, 237.3139099943462},
                         Row{"case30.m", 1.0, 573.5821590622534, 576.8923367625328}}) {
        CAPTURE(r.file);
        CAPTURE(r.lambda);
        const Solved socp = solve_case(r.file, r.lambda, Relaxation::socp);
        REQUIRE(socp.sol.optimal());
        CHECK(socp.sol.objective == doctest::Approx(r.socp).epsilon(2e-7));
        const Solved sdp = solve_case(r.file, r.lambda, Relaxation::sdp);
        REQUIRE(sdp.sol.optimal());
        CHECK(sdp.sol.objective == doctest::Approx(r.sdp).epsilon(2e-7));
        CHECK(socp.sol.objective <= sdp.sol.objective * (1 + 1e-8));
    }
}

TEST_CASE("default tolerance stays within a few parts per million") {
    const Solved s = solve_case("case14.m", 1.0, Relaxation::sdp, IpmSettings{});
    REQUIRE(s.sol.optimal());
    CHECK(s.sol.objective == doctest::Approx(8081.524742718523).epsilon(2e-6));
}

TEST_CASE("unit audit is clean on every bundled case") {
    for (const char* file : {"case9.m", "case14.m", "case30.m", "case118.m", "case300.m"}) {
        CAPTURE(file);
        const Network net = load_case_file(data_path(file));
        const ConicModel socp = build_socp(net);
        const ConicModel sdp = build_sdp(net);
        CHECK(unit_audit(socp).empty());
        CHECK(unit_audit(sdp).empty());
        CHECK_NOTHROW(socp.program.validate());
        CHECK_NOTHROW(sdp.program.validate());
        CHECK(socp.map.column_units.size() == static_cast<std::size_t>(socp.program.num_vars()));
        CHECK(sdp.map.row_units.size() == static_cast<std::size_t>(sdp.program.num_rows()));
    }
}

TEST_CASE("lifted pairs") {
    const Network net = load_case_file(data_path("case14.m"));
    const BusGraph g = build_graph(net);
    const ConicModel branch_only = build_socp(net, false);
    CHECK(branch_only.map.pairs.size() == 20);
    for (const Edge& e : g.edges()) CHECK(branch_only.map.find_pair(e.first, e.second) != nullptr);

    const ConicModel full = build_socp(net);
    const auto cliques = network_cliques(net);
    std::set<Edge> pairs;
    for (const Clique& c : cliques)
        for (std::size_t a = 0; a < c.members.size(); ++a)
            for (std::size_t b = a + 1; b < c.members.size(); ++b) pairs.insert({c.members[a], c.members[b]});
    const std::size_t expected = pairs.size();
    CHECK(full.map.pairs.size() == expected);
    CHECK(full.map.pairs.size() > branch_only.map.pairs.size());
    // find_pair accepts either orientation
    const Edge e = g.edges().front();
    CHECK(full.map.find_pair(e.second, e.first) == full.map.find_pair(e.first, e.second));
    CHECK(full.map.find_pair(0, 0) == nullptr);

    int rotated = 0;
    for (const Cone& k : full.program.cones)
        if (k.kind == ConeKind::rotated_second_order && k.dim == 4) ++rotated;
    CHECK(rotated >= static_cast<int>(expected));

    const ConicModel sdp = build_sdp(net);
    CHECK(sdp.map.cliques.size() == cliques.size());
    std::vector<int> psd_starts;
    for (const Cone& k : sdp.program.cones)
        if (k.kind == ConeKind::psd) psd_starts.push_back(k.start);
    CHECK(psd_starts == sdp.map.block_start);
}

TEST_CASE("branch-only SOCP is a weaker bound on meshed networks") {
    const Network net = load_case_file(data_path("case14.m"));
    const ConicModel weak = build_socp(net, false);
    const IpmResult r = solve(weak.program, tight());
    REQUIRE(r.status == SolveStatus::optimal);
    const RelaxSolution s = extract_solution(weak.program, weak.map, net, r);
    CHECK(s.objective <= 8075.12318245545 * (1 + 1e-8));
}

TEST_CASE("SOCP relaxation is exact on radial networks") {
    fixtures::Rng rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        CAPTURE(trial);
        const Network net = fixtures::random_radial(rng, 8);
        const ConicModel socp = build_socp(net);
        const IpmResult r = solve(socp.program, tight());
        REQUIRE(r.status == SolveStatus::optimal);
        const RelaxSolution s = extract_solution(socp.program, socp.map, net, r);
        CHECK(fixtures::max_cone_slack(s) < 1e-6);
        const ConicModel sdp = build_sdp(net);
        const IpmResult rs = solve(sdp.program, tight());
        REQUIRE(rs.status == SolveStatus::optimal);
        const RelaxSolution t = extract_solution(sdp.program, sdp.map, net, rs);
        CHECK(t.objective == doctest::Approx(s.objective).epsilon(1e-6));
    }
}

TEST_CASE("solution accessors") {
    const Solved s = solve_case("case9.m", 1.0, Relaxation::sdp);
    REQUIRE(s.sol.optimal());
    const Network net = load_case_file(data_path("case9.m"));
    CHECK(s.sol.c_diag.size() == net.num_buses());
    CHECK(s.sol.p_gen.size() == net.num_generators());
    CHECK(s.sol.flow_from.size() == net.num_branches());
    CHECK(s.sol.clique_w.size() == s.sol.cliques.size());
    const auto [i, j] = s.sol.pairs.begin()->first;
    const auto fwd = s.sol.pair(i, j);
    const auto rev = s.sol.pair(j, i);
    CHECK(rev.first == fwd.first);
    CHECK(rev.second == -fwd.second);
    CHECK(s.sol.has_pair(j, i));
    CHECK_THROWS_AS(s.sol.pair(0, 0), ModelError);

    // voltage bounds hold on the diagonal
    for (std::size_t k = 0; k < net.num_buses(); ++k) {
        const Bus& b = net.buses()[k];
        CHECK(s.sol.c_diag[k] >= b.v_min * b.v_min - 1e-7);
        CHECK(s.sol.c_diag[k] <= b.v_max * b.v_max + 1e-7);
    }
    // the objective is the generator cost of the extracted dispatch
    double cost = 0.0;
    for (std::size_t g = 0; g < net.num_generators(); ++g) cost += net.generators()[g].cost(s.sol.p_gen[g]);
    CHECK(cost == doctest::Approx(s.sol.objective).epsilon(1e-7));
}

TEST_CASE("infeasible demand yields a verified certificate") {
    const Solved s = solve_case("case30.m", 1.5, Relaxation::sdp, IpmSettings{});
    REQUIRE(s.raw.status == SolveStatus::primal_infeasible);
    CHECK(verify_primal_infeasibility(s.model.program, s.raw.y, 1e-8));
}

TEST_CASE("model errors") {
    const Network net = load_case_file(data_path("case9.m"));
    auto cliques = network_cliques(net);
    REQUIRE(cliques.size() > 1);
    auto missing = cliques;
    missing.pop_back();
    CHECK_THROWS_AS(build_sdp(net, missing), ModelError);
    auto unknown = cliques;
    unknown[0].members.push_back(99);
    CHECK_THROWS_AS(build_sdp(net, unknown), ModelError);

    const ConicModel m = build_socp(net);
    IpmResult bogus;
    bogus.status = SolveStatus::optimal;
    bogus.x = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(extract_solution(m.program, m.map, net, bogus), ModelError);
}
