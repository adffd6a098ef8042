#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "acrelax/tightness.hpp"
#include "support/fixtures.hpp"

using namespace acrelax;
using fixtures::data_path;

namespace {

acrelax::VoltageProfile random_voltage(fixtures::Rng& rng, const Network& net, double spread) {
    acrelax::VoltageProfile v;
    for (std::size_t i = 0; i < net.num_buses(); ++i) {
        const double m = fixtures::uniform(rng, 0.95, 1.05);
        const double a = fixtures::uniform(rng, -spread, spread);
        v.e.push_back(m * std::cos(a));
        v.f.push_back(m * std::sin(a));
    }
    return v;
}

}  // namespace

TEST_CASE("eigenvalue ratio") {
    CHECK(tr_from_eigenvalues(1.0, 0.01) == doctest::Approx(2.0));
    CHECK(tr_from_eigenvalues(2.0, 2.0) == 0.0);
    CHECK(tr_from_eigenvalues(1.0, 0.0) == kTrCap);
    CHECK(tr_from_eigenvalues(1.0, -1e-12) == kTrCap);  // tiny negative round-off is clamped
    CHECK(tr_from_eigenvalues(2.0, -2e-8) == kTrCap);   // solver-tolerance level
    CHECK(tr_from_eigenvalues(5.0, 5e-20) == kTrCap);
    CHECK(tr_from_eigenvalues(3.0, 3e-4) == doctest::Approx(4.0));
    CHECK_THROWS_AS(tr_from_eigenvalues(0.0, 0.0), TightnessError);
    CHECK_THROWS_AS(tr_from_eigenvalues(-1.0, -2.0), TightnessError);
    CHECK_THROWS_AS(tr_from_eigenvalues(1.0, -1e-5), TightnessError);
    CHECK_THROWS_AS(tr_from_eigenvalues(std::nan(""), 0.0), TightnessError);
}

TEST_CASE("clique matrix views") {
    Eigen::MatrixXcd m(3, 3);
    m << 3, 0, 0, 0, 1, 0, 0, 0, 0.5;
    const CliqueMatrixView v = make_view(4, {1, 2, 3}, m);
    CHECK(v.clique_index == 4);
    REQUIRE(v.eigenvalues.size() == 3);
    CHECK(v.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(v.eigenvalues[2] == doctest::Approx(0.5));
    CHECK(tr_measure(v) == doctest::Approx(std::log10(3.0)));
    // scale invariance
    CHECK(tr_measure(make_view(0, {1, 2, 3}, 1e4 * m)) == doctest::Approx(tr_measure(v)).epsilon(1e-12));
    CHECK(tr_measure(make_view(0, {1, 2, 3}, 1e-3 * m)) == doctest::Approx(tr_measure(v)).epsilon(1e-12));

    // a rank-one moment matrix reads as tight
    Eigen::VectorXcd u(3);
    u << std::complex<double>(1.0, 0.1), std::complex<double>(0.98, -0.2), std::complex<double>(1.03, 0.05);
    CHECK(tr_measure(make_view(0, {0, 1, 2}, u * u.adjoint())) > 12.0);

    // a single-vertex clique has no second eigenvalue
    Eigen::MatrixXcd one(1, 1);
    one(0, 0) = 1.1;
    CHECK(tr_measure(make_view(0, {0}, one)) == kTrCap);

    Eigen::MatrixXcd skew = m;
    skew(0, 1) = std::complex<double>(0.0, 1.0);
    CHECK_THROWS_AS(make_view(0, {1, 2, 3}, skew), TightnessError);
    CHECK_THROWS_AS(make_view(0, {}, Eigen::MatrixXcd(0, 0)), TightnessError);
    Eigen::MatrixXcd indefinite = m;
    indefinite(1, 1) = -1.0;
    indefinite(2, 2) = -0.5;
    CHECK_THROWS_AS(tr_measure(make_view(0, {1, 2, 3}, indefinite)), TightnessError);
}

TEST_CASE("optimality gap") {
    CHECK(gap_measure(100.0, 90.0) == doctest::Approx(10.0));
    CHECK(gap_measure(100.0, 100.0) == 0.0);
    CHECK(gap_measure(8081.5, 8075.1) == doctest::Approx(100.0 * 6.4 / 8081.5));
    // a relaxation above the local optimum gives a negative gap
    CHECK(gap_measure(50.0, 51.0) == doctest::Approx(-2.0));
    // nonincreasing in the relaxation bound
    double prev = std::numeric_limits<double>::infinity();
    for (double relax = 0.0; relax <= 120.0; relax += 7.5) {
        const double g = gap_measure(100.0, relax);
        CHECK(g <= prev);
        prev = g;
    }
    CHECK_THROWS_AS(gap_measure(0.0, 1.0), TightnessError);
    CHECK_THROWS_AS(gap_measure(std::nan(""), 1.0), TightnessError);
    CHECK_THROWS_AS(gap_measure(1.0, std::numeric_limits<double>::infinity()), TightnessError);
}

TEST_CASE("angle wrapping") {
    CHECK(wrap_degrees(190.0) == doctest::Approx(-170.0));
    CHECK(wrap_degrees(-190.0) == doctest::Approx(170.0));
    CHECK(wrap_degrees(180.0) == 180.0);
    CHECK(wrap_degrees(-180.0) == 180.0);
    CHECK(wrap_degrees(540.0) == doctest::Approx(180.0));
    CHECK(wrap_degrees(360.0) == doctest::Approx(0.0));
    CHECK(wrap_degrees(0.0) == 0.0);
    CHECK(wrap_degrees(-725.0) == doctest::Approx(-5.0));
    fixtures::Rng rng(2);
    for (int k = 0; k < 200; ++k) {
        const double d = fixtures::uniform(rng, -2000.0, 2000.0);
        const double w = wrap_degrees(d);
        CHECK(w > -180.0);
        CHECK(w <= 180.0);
        const double turns = (d - w) / 360.0;
        CHECK(std::abs(turns - std::round(turns)) < 1e-9);
    }
}

TEST_CASE("cycle sums of an actual voltage vanish") {
    fixtures::Rng rng(8);
    const Network net = load_case_file(data_path("case14.m"));
    const auto cliques = network_cliques(net);
    const BusGraph g = build_graph(net);
    const auto cycles = cycle_basis(g, static_cast<int>(net.slack_index()));
    // wide angles so some raw sums pick up whole turns
    const auto v = random_voltage(rng, net, 2.5);
    for (Relaxation m : {Relaxation::socp, Relaxation::sdp}) {
        RelaxSolution sol = fixtures::solution_from_voltage(net, cliques, v, m);
        for (const Cycle& c : cycles) {
            CAPTURE(c.index);
            const CycleSum s = cycle_measure(sol, c);
            CHECK(std::abs(s.wrapped_deg) < 1e-9);
            const double turns = s.raw_deg / 360.0;
            CHECK(std::abs(turns - std::round(turns)) < 1e-9);

            Cycle rev = c;
            std::reverse(rev.buses.begin(), rev.buses.end());
            CHECK(cycle_measure(sol, rev).raw_deg == doctest::Approx(-s.raw_deg).epsilon(1e-12));
        }
    }
}

TEST_CASE("cycle sum of a hand-built triangle") {
    // pair angles 10, 20, -25 degrees around 0 -> 1 -> 2 -> 0
    RelaxSolution sol;
    sol.status = SolveStatus::optimal;
    sol.c_diag = {1.0, 1.0, 1.0};
    auto put = [&](int i, int j, double deg) {
        const double r = deg * std::numbers::pi / 180.0;
        sol.pairs[{i, j}] = {std::cos(r), std::sin(r)};
    };
    put(0, 1, 10.0);
    put(1, 2, 20.0);
    put(0, 2, 25.0);  // oriented 2 -> 0 this reads as -25
    Cycle c;
    c.buses = {0, 1, 2};
    const CycleSum s = cycle_measure(sol, c);
    CHECK(s.raw_deg == doctest::Approx(5.0));
    CHECK(s.wrapped_deg == doctest::Approx(5.0));

    Cycle missing;
    missing.buses = {0, 1, 3};
    CHECK_THROWS_AS(cycle_measure(sol, missing), TightnessError);
    sol.status = SolveStatus::primal_infeasible;
    CHECK_THROWS_AS(cycle_measure(sol, c), TightnessError);
}

TEST_CASE("tightness report of a rank-one point") {
    fixtures::Rng rng(9);
    const Network net = load_case_file(data_path("case30.m"));
    const auto cliques = network_cliques(net);
    const auto cycles = cycle_basis(build_graph(net), 0);
    const auto v = random_voltage(rng, net, 0.3);
    for (Relaxation m : {Relaxation::socp, Relaxation::sdp}) {
        RelaxSolution sol = fixtures::solution_from_voltage(net, cliques, v, m);
        sol.objective = 95.0;
        const TightnessReport r = tightness_report(sol, cycles, 1.25, 100.0);
        CHECK(r.lambda == 1.25);
        CHECK(r.method == m);
        REQUIRE(r.cliques.size() == cliques.size());
        for (std::size_t k = 0; k < cliques.size(); ++k) {
            CHECK(r.cliques[k].clique_id == cliques[k].index);
            CHECK(r.cliques[k].clique_size == static_cast<int>(cliques[k].members.size()));
            CHECK(r.cliques[k].lambda1 > 0.0);
            CHECK(r.cliques[k].tr > 10.0);
        }
        REQUIRE(r.cycles.size() == cycles.size());
        for (const CycleRow& row : r.cycles) CHECK(std::abs(row.sum.wrapped_deg) < 1e-9);
        CHECK(r.relax_objective == 95.0);
        REQUIRE(r.gap_pct.has_value());
        CHECK(*r.gap_pct == doctest::Approx(5.0));

        const TightnessReport no_nl = tightness_report(sol, cycles, 1.0);
        CHECK_FALSE(no_nl.gap_pct.has_value());
    }
    RelaxSolution bad;
    CHECK_THROWS_AS(tightness_report(bad, cycles, 1.0), TightnessError);
    CHECK_THROWS_AS(clique_matrix(bad, cliques[0]), TightnessError);
}

TEST_CASE("a relaxed SOCP point is not rank one") {
    // lifted values that satisfy the cone but not the cycle condition
    RelaxSolution sol;
    sol.status = SolveStatus::optimal;
    sol.c_diag = {1.0, 1.0, 1.0};
    sol.pairs[{0, 1}] = {0.9, 0.0};
    sol.pairs[{1, 2}] = {0.9, 0.0};
    sol.pairs[{0, 2}] = {0.9, 0.0};
    Clique c;
    c.members = {0, 1, 2};
    const CliqueMatrixView view = clique_matrix(sol, c);
    // eigenvalues 2.8, 0.1, 0.1
    CHECK(view.eigenvalues[0] == doctest::Approx(2.8));
    CHECK(view.eigenvalues[1] == doctest::Approx(0.1));
    CHECK(tr_measure(view) == doctest::Approx(std::log10(28.0)));
    Clique outside;
    outside.members = {0, 3};
    CHECK_THROWS_AS(clique_matrix(sol, outside), TightnessError);
}
