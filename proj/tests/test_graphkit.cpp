#include <doctest.h>

#include <algorithm>
#include <map>

#include "acrelax/graphkit.hpp"
#include "acrelax/netcase.hpp"
#include "support/fixtures.hpp"

using namespace acrelax;
using fixtures::data_path;

namespace {

BusGraph graph_of(const char* file) { return build_graph(load_case_file(data_path(file))); }

BusGraph ring(int n) {
    std::vector<int> labels(n);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        labels[i] = i + 1;
        edges.emplace_back(std::min(i, (i + 1) % n), std::max(i, (i + 1) % n));
    }
    return BusGraph(labels, edges);
}

bool is_closed_path(const BusGraph& g, const Cycle& c) {
    if (c.buses.size() < 3) return false;
    std::vector<int> sorted = c.buses;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
    for (auto [u, v] : c.oriented_edges())
        if (!g.adjacent(u, v)) return false;
    return true;
}

bool has_chord(const BusGraph& g, const Cycle& c) {
    const std::size_t n = c.buses.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (g.adjacent(c.buses[i], c.buses[j])) return true;
        }
    return false;
}

// GF(2) rank of the edge-incidence vectors of a cycle set
std::size_t cycle_space_rank(const BusGraph& g, const std::vector<Cycle>& cycles) {
    std::map<Edge, std::size_t> index;
    for (const Edge& e : g.edges()) index.emplace(e, index.size());
    std::vector<std::vector<bool>> rows;
    for (const Cycle& c : cycles) {
        std::vector<bool> r(index.size(), false);
        for (auto [u, v] : c.oriented_edges()) r[index.at({std::min(u, v), std::max(u, v)})] = true;
        rows.push_back(r);
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < index.size() && rank < rows.size(); ++col) {
        std::size_t p = rank;
        while (p < rows.size() && !rows[p][col]) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && rows[r][col])
                for (std::size_t k = 0; k < index.size(); ++k) rows[r][k] = rows[r][k] != rows[rank][k];
        ++rank;
    }
    return rank;
}

void check_chordal_properties(const BusGraph& g) {
    const ChordalExtension ext = chordal_extension(g);
    const BusGraph& h = ext.graph;
    REQUIRE(h.num_vertices() == g.num_vertices());
    CHECK(h.num_edges() == g.num_edges() + ext.fill.size());
    for (const Edge& e : g.edges()) CHECK(h.adjacent(e.first, e.second));
    for (const Edge& e : ext.fill) CHECK_FALSE(g.adjacent(e.first, e.second));

    // perfect elimination: the later neighbours of every vertex are pairwise adjacent
    std::vector<int> pos(h.num_vertices());
    for (std::size_t k = 0; k < ext.ordering.size(); ++k) pos[ext.ordering[k]] = static_cast<int>(k);
    for (int v : ext.ordering) {
        std::vector<int> later;
        for (int u : h.neighbors(v))
            if (pos[u] > pos[v]) later.push_back(u);
        for (std::size_t a = 0; a < later.size(); ++a)
            for (std::size_t b = a + 1; b < later.size(); ++b) CHECK(h.adjacent(later[a], later[b]));
    }

    const auto cliques = maximal_cliques(h, ext.ordering);
    for (std::size_t i = 0; i < cliques.size(); ++i) {
        const auto& m = cliques[i].members;
        CHECK(cliques[i].index == static_cast<int>(i));
        CHECK(std::is_sorted(m.begin(), m.end()));
        for (std::size_t a = 0; a < m.size(); ++a)
            for (std::size_t b = a + 1; b < m.size(); ++b) CHECK(h.adjacent(m[a], m[b]));
        for (std::size_t j = 0; j < cliques.size(); ++j) {
            if (i == j) continue;
            const auto& o = cliques[j].members;
            CHECK_FALSE(std::includes(o.begin(), o.end(), m.begin(), m.end()));
        }
        // maximal: no outside vertex is adjacent to all members
        for (int v = 0; v < static_cast<int>(h.num_vertices()); ++v) {
            if (std::binary_search(m.begin(), m.end(), v)) continue;
            const bool all = std::all_of(m.begin(), m.end(), [&](int u) { return h.adjacent(u, v); });
            CHECK_FALSE(all);
        }
    }
    for (const Edge& e : h.edges()) {
        const bool covered = std::any_of(cliques.begin(), cliques.end(), [&](const Clique& c) {
            return std::binary_search(c.members.begin(), c.members.end(), e.first) &&
                   std::binary_search(c.members.begin(), c.members.end(), e.second);
        });
        CHECK(covered);
    }
}

}  // namespace

TEST_CASE("bus graphs collapse parallel branches") {
    // unique edges counted by an independent graph library
    struct Row {
        const char* file;
        std::size_t vertices, edges, basis;
    };
    for (const Row& r : {Row{"case9.m", 9, 9, 1}, Row{"case14.m", 14, 20, 7}, Row{"case30.m", 30, 41, 12},
                         Row{"case118.m", 118, 179, 62}, Row{"case300.m", 300, 409, 110}}) {
        CAPTURE(r.file);
        const BusGraph g = graph_of(r.file);
        CHECK(g.num_vertices() == r.vertices);
        CHECK(g.num_edges() == r.edges);
        CHECK(g.connected());
        CHECK(std::is_sorted(g.edges().begin(), g.edges().end()));
        const auto basis = cycle_basis(g, 0);
        CHECK(basis.size() == r.basis);
        CHECK(basis.size() == g.num_edges() - g.num_vertices() + 1);
    }
}

TEST_CASE("fundamental cycles are simple, closed and independent") {
    for (const char* file : {"case14.m", "case30.m", "case118.m"}) {
        CAPTURE(file);
        const BusGraph g = graph_of(file);
        const auto basis = cycle_basis(g, 0);
        for (std::size_t k = 0; k < basis.size(); ++k) {
            CHECK(basis[k].index == static_cast<int>(k));
            CHECK(is_closed_path(g, basis[k]));
        }
        CHECK(cycle_space_rank(g, basis) == basis.size());
    }
}

TEST_CASE("bfs tree parents") {
    const BusGraph g = ring(6);
    const auto parent = bfs_parents(g, 0);
    CHECK(parent == std::vector<int>{-1, 0, 1, 2, 5, 0});
    const auto basis = cycle_basis(g, 0);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0].buses.size() == 6);
}

TEST_CASE("chordless cycle counts") {
    // counts from an independent enumeration of simple cycles filtered for chords
    struct Row {
        const char* file;
        std::size_t up_to4, up_to6, up_to8;
    };
    for (const Row& r : {Row{"case9.m", 0, 1, 1}, Row{"case14.m", 5, 8, 8}, Row{"case30.m", 8, 9, 15}}) {
        CAPTURE(r.file);
        const BusGraph g = graph_of(r.file);
        CHECK(enumerate_chordless_cycles(g, 4).size() == r.up_to4);
        CHECK(enumerate_chordless_cycles(g, 6).size() == r.up_to6);
        const auto all = enumerate_chordless_cycles(g, 8);
        CHECK(all.size() == r.up_to8);
        for (const Cycle& c : all) {
            CHECK(is_closed_path(g, c));
            CHECK_FALSE(has_chord(g, c));
            CHECK(c.buses.front() == *std::min_element(c.buses.begin(), c.buses.end()));
        }
    }
    CHECK_THROWS_AS(enumerate_chordless_cycles(ring(4), 2), std::invalid_argument);
    CHECK(enumerate_chordless_cycles(ring(7), 6).empty());
    CHECK(enumerate_chordless_cycles(ring(7), 7).size() == 1);
}

TEST_CASE("chordal extension of a square adds one chord") {
    const BusGraph g = ring(4);
    const ChordalExtension ext = chordal_extension(g);
    CHECK(ext.fill.size() == 1);
    const auto cliques = maximal_cliques(ext.graph, ext.ordering);
    REQUIRE(cliques.size() == 2);
    CHECK(cliques[0].members.size() == 3);
    CHECK(cliques[1].members.size() == 3);
}

TEST_CASE("chordal extension of a tree adds nothing") {
    fixtures::Rng rng(11);
    const BusGraph g = build_graph(fixtures::random_radial(rng, 12));
    const ChordalExtension ext = chordal_extension(g);
    CHECK(ext.fill.empty());
    const auto cliques = maximal_cliques(ext.graph, ext.ordering);
    CHECK(cliques.size() == g.num_edges());
    for (const Clique& c : cliques) CHECK(c.members.size() == 2);
    CHECK(cycle_basis(g, 0).empty());
}

TEST_CASE("chordal extension properties on bundled cases") {
    for (const char* file : {"case9.m", "case14.m", "case30.m", "case118.m", "case300.m"}) {
        CAPTURE(file);
        check_chordal_properties(graph_of(file));
    }
}

TEST_CASE("chordal extension properties on random graphs") {
    fixtures::Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = fixtures::uniform_int(rng, 3, 25);
        std::vector<int> labels(n);
        std::vector<Edge> edges;
        for (int v = 0; v < n; ++v) labels[v] = 100 + v;
        for (int v = 1; v < n; ++v) edges.emplace_back(fixtures::uniform_int(rng, 0, v - 1), v);
        const int extra = fixtures::uniform_int(rng, 0, n);
        for (int k = 0; k < extra; ++k) {
            const int a = fixtures::uniform_int(rng, 0, n - 1), b = fixtures::uniform_int(rng, 0, n - 1);
            if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
        }
        CAPTURE(trial);
        check_chordal_properties(BusGraph(labels, edges));
    }
}

TEST_CASE("graph errors") {
    CHECK_THROWS_AS(BusGraph({1, 2}, {{0, 0}}), GraphError);
    CHECK_THROWS_AS(BusGraph({1, 2}, {{0, 2}}), GraphError);

    const BusGraph square = ring(4);
    CHECK_THROWS_AS(maximal_cliques(square, {0, 1, 2, 3}), GraphError);  // chordless 4-cycle
    CHECK_THROWS_AS(maximal_cliques(square, {0, 1, 2}), GraphError);
    CHECK_THROWS_AS(maximal_cliques(square, {0, 1, 1, 2}), GraphError);

    std::vector<Bus> buses(4);
    for (int i = 0; i < 4; ++i) buses[i].id = i + 1;
    buses[0].is_slack = true;
    std::vector<Branch> branches(2);
    branches[0].from_bus = 1;
    branches[0].to_bus = 2;
    branches[0].x = 0.1;
    branches[1].from_bus = 3;
    branches[1].to_bus = 4;
    branches[1].x = 0.1;
    // a split network never reaches build_graph: the constructor rejects it
    CHECK_THROWS_AS(Network(100.0, buses, branches, {}), NetworkError);
}
