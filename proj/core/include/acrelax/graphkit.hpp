#pragma once

// Graph algorithms over the bus-branch graph: chordal extension by greedy
// minimum-degree elimination, maximal cliques of the chordal graph, and
// cycle sets (fundamental BFS basis, chordless enumeration).

#include <cstddef>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace acrelax {

class Network;

using Edge = std::pair<int, int>;  // vertex positions, first < second

/// Simple undirected graph over bus positions 0..n-1.
class BusGraph {
public:
    BusGraph() = default;
    /// `labels[i]` is the bus id of vertex i (used for deterministic tie-breaks
    /// and reporting). Self loops are rejected; parallel edges collapse.
    BusGraph(std::vector<int> labels, const std::vector<Edge>& edges);

    std::size_t num_vertices() const noexcept { return labels_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }  // sorted
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }  // sorted
    bool adjacent(int u, int v) const;
    int label(int v) const { return labels_[v]; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    bool connected() const;

private:
    std::vector<int> labels_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

struct Clique {
    int index = 0;
    std::vector<int> members;  // ascending vertex positions
};

struct Cycle {
    int index = 0;
    std::vector<int> buses;  // closed walk without the repeated first vertex
    /// Oriented edges (buses[k], buses[k+1]) with the closing edge last.
    std::vector<std::pair<int, int>> oriented_edges() const;
};

struct ChordalExtension {
    BusGraph graph;
    std::vector<int> ordering;  // elimination order, ordering[k] eliminated k-th
    std::vector<Edge> fill;     // edges added on top of the input graph
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws GraphError when the network graph is disconnected.
BusGraph build_graph(const Network& net);

ChordalExtension chordal_extension(const BusGraph& g);

/// Maximal cliques of a chordal graph given a perfect elimination ordering.
/// Throws GraphError when the ordering is not perfect for `chordal`.
std::vector<Clique> maximal_cliques(const BusGraph& chordal, const std::vector<int>& ordering);

/// Fundamental cycle basis from a BFS spanning tree rooted at `root`.
std::vector<Cycle> cycle_basis(const BusGraph& g, int root);

/// All chordless cycles with 3 <= length <= max_len, one per rotation and
/// reflection class, ordered by (smallest vertex, sequence).
std::vector<Cycle> enumerate_chordless_cycles(const BusGraph& g, int max_len);

/// BFS tree from `root` (neighbours visited in ascending order); parent of the
/// root is -1.
std::vector<int> bfs_parents(const BusGraph& g, int root);

}  // namespace acrelax
