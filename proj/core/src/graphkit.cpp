#include "acrelax/graphkit.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>

#include "acrelax/netcase.hpp"

namespace acrelax {

BusGraph::BusGraph(std::vector<int> labels, const std::vector<Edge>& edges)
    : labels_(std::move(labels)), adj_(labels_.size()) {
    const int n = static_cast<int>(labels_.size());
    std::set<Edge> unique;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw GraphError("edge endpoint out of range");
        if (u == v) throw GraphError("self loop at vertex " + std::to_string(labels_[u]));
        unique.emplace(std::min(u, v), std::max(u, v));
    }
    edges_.assign(unique.begin(), unique.end());
    for (auto [u, v] : edges_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
}

bool BusGraph::adjacent(int u, int v) const {
    const auto& a = adj_[u];
    return std::binary_search(a.begin(), a.end(), v);
}

bool BusGraph::connected() const {
    if (labels_.empty()) return true;
    const auto parent = bfs_parents(*this, 0);
    return std::count(parent.begin(), parent.end(), -2) == 0;
}

std::vector<std::pair<int, int>> Cycle::oriented_edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(buses.size());
    for (std::size_t k = 0; k < buses.size(); ++k)
        out.emplace_back(buses[k], buses[(k + 1) % buses.size()]);
    return out;
}

BusGraph build_graph(const Network& net) {
    std::vector<int> labels;
    labels.reserve(net.num_buses());
    for (const Bus& b : net.buses()) labels.push_back(b.id);
    std::vector<Edge> edges;
    edges.reserve(net.num_branches());
    for (std::size_t k = 0; k < net.num_branches(); ++k)
        edges.emplace_back(static_cast<int>(net.from_index(k)), static_cast<int>(net.to_index(k)));
    BusGraph g(std::move(labels), edges);
    if (!g.connected()) throw GraphError("bus graph is disconnected");
    return g;
}

std::vector<int> bfs_parents(const BusGraph& g, int root) {
    // -2 marks unreached vertices
    std::vector<int> parent(g.num_vertices(), -2);
    if (g.num_vertices() == 0) return parent;
    std::deque<int> queue{root};
    parent[root] = -1;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : g.neighbors(v)) {
            if (parent[w] == -2) {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    return parent;
}

ChordalExtension chordal_extension(const BusGraph& g) {
    const int n = static_cast<int>(g.num_vertices());
    std::vector<std::set<int>> adj(n);
    for (auto [u, v] : g.edges()) {
        adj[u].insert(v);
        adj[v].insert(u);
    }

    // (degree, label, vertex) keeps the minimum-degree choice deterministic
    std::set<std::tuple<std::size_t, int, int>> queue;
    for (int v = 0; v < n; ++v) queue.emplace(adj[v].size(), g.label(v), v);

    ChordalExtension out;
    out.ordering.reserve(n);
    std::vector<Edge> all = g.edges();
    while (!queue.empty()) {
        const int v = std::get<2>(*queue.begin());
        queue.erase(queue.begin());
        out.ordering.push_back(v);

        const std::vector<int> nbrs(adj[v].begin(), adj[v].end());
        std::set<int> touched(nbrs.begin(), nbrs.end());
        for (int w : nbrs) queue.erase({adj[w].size(), g.label(w), w});
        for (std::size_t a = 0; a < nbrs.size(); ++a) {
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                const int x = nbrs[a], y = nbrs[b];
                if (adj[x].insert(y).second) {
                    adj[y].insert(x);
                    out.fill.emplace_back(std::min(x, y), std::max(x, y));
                    all.push_back(out.fill.back());
                }
            }
        }
        for (int w : nbrs) adj[w].erase(v);
        adj[v].clear();
        for (int w : touched) queue.emplace(adj[w].size(), g.label(w), w);
    }
    std::sort(out.fill.begin(), out.fill.end());
    out.graph = BusGraph(g.labels(), all);
    return out;
}

std::vector<Clique> maximal_cliques(const BusGraph& chordal, const std::vector<int>& ordering) {
    const int n = static_cast<int>(chordal.num_vertices());
    if (static_cast<int>(ordering.size()) != n) throw GraphError("ordering size mismatch");
    std::vector<int> position(n, -1);
    for (int k = 0; k < n; ++k) {
        if (ordering[k] < 0 || ordering[k] >= n || position[ordering[k]] != -1)
            throw GraphError("ordering is not a permutation");
        position[ordering[k]] = k;
    }

    std::vector<std::vector<int>> candidates;
    candidates.reserve(n);
    for (int v : ordering) {
        std::vector<int> later;
        for (int w : chordal.neighbors(v))
            if (position[w] > position[v]) later.push_back(w);
        for (std::size_t a = 0; a < later.size(); ++a)
            for (std::size_t b = a + 1; b < later.size(); ++b)
                if (!chordal.adjacent(later[a], later[b]))
                    throw GraphError("graph is not chordal for the given elimination ordering");
        later.push_back(v);
        std::sort(later.begin(), later.end());
        candidates.push_back(std::move(later));
    }

    // drop candidates contained in a larger one
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
    std::vector<std::vector<int>> kept;
    for (auto& c : candidates) {
        const bool contained = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
            return std::includes(k.begin(), k.end(), c.begin(), c.end());
        });
        if (!contained) kept.push_back(std::move(c));
    }
    std::sort(kept.begin(), kept.end());

    std::vector<Clique> out;
    out.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
        out.push_back(Clique{static_cast<int>(i), std::move(kept[i])});
    return out;
}

std::vector<Cycle> cycle_basis(const BusGraph& g, int root) {
    const auto parent = bfs_parents(g, root);
    std::vector<int> depth(g.num_vertices(), 0);
    {
        std::deque<int> queue{root};
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (int w : g.neighbors(v)) {
                if (parent[w] == v) {
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }

    std::vector<Cycle> out;
    for (auto [u, v] : g.edges()) {
        if (parent[u] == v || parent[v] == u) continue;
        // walk u and v up to their common ancestor
        std::vector<int> up_u{u}, up_v{v};
        int a = u, b = v;
        while (depth[a] > depth[b]) up_u.push_back(a = parent[a]);
        while (depth[b] > depth[a]) up_v.push_back(b = parent[b]);
        while (a != b) {
            up_u.push_back(a = parent[a]);
            up_v.push_back(b = parent[b]);
        }
        up_v.pop_back();  // common ancestor already in up_u
        Cycle c;
        c.index = static_cast<int>(out.size());
        c.buses = std::move(up_u);
        c.buses.insert(c.buses.end(), up_v.rbegin(), up_v.rend());
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

struct ChordlessSearch {
    const BusGraph& g;
    int max_len;
    int start = 0;
    std::vector<int> path;
    std::vector<char> on_path;
    std::vector<std::vector<int>> found;

    void extend() {
        const int last = path.back();
        for (int w : g.neighbors(last)) {
            if (w <= start || on_path[w]) continue;
            // w may only touch the path at `last` (and at `start` when closing)
            bool chord = false;
            for (std::size_t k = 1; k + 1 < path.size(); ++k) {
                if (g.adjacent(w, path[k])) {
                    chord = true;
                    break;
                }
            }
            if (chord) continue;
            const bool closes = g.adjacent(w, start);
            if (closes) {
                if (path.size() >= 2 && path[1] < w) {
                    auto cyc = path;
                    cyc.push_back(w);
                    found.push_back(std::move(cyc));
                }
                continue;
            }
            if (static_cast<int>(path.size()) + 1 >= max_len) continue;
            path.push_back(w);
            on_path[w] = 1;
            extend();
            on_path[w] = 0;
            path.pop_back();
        }
    }
};

}  // namespace

std::vector<Cycle> enumerate_chordless_cycles(const BusGraph& g, int max_len) {
    if (max_len < 3) throw std::invalid_argument("max_len must be at least 3");
    ChordlessSearch search{g, max_len, 0, {}, {}, {}};
    search.on_path.assign(g.num_vertices(), 0);
    for (int s = 0; s < static_cast<int>(g.num_vertices()); ++s) {
        search.start = s;
        for (int v : g.neighbors(s)) {
            if (v <= s) continue;
            search.path = {s, v};
            search.on_path[s] = search.on_path[v] = 1;
            search.extend();
            search.on_path[s] = search.on_path[v] = 0;
        }
    }
    std::sort(search.found.begin(), search.found.end());
    std::vector<Cycle> out;
    out.reserve(search.found.size());
    for (auto& f : search.found) out.push_back(Cycle{static_cast<int>(out.size()), std::move(f)});
    return out;
}

}  // namespace acrelax
