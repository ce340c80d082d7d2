#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace syncnet {

/// Directed edge (source -> target) with a positive coupling weight.
/// Agents are 0-based indices internally; scenario files use 1..N with 0 as the leader.
struct Edge {
    int source = 0;
    int target = 0;
    double weight = 1.0;

    friend bool operator==(const Edge& a, const Edge& b) {
        return a.source == b.source && a.target == b.target && a.weight == b.weight;
    }
};

class WeightedDigraph {
public:
    WeightedDigraph() = default;
    explicit WeightedDigraph(int num_agents) : num_agents_(num_agents) {
        if (num_agents < 1)
            throw std::invalid_argument("WeightedDigraph: need at least one agent");
    }

    int num_agents() const { return num_agents_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Rejects self-loops, duplicate ordered pairs, out-of-range endpoints and
    /// non-positive weights outright; band membership is checked by validate_signal.
    void add_edge(int source, int target, double weight) {
        if (source < 0 || source >= num_agents_ || target < 0 || target >= num_agents_)
            throw std::invalid_argument("add_edge: endpoint out of range");
        if (source == target)
            throw std::invalid_argument("add_edge: self-loop not allowed");
        if (!(weight > 0.0))
            throw std::invalid_argument("add_edge: weight must be positive");
        if (has_edge(source, target))
            throw std::invalid_argument("add_edge: duplicate edge for ordered pair");
        edges_.push_back({source, target, weight});
    }

    bool has_edge(int source, int target) const {
        return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
            return e.source == source && e.target == target;
        });
    }

    bool is_undirected() const {
        for (const Edge& e : edges_)
            if (!has_edge(e.target, e.source))
                return false;
        return true;
    }

private:
    int num_agents_ = 1;
    std::vector<Edge> edges_;
};

/// Edge from the leader (node 0 in scenario files) into a follower.
struct LeaderEdge {
    int target = 0;
    double weight = 1.0;
};

class LeaderGraph {
public:
    LeaderGraph() = default;
    explicit LeaderGraph(WeightedDigraph followers) : followers_(std::move(followers)) {}

    int num_agents() const { return followers_.num_agents(); }
    const WeightedDigraph& followers() const { return followers_; }
    WeightedDigraph& followers() { return followers_; }
    const std::vector<LeaderEdge>& leader_edges() const { return leader_edges_; }

    void add_leader_edge(int target, double weight) {
        if (target < 0 || target >= followers_.num_agents())
            throw std::invalid_argument("add_leader_edge: target out of range");
        if (!(weight > 0.0))
            throw std::invalid_argument("add_leader_edge: weight must be positive");
        for (const LeaderEdge& e : leader_edges_)
            if (e.target == target)
                throw std::invalid_argument("add_leader_edge: duplicate leader edge");
        leader_edges_.push_back({target, weight});
    }

    bool has_leader_edge(int target) const {
        return std::any_of(leader_edges_.begin(), leader_edges_.end(),
                           [&](const LeaderEdge& e) { return e.target == target; });
    }

private:
    WeightedDigraph followers_{1};
    std::vector<LeaderEdge> leader_edges_;
};

using Graph = std::variant<WeightedDigraph, LeaderGraph>;

inline int num_agents(const Graph& g) {
    return std::visit([](const auto& v) { return v.num_agents(); }, g);
}

inline const WeightedDigraph& follower_part(const Graph& g) {
    if (const auto* wd = std::get_if<WeightedDigraph>(&g))
        return *wd;
    return std::get<LeaderGraph>(g).followers();
}

inline bool is_leader_graph(const Graph& g) {
    return std::holds_alternative<LeaderGraph>(g);
}

namespace detail {

/// Tarjan's strongly connected components, iterative to keep the stack flat.
inline int count_sccs(const WeightedDigraph& g) {
    const int n = g.num_agents();
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : g.edges())
        adj[e.source].push_back(e.target);

    constexpr int kUnvisited = -1;
    std::vector<int> index(n, kUnvisited);
    std::vector<int> lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;
    int scc_count = 0;

    struct Frame {
        int node;
        std::size_t edge_pos;
    };
    std::vector<Frame> call_stack;

    for (int root = 0; root < n; ++root) {
        if (index[root] != kUnvisited)
            continue;
        call_stack.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call_stack.empty()) {
            Frame& frame = call_stack.back();
            const int v = frame.node;
            if (frame.edge_pos < adj[v].size()) {
                const int w = adj[v][frame.edge_pos++];
                if (index[w] == kUnvisited) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call_stack.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
            } else {
                call_stack.pop_back();
                if (!call_stack.empty())
                    lowlink[call_stack.back().node] = std::min(lowlink[call_stack.back().node], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    ++scc_count;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                    } while (w != v);
                }
            }
        }
    }
    return scc_count;
}

}  // namespace detail

/// Directed path from every node to every other node; single node counts as connected.
inline bool is_strongly_connected(const WeightedDigraph& g) {
    if (g.num_agents() == 1)
        return true;
    return detail::count_sccs(g) == 1;
}

/// Every follower reachable from the leader through leader and follower edges.
inline bool is_leader_connected(const LeaderGraph& g) {
    const int n = g.num_agents();
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : g.followers().edges())
        adj[e.source].push_back(e.target);

    std::vector<bool> reached(n, false);
    std::vector<int> frontier;
    for (const LeaderEdge& e : g.leader_edges())
        if (!reached[e.target]) {
            reached[e.target] = true;
            frontier.push_back(e.target);
        }
    while (!frontier.empty()) {
        const int v = frontier.back();
        frontier.pop_back();
        for (int w : adj[v])
            if (!reached[w]) {
                reached[w] = true;
                frontier.push_back(w);
            }
    }
    return std::all_of(reached.begin(), reached.end(), [](bool r) { return r; });
}

/// Symmetric closure viewed as an undirected graph: one component containing all agents.
inline bool is_connected_undirected(const WeightedDigraph& g) {
    const int n = g.num_agents();
    if (n == 1)
        return true;
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : g.edges()) {
        adj[e.source].push_back(e.target);
        adj[e.target].push_back(e.source);
    }
    std::vector<bool> seen(n, false);
    std::vector<int> frontier{0};
    seen[0] = true;
    int count = 1;
    while (!frontier.empty()) {
        const int v = frontier.back();
        frontier.pop_back();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                frontier.push_back(w);
            }
    }
    return count == n;
}

}  // namespace syncnet
