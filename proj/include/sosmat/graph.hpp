#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace sosmat {

/// Sorted vertex subset; doubles as the implicit 0/1 inflation map E_C.
struct Clique {
    std::vector<int> vertices; // strictly increasing, 1-based

    int size() const { return static_cast<int>(vertices.size()); }
    bool contains(int v) const;
    bool contains_all(const std::vector<int>& vs) const;
    bool operator==(const Clique& o) const { return vertices == o.vertices; }
    bool operator<(const Clique& o) const { return vertices < o.vertices; }
};

struct EliminationOrdering {
    std::vector<int> order; // permutation of 1..m
};

/// Undirected graph on vertices 1..m with canonical edge storage (i < j).
class SparsityGraph {
public:
    SparsityGraph() : m_(0) {}
    explicit SparsityGraph(int m);
    SparsityGraph(int m, const std::vector<std::pair<int, int>>& edges);

    int vertex_count() const { return m_; }
    const std::set<std::pair<int, int>>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    void add_edge(int i, int j);
    bool has_edge(int i, int j) const;
    const std::set<int>& neighbors(int v) const;

    bool operator==(const SparsityGraph& o) const {
        return m_ == o.m_ && edges_ == o.edges_;
    }

private:
    void check_vertex(int v) const;

    int m_;
    std::set<std::pair<int, int>> edges_;
    std::vector<std::set<int>> adj_; // index 0 unused
};

/// Maximum cardinality search plus PEO verification.
std::optional<EliminationOrdering> is_chordal(const SparsityGraph& g);

/// Maximal cliques of a chordal graph via the PEO sweep, sorted lexicographically.
std::vector<Clique> maximal_cliques(const SparsityGraph& g, const EliminationOrdering& peo);

std::set<int> simplicial_vertices(const SparsityGraph& g);

/// Delete v and relabel the remaining vertices to 1..m-1 preserving order.
SparsityGraph remove_vertex(const SparsityGraph& g, int v);

/// Greedy minimum-degree fill-in; returns the input unchanged when already chordal.
std::pair<SparsityGraph, EliminationOrdering> chordal_extension(const SparsityGraph& g);

} // namespace sosmat
