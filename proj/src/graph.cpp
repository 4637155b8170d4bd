#include "sosmat/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace sosmat {

bool Clique::contains(int v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
}

bool Clique::contains_all(const std::vector<int>& vs) const {
    for (int v : vs)
        if (!contains(v)) return false;
    return true;
}

SparsityGraph::SparsityGraph(int m) : m_(m), adj_(static_cast<std::size_t>(m) + 1) {
    if (m < 0) throw std::invalid_argument("negative vertex count");
}

SparsityGraph::SparsityGraph(int m, const std::vector<std::pair<int, int>>& edges)
    : SparsityGraph(m) {
    for (auto [i, j] : edges) add_edge(i, j);
}

void SparsityGraph::check_vertex(int v) const {
    if (v < 1 || v > m_) throw std::out_of_range("vertex out of range");
}

void SparsityGraph::add_edge(int i, int j) {
    check_vertex(i);
    check_vertex(j);
    if (i == j) throw std::invalid_argument("self-loop");
    if (i > j) std::swap(i, j);
    edges_.emplace(i, j);
    adj_[static_cast<std::size_t>(i)].insert(j);
    adj_[static_cast<std::size_t>(j)].insert(i);
}

bool SparsityGraph::has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return edges_.count({i, j}) > 0;
}

const std::set<int>& SparsityGraph::neighbors(int v) const {
    check_vertex(v);
    return adj_[static_cast<std::size_t>(v)];
}

namespace {

// position[v] = index of v in order
std::vector<int> positions(const std::vector<int>& order, int m) {
    std::vector<int> pos(static_cast<std::size_t>(m) + 1, -1);
    for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    return pos;
}

bool verify_peo(const SparsityGraph& g, const std::vector<int>& order) {
    int m = g.vertex_count();
    auto pos = positions(order, m);
    for (int v = 1; v <= m; ++v)
        if (pos[static_cast<std::size_t>(v)] < 0) return false;
    for (int v = 1; v <= m; ++v) {
        std::vector<int> later;
        for (int u : g.neighbors(v))
            if (pos[static_cast<std::size_t>(u)] > pos[static_cast<std::size_t>(v)]) later.push_back(u);
        for (std::size_t a = 0; a < later.size(); ++a)
            for (std::size_t b = a + 1; b < later.size(); ++b)
                if (!g.has_edge(later[a], later[b])) return false;
    }
    return true;
}

} // namespace

std::optional<EliminationOrdering> is_chordal(const SparsityGraph& g) {
    int m = g.vertex_count();
    std::vector<int> weight(static_cast<std::size_t>(m) + 1, 0);
    std::vector<bool> visited(static_cast<std::size_t>(m) + 1, false);
    std::vector<int> mcs;
    mcs.reserve(static_cast<std::size_t>(m));
    for (int step = 0; step < m; ++step) {
        int best = -1;
        for (int v = 1; v <= m; ++v)
            if (!visited[static_cast<std::size_t>(v)] &&
                (best < 0 || weight[static_cast<std::size_t>(v)] > weight[static_cast<std::size_t>(best)]))
                best = v;
        visited[static_cast<std::size_t>(best)] = true;
        mcs.push_back(best);
        for (int u : g.neighbors(best))
            if (!visited[static_cast<std::size_t>(u)]) ++weight[static_cast<std::size_t>(u)];
    }
    std::vector<int> order(mcs.rbegin(), mcs.rend()); // reverse MCS order is a PEO iff chordal
    if (!verify_peo(g, order)) return std::nullopt;
    return EliminationOrdering{std::move(order)};
}

std::vector<Clique> maximal_cliques(const SparsityGraph& g, const EliminationOrdering& peo) {
    int m = g.vertex_count();
    if (static_cast<int>(peo.order.size()) != m || !verify_peo(g, peo.order))
        throw std::invalid_argument("not a perfect elimination ordering of this graph");
    auto pos = positions(peo.order, m);
    std::vector<Clique> candidates;
    for (int v = 1; v <= m; ++v) {
        std::vector<int> c{v};
        for (int u : g.neighbors(v))
            if (pos[static_cast<std::size_t>(u)] > pos[static_cast<std::size_t>(v)]) c.push_back(u);
        std::sort(c.begin(), c.end());
        candidates.push_back(Clique{std::move(c)});
    }
    std::vector<Clique> result;
    for (const auto& c : candidates) {
        bool dominated = false;
        for (const auto& d : candidates)
            if (&c != &d && d.vertices.size() >= c.vertices.size() && !(d == c) &&
                d.contains_all(c.vertices)) {
                dominated = true;
                break;
            }
        if (!dominated && std::find(result.begin(), result.end(), c) == result.end())
            result.push_back(c);
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::set<int> simplicial_vertices(const SparsityGraph& g) {
    std::set<int> out;
    for (int v = 1; v <= g.vertex_count(); ++v) {
        const auto& nb = g.neighbors(v);
        bool ok = true;
        for (auto it = nb.begin(); ok && it != nb.end(); ++it)
            for (auto jt = std::next(it); jt != nb.end(); ++jt)
                if (!g.has_edge(*it, *jt)) {
                    ok = false;
                    break;
                }
        if (ok) out.insert(v);
    }
    return out;
}

SparsityGraph remove_vertex(const SparsityGraph& g, int v) {
    if (v < 1 || v > g.vertex_count()) throw std::out_of_range("vertex out of range");
    SparsityGraph out(g.vertex_count() - 1);
    auto relabel = [v](int u) { return u < v ? u : u - 1; };
    for (auto [i, j] : g.edges())
        if (i != v && j != v) out.add_edge(relabel(i), relabel(j));
    return out;
}

std::pair<SparsityGraph, EliminationOrdering> chordal_extension(const SparsityGraph& g) {
    if (auto peo = is_chordal(g)) return {g, *peo};

    int m = g.vertex_count();
    std::vector<std::set<int>> adj(static_cast<std::size_t>(m) + 1);
    for (auto [i, j] : g.edges()) {
        adj[static_cast<std::size_t>(i)].insert(j);
        adj[static_cast<std::size_t>(j)].insert(i);
    }
    SparsityGraph ext(m, std::vector<std::pair<int, int>>(g.edges().begin(), g.edges().end()));
    std::vector<bool> gone(static_cast<std::size_t>(m) + 1, false);
    std::vector<int> order;
    for (int step = 0; step < m; ++step) {
        int best = -1;
        std::size_t best_deg = 0;
        for (int v = 1; v <= m; ++v) {
            if (gone[static_cast<std::size_t>(v)]) continue;
            std::size_t deg = adj[static_cast<std::size_t>(v)].size();
            if (best < 0 || deg < best_deg) {
                best = v;
                best_deg = deg;
            }
        }
        order.push_back(best);
        const auto nb = adj[static_cast<std::size_t>(best)];
        for (auto it = nb.begin(); it != nb.end(); ++it)
            for (auto jt = std::next(it); jt != nb.end(); ++jt)
                if (!adj[static_cast<std::size_t>(*it)].count(*jt)) {
                    adj[static_cast<std::size_t>(*it)].insert(*jt);
                    adj[static_cast<std::size_t>(*jt)].insert(*it);
                    ext.add_edge(*it, *jt);
                }
        gone[static_cast<std::size_t>(best)] = true;
        for (int u : nb) adj[static_cast<std::size_t>(u)].erase(best);
        adj[static_cast<std::size_t>(best)].clear();
    }
    return {ext, EliminationOrdering{std::move(order)}};
}

} // namespace sosmat
