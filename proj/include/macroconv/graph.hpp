#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace macroconv {

/// Simple undirected graph over nodes 0..n-1. Self-loops and parallel edges are ignored.
class UndirectedGraph {
public:
    UndirectedGraph() = default;
    explicit UndirectedGraph(std::size_t nodes) : adjacency_(nodes) {}

    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edges_; }

    /// Returns true if the edge was new.
    bool add_edge(std::size_t a, std::size_t b);
    bool has_edge(std::size_t a, std::size_t b) const;

    const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_[v]; }
    std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }

    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

private:
    std::vector<std::vector<std::size_t>> adjacency_;
    std::size_t edges_ = 0;
};

}  // namespace macroconv
