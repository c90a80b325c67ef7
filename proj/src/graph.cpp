#include "macroconv/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace macroconv {

bool UndirectedGraph::add_edge(std::size_t a, std::size_t b) {
    if (a >= adjacency_.size() || b >= adjacency_.size())
        throw std::out_of_range("edge endpoint outside graph");
    if (a == b || has_edge(a, b)) return false;
    adjacency_[a].insert(std::lower_bound(adjacency_[a].begin(), adjacency_[a].end(), b), b);
    adjacency_[b].insert(std::lower_bound(adjacency_[b].begin(), adjacency_[b].end(), a), a);
    ++edges_;
    return true;
}

bool UndirectedGraph::has_edge(std::size_t a, std::size_t b) const {
    const auto& adj = adjacency_[a];
    return std::binary_search(adj.begin(), adj.end(), b);
}

std::vector<std::pair<std::size_t, std::size_t>> UndirectedGraph::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(edges_);
    for (std::size_t a = 0; a < adjacency_.size(); ++a)
        for (std::size_t b : adjacency_[a])
            if (a < b) out.emplace_back(a, b);
    return out;
}

}  // namespace macroconv
