#include "popaware/social_graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace popaware {

NodeId SocialGraph::add_node(GroupId group) {
    if (group >= group_size_.size()) {
        group_size_.resize(group + 1, 0);
    }
    group_size_[group] += 1;
    group_of_.push_back(group);
    adjacency_.emplace_back();
    return static_cast<NodeId>(group_of_.size() - 1);
}

void SocialGraph::check_node(NodeId a) const {
    if (a >= group_of_.size()) {
        throw std::out_of_range("unknown node id " + std::to_string(a));
    }
}

void SocialGraph::add_edge(NodeId a, NodeId b) {
    check_node(a);
    check_node(b);
    if (a == b) {
        throw std::invalid_argument("self loop on node " + std::to_string(a));
    }
    const auto& adj = adjacency_[a];
    if (std::find(adj.begin(), adj.end(), b) != adj.end()) {
        throw std::invalid_argument("duplicate edge " + std::to_string(a) + "-" +
                                    std::to_string(b));
    }
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
    edge_count_ += 1;
}

GroupId SocialGraph::group_of(NodeId a) const {
    check_node(a);
    return group_of_[a];
}

std::size_t SocialGraph::group_size(GroupId g) const {
    if (g >= group_size_.size()) {
        throw std::out_of_range("unknown group id " + std::to_string(g));
    }
    return group_size_[g];
}

const std::vector<NodeId>& SocialGraph::neighbors(NodeId a) const {
    check_node(a);
    return adjacency_[a];
}

std::size_t SocialGraph::raw_degree(NodeId a) const {
    check_node(a);
    const GroupId g = group_of_[a];
    std::size_t degree = 0;
    for (NodeId n : adjacency_[a]) {
        if (group_of_[n] == g) {
            degree += 1;
        }
    }
    return degree;
}

double SocialGraph::degree_centrality(NodeId a) const {
    check_node(a);
    const std::size_t m = group_size_[group_of_[a]];
    if (m < 2) {
        throw std::domain_error("group of node " + std::to_string(a) +
                                " has fewer than two members");
    }
    return static_cast<double>(raw_degree(a)) / static_cast<double>(m - 1);
}

}  // namespace popaware
