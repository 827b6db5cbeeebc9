// Undirected social graph partitioned into groups, with per-group degree
// centrality.
//
// Nodes belong to exactly one group.  Edges may cross groups (sender-to-relay
// links do), but popularity is a within-group notion: raw_degree counts only
// neighbors that share the node's group, and degree_centrality normalizes by
// (group size - 1).  The graph is append-only; once a scenario is built it is
// read-only and safe for concurrent reads.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace popaware {

using NodeId = std::uint32_t;
using GroupId = std::uint32_t;

class SocialGraph {
  public:
    // Adds a node to `group` and returns its id.  Node ids are dense and
    // assigned in insertion order; groups are created implicitly.
    NodeId add_node(GroupId group);

    // Adds an undirected edge.  Throws std::out_of_range on unknown nodes,
    // std::invalid_argument on self loops and duplicate edges.
    void add_edge(NodeId a, NodeId b);

    std::size_t node_count() const { return group_of_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t group_count() const { return group_size_.size(); }

    // Throws std::out_of_range on unknown node / group ids.
    GroupId group_of(NodeId a) const;
    std::size_t group_size(GroupId g) const;
    const std::vector<NodeId>& neighbors(NodeId a) const;

    // Count of distinct neighbors of `a` inside a's own group.
    std::size_t raw_degree(NodeId a) const;

    // raw_degree(a) / (group_size - 1), in [0, 1].  Throws std::domain_error
    // when a's group has fewer than two members (normalization undefined).
    double degree_centrality(NodeId a) const;

  private:
    void check_node(NodeId a) const;

    std::vector<GroupId> group_of_;
    std::vector<std::size_t> group_size_;
    std::vector<std::vector<NodeId>> adjacency_;
    std::size_t edge_count_ = 0;
};

}  // namespace popaware
