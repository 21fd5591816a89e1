#ifndef DISTRICA_NETWORK_HPP
#define DISTRICA_NETWORK_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "districa/types.hpp"

namespace districa {

using Adjacency = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct NetworkGraph {
  Adjacency adjacency;          // symmetric, false diagonal
  std::vector<Index> channels;  // M_k per node
  int resamples = 0;            // disconnected draws rejected by er_graph

  int nodes() const { return static_cast<int>(channels.size()); }
  Index total_channels() const;
  Index channel_offset(NodeId k) const;
  std::vector<NodeId> neighbors(NodeId k) const;  // ascending
  long edge_count() const;
  bool connected() const;
  ChannelLayout layout() const;

  void validate() const;
};

NetworkGraph make_graph(const Adjacency& adjacency, std::vector<Index> channels);

/// Complete graph, star, line: small fixed topologies.
NetworkGraph complete_graph(int nodes, Index channels_per_node);
NetworkGraph line_graph(int nodes, Index channels_per_node);
NetworkGraph star_graph(int nodes, NodeId center, Index channels_per_node);

/// Erdős–Rényi G(K, p); disconnected draws are rejected and redrawn with the
/// next seed, up to 1000 attempts.
NetworkGraph er_graph(int nodes, double probability, std::vector<Index> channels, std::uint64_t seed);

struct TreeTopology {
  NodeId root = 0;
  std::vector<NodeId> parent;                       // parent[root] == root
  std::vector<std::vector<NodeId>> neighbor_sets;   // tree neighbours, ascending
  std::map<NodeId, std::vector<NodeId>> branches;   // root neighbour n → B_nq (ascending)
  std::vector<NodeId> bfs_order;                    // root first

  int nodes() const { return static_cast<int>(parent.size()); }
  const std::vector<NodeId>& root_neighbors() const { return neighbor_sets[static_cast<std::size_t>(root)]; }
  long edge_count() const;
};

/// Breadth-first shortest-path tree rooted at `root`, visiting neighbours in
/// ascending id order. Keeps every edge incident to the root.
TreeTopology prune_to_tree(const NetworkGraph& graph, NodeId root);

/// Edge-list text format: header "K M_1 ... M_K", then one "u v" pair per line.
void write_edge_list(const NetworkGraph& graph, std::ostream& os);
NetworkGraph read_edge_list(std::istream& is);

}  // namespace districa

#endif  // DISTRICA_NETWORK_HPP
