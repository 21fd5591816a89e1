#include "districa/network.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace districa {

Index NetworkGraph::total_channels() const {
  Index m = 0;
  for (Index c : channels) m += c;
  return m;
}

Index NetworkGraph::channel_offset(NodeId k) const {
  Index off = 0;
  for (NodeId j = 0; j < k; ++j) off += channels[static_cast<std::size_t>(j)];
  return off;
}

std::vector<NodeId> NetworkGraph::neighbors(NodeId k) const {
  std::vector<NodeId> out;
  for (NodeId j = 0; j < nodes(); ++j)
    if (adjacency(k, j)) out.push_back(j);
  return out;
}

long NetworkGraph::edge_count() const {
  return static_cast<long>(adjacency.count()) / 2;
}

bool NetworkGraph::connected() const {
  const int k = nodes();
  if (k == 0) return false;
  std::vector<bool> seen(static_cast<std::size_t>(k), false);
  std::deque<NodeId> queue{0};
  seen[0] = true;
  int reached = 1;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v = 0; v < k; ++v) {
      if (adjacency(u, v) && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == k;
}

ChannelLayout NetworkGraph::layout() const {
  ChannelLayout out;
  for (NodeId k = 0; k < nodes(); ++k) out.push_back({k, channels[static_cast<std::size_t>(k)]});
  return out;
}

void NetworkGraph::validate() const {
  const Index k = static_cast<Index>(channels.size());
  require(k >= 1, ErrorKind::InvalidInput, "graph needs at least one node");
  require(adjacency.rows() == k && adjacency.cols() == k, ErrorKind::InvalidInput,
          "adjacency size does not match node count");
  for (Index i = 0; i < k; ++i) {
    require(!adjacency(i, i), ErrorKind::InvalidInput, "self-loops are not allowed");
    require(channels[static_cast<std::size_t>(i)] >= 1, ErrorKind::InvalidInput,
            "every node needs at least one channel");
    for (Index j = 0; j < k; ++j)
      require(adjacency(i, j) == adjacency(j, i), ErrorKind::InvalidInput, "adjacency must be symmetric");
  }
}

NetworkGraph make_graph(const Adjacency& adjacency, std::vector<Index> channels) {
  NetworkGraph g{adjacency, std::move(channels), 0};
  g.validate();
  return g;
}

NetworkGraph complete_graph(int nodes, Index channels_per_node) {
  Adjacency adj = Adjacency::Constant(nodes, nodes, true);
  adj.matrix().diagonal().setConstant(false);
  return make_graph(adj, std::vector<Index>(static_cast<std::size_t>(nodes), channels_per_node));
}

NetworkGraph line_graph(int nodes, Index channels_per_node) {
  Adjacency adj = Adjacency::Constant(nodes, nodes, false);
  for (int i = 0; i + 1 < nodes; ++i) adj(i, i + 1) = adj(i + 1, i) = true;
  return make_graph(adj, std::vector<Index>(static_cast<std::size_t>(nodes), channels_per_node));
}

NetworkGraph star_graph(int nodes, NodeId center, Index channels_per_node) {
  Adjacency adj = Adjacency::Constant(nodes, nodes, false);
  for (int i = 0; i < nodes; ++i)
    if (i != center) adj(i, center) = adj(center, i) = true;
  return make_graph(adj, std::vector<Index>(static_cast<std::size_t>(nodes), channels_per_node));
}

NetworkGraph er_graph(int nodes, double probability, std::vector<Index> channels, std::uint64_t seed) {
  require(nodes >= 2, ErrorKind::InvalidInput, "Erdős–Rényi graph needs at least 2 nodes");
  require(probability > 0.0 && probability <= 1.0, ErrorKind::InvalidInput,
          "connection probability must lie in (0, 1]");
  require(static_cast<int>(channels.size()) == nodes, ErrorKind::InvalidInput,
          "one channel count per node required");
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::bernoulli_distribution edge(probability);
    Adjacency adj = Adjacency::Constant(nodes, nodes, false);
    for (int i = 0; i < nodes; ++i)
      for (int j = i + 1; j < nodes; ++j) adj(i, j) = adj(j, i) = edge(rng);
    NetworkGraph g = make_graph(adj, channels);
    if (g.connected()) {
      g.resamples = attempt;
      return g;
    }
  }
  throw Error(ErrorKind::GenerationFailure, "no connected Erdős–Rényi draw in 1000 attempts");
}

long TreeTopology::edge_count() const {
  long n = 0;
  for (NodeId k = 0; k < nodes(); ++k)
    if (parent[static_cast<std::size_t>(k)] != k) ++n;
  return n;
}

TreeTopology prune_to_tree(const NetworkGraph& graph, NodeId root) {
  graph.validate();
  const int k = graph.nodes();
  require(root >= 0 && root < k, ErrorKind::InvalidInput, "root outside the graph");
  require(graph.connected(), ErrorKind::InvalidInput, "cannot prune a disconnected graph");

  TreeTopology tree;
  tree.root = root;
  tree.parent.assign(static_cast<std::size_t>(k), -1);
  tree.neighbor_sets.assign(static_cast<std::size_t>(k), {});
  tree.parent[static_cast<std::size_t>(root)] = root;

  std::deque<NodeId> queue{root};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    tree.bfs_order.push_back(u);
    for (NodeId v : graph.neighbors(u)) {
      if (tree.parent[static_cast<std::size_t>(v)] != -1) continue;
      tree.parent[static_cast<std::size_t>(v)] = u;
      tree.neighbor_sets[static_cast<std::size_t>(u)].push_back(v);
      tree.neighbor_sets[static_cast<std::size_t>(v)].push_back(u);
      queue.push_back(v);
    }
  }
  for (auto& ns : tree.neighbor_sets) std::sort(ns.begin(), ns.end());

  // Branch of k is the depth-1 ancestor on its path to the root.
  for (NodeId n : tree.root_neighbors()) tree.branches[n] = {};
  for (NodeId v = 0; v < k; ++v) {
    if (v == root) continue;
    NodeId a = v;
    while (tree.parent[static_cast<std::size_t>(a)] != root) a = tree.parent[static_cast<std::size_t>(a)];
    tree.branches[a].push_back(v);
  }
  return tree;
}

void write_edge_list(const NetworkGraph& graph, std::ostream& os) {
  os << graph.nodes();
  for (Index c : graph.channels) os << ' ' << c;
  os << '\n';
  for (NodeId u = 0; u < graph.nodes(); ++u)
    for (NodeId v = u + 1; v < graph.nodes(); ++v)
      if (graph.adjacency(u, v)) os << u << ' ' << v << '\n';
}

NetworkGraph read_edge_list(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorKind::InvalidInput, "edge list is empty");
  std::istringstream header(line);
  int k = 0;
  require(static_cast<bool>(header >> k) && k >= 1, ErrorKind::InvalidInput, "bad edge-list header");
  std::vector<Index> channels(static_cast<std::size_t>(k));
  for (auto& c : channels)
    require(static_cast<bool>(header >> c), ErrorKind::InvalidInput, "header lists fewer channel counts than nodes");
  std::string extra;
  require(!(header >> extra), ErrorKind::InvalidInput, "header lists more channel counts than nodes");

  Adjacency adj = Adjacency::Constant(k, k, false);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    int u = -1;
    int v = -1;
    require(static_cast<bool>(row >> u >> v) && !(row >> extra), ErrorKind::InvalidInput,
            "malformed edge on line " + std::to_string(lineno));
    require(u >= 0 && u < k && v >= 0 && v < k && u != v, ErrorKind::InvalidInput,
            "invalid edge on line " + std::to_string(lineno));
    adj(u, v) = adj(v, u) = true;
  }
  return make_graph(adj, std::move(channels));
}

}  // namespace districa
