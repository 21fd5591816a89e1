#include "districa/engine.hpp"

#include <random>
#include <string>
#include <utility>

namespace districa {

void CommTally::charge_fused(NodeId sender, long long scalars) {
  scalars_fused += scalars;
  per_node_sent.at(static_cast<std::size_t>(sender)) += scalars;
}

void CommTally::charge_disseminated(NodeId sender, long long scalars) {
  scalars_disseminated += scalars;
  per_node_sent.at(static_cast<std::size_t>(sender)) += scalars;
}

MatrixXd compress(const NodeState& state, const MatrixXd& local) {
  require(local.cols() == state.channels(), ErrorKind::InvalidInput,
          "node " + std::to_string(state.node) + ": batch has " + std::to_string(local.cols()) +
              " channels, filter expects " + std::to_string(state.channels()));
  return local * state.filter;
}

std::map<NodeId, MatrixXd> fuse_forward(const TreeTopology& tree, const std::vector<MatrixXd>& compressed,
                                        CommTally& tally) {
  const int k = tree.nodes();
  require(static_cast<int>(compressed.size()) == k, ErrorKind::InvalidInput,
          "fusion needs one compressed batch per node");
  std::vector<std::vector<FusedMessage>> inbox(static_cast<std::size_t>(k));

  // Reverse BFS order: every child is done before its parent, so each node
  // sends once it has heard from all neighbours except its parent.
  for (auto it = tree.bfs_order.rbegin(); it != tree.bfs_order.rend(); ++it) {
    const NodeId node = *it;
    if (node == tree.root) continue;
    const MatrixXd& own = compressed[static_cast<std::size_t>(node)];
    require(own.size() > 0, ErrorKind::InvalidInput, "missing compressed batch for node " + std::to_string(node));
    MatrixXd payload = own;
    for (const FusedMessage& msg : inbox[static_cast<std::size_t>(node)]) {
      require(msg.payload.rows() == own.rows() && msg.payload.cols() == own.cols(), ErrorKind::InvalidInput,
              "fused message shape mismatch at node " + std::to_string(node));
      payload += msg.payload;
    }
    const NodeId parent = tree.parent[static_cast<std::size_t>(node)];
    tally.charge_fused(node, static_cast<long long>(payload.size()));
    inbox[static_cast<std::size_t>(parent)].push_back(FusedMessage{node, parent, std::move(payload)});
  }

  std::map<NodeId, MatrixXd> out;
  for (FusedMessage& msg : inbox[static_cast<std::size_t>(tree.root)]) out.emplace(msg.from, std::move(msg.payload));
  return out;
}

StackedLocalBatch stack_local(NodeId root, const MatrixXd& own, const std::map<NodeId, MatrixXd>& fused) {
  const Index n = own.rows();
  Index cols = own.cols();
  for (const auto& [node, batch] : fused) {
    require(batch.rows() == n, ErrorKind::InvalidInput,
            "sample count of neighbour " + std::to_string(node) + " differs from the local batch");
    cols += batch.cols();
  }
  StackedLocalBatch out{MatrixXd(n, cols), {{root, own.cols()}}};
  out.data.leftCols(own.cols()) = own;
  Index offset = own.cols();
  for (const auto& [node, batch] : fused) {
    out.data.middleCols(offset, batch.cols()) = batch;
    out.layout.push_back({node, batch.cols()});
    offset += batch.cols();
  }
  return out;
}

SolutionPartition partition_solution(const MatrixXd& stacked_filter, const ChannelLayout& layout) {
  require(!layout.empty() && total_channels(layout) == stacked_filter.rows(), ErrorKind::InvalidInput,
          "stacked filter rows do not match the local layout");
  SolutionPartition p;
  p.own = stacked_filter.topRows(layout.front().channels);
  Index offset = layout.front().channels;
  for (std::size_t b = 1; b < layout.size(); ++b) {
    p.gains.emplace(layout[b].node, stacked_filter.middleRows(offset, layout[b].channels));
    offset += layout[b].channels;
  }
  return p;
}

LocalSolution solve_local(const StackedLocalBatch& stacked, Index components, const ContrastFunction& contrast,
                          const SolverOptions& opts, const std::optional<MatrixXd>& warm_start) {
  LocalSolution sol{run_fastica(stacked.data, components, contrast, opts, warm_start), {}};
  sol.partition = partition_solution(sol.ica.demixing_raw, stacked.layout);
  return sol;
}

std::vector<NodeState> apply_update(const std::vector<NodeState>& states, const SolutionPartition& partition,
                                    const TreeTopology& tree, CommTally& tally) {
  require(static_cast<int>(states.size()) == tree.nodes(), ErrorKind::InvalidInput, "one state per node required");
  std::vector<NodeState> next = states;
  auto& root = next[static_cast<std::size_t>(tree.root)];
  require(partition.own.rows() == root.channels(), ErrorKind::InvalidInput, "updating-node block has wrong size");
  root.filter = partition.own;
  const Index q = partition.own.cols();

  for (const auto& [n, branch] : tree.branches) {
    const auto g = partition.gains.find(n);
    require(g != partition.gains.end(), ErrorKind::InvalidInput, "no gain for branch " + std::to_string(n));
    require(g->second.rows() == q && g->second.cols() == q, ErrorKind::InvalidInput, "gain must be Q×Q");
    // G_n travels q → n → ... ; every branch node receives one Q×Q copy from its parent.
    for (NodeId k : branch) {
      tally.charge_disseminated(tree.parent[static_cast<std::size_t>(k)], q * q);
      auto& s = next[static_cast<std::size_t>(k)];
      s.filter = MatrixXd(s.filter * g->second);
    }
  }
  return next;
}

MatrixXd global_filter(const std::vector<NodeState>& states) {
  require(!states.empty(), ErrorKind::InvalidInput, "no node states");
  Index rows = 0;
  for (const auto& s : states) rows += s.channels();
  MatrixXd x(rows, states.front().filter.cols());
  Index offset = 0;
  for (const auto& s : states) {
    x.middleRows(offset, s.channels()) = s.filter;
    offset += s.channels();
  }
  return x;
}

std::vector<NodeState> random_states(const NetworkGraph& graph, Index components, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<NodeState> states;
  for (NodeId k = 0; k < graph.nodes(); ++k) {
    MatrixXd x(graph.channels[static_cast<std::size_t>(k)], components);
    for (Index j = 0; j < x.cols(); ++j)
      for (Index i = 0; i < x.rows(); ++i) x(i, j) = normal(rng);
    states.push_back({k, std::move(x)});
  }
  return states;
}

namespace {

std::uint64_t iteration_seed(std::uint64_t base, long iteration) {
  return base ^ (static_cast<std::uint64_t>(iteration + 1) * 0x9E3779B97F4A7C15ULL);
}

MatrixXd stacked_iterate(const NodeState& root, const ChannelLayout& layout) {
  const Index q = root.filter.cols();
  MatrixXd x = MatrixXd::Zero(total_channels(layout), q);
  x.topRows(root.channels()) = root.filter;
  Index offset = root.channels();
  for (std::size_t b = 1; b < layout.size(); ++b) {
    x.middleRows(offset, q).setIdentity();
    offset += q;
  }
  return x;
}

// Column m of X̃ is flipped when x̃_mᵀ R̃ x̃_prev,m < 0, i.e. when its output
// anti-correlates with output m of the current network-wide filter.
void align_signs(LocalSolution& sol, const MatrixXd& previous) {
  const MatrixXd cross = sol.ica.demixing_raw.transpose() * sol.ica.covariance.values * previous;
  for (Index m = 0; m < cross.rows(); ++m) {
    if (cross(m, m) < 0.0) {
      sol.ica.demixing_raw.col(m) *= -1.0;
      sol.ica.demixing_orthogonal.col(m) *= -1.0;
    }
  }
}

}  // namespace

std::pair<std::vector<NodeState>, IterationRecord> districa_iteration(const NetworkGraph& graph,
                                                                      const std::vector<NodeState>& states,
                                                                      const MatrixXd& network_batch, long iteration,
                                                                      const EngineOptions& opts) {
  const int k = graph.nodes();
  require(static_cast<int>(states.size()) == k, ErrorKind::InvalidInput, "one state per node required");
  require(network_batch.cols() == graph.total_channels(), ErrorKind::InvalidInput,
          "network batch has the wrong channel count");
  const NodeId q = static_cast<NodeId>(iteration % k);
  const TreeTopology tree = prune_to_tree(graph, q);

  IterationRecord rec;
  rec.iteration = iteration;
  rec.updating_node = q;
  rec.tally = CommTally(k);

  std::vector<MatrixXd> compressed(static_cast<std::size_t>(k));
  for (NodeId node = 0; node < k; ++node) {
    if (node == q) continue;
    const auto local = network_batch.middleCols(graph.channel_offset(node), graph.channels[static_cast<std::size_t>(node)]);
    compressed[static_cast<std::size_t>(node)] = compress(states[static_cast<std::size_t>(node)], local);
  }
  const auto fused = fuse_forward(tree, compressed, rec.tally);
  const MatrixXd own = network_batch.middleCols(graph.channel_offset(q), graph.channels[static_cast<std::size_t>(q)]);
  const StackedLocalBatch stacked = stack_local(q, own, fused);

  SolverOptions solver = opts.solver;
  solver.rng_seed = iteration_seed(opts.solver.rng_seed, iteration);
  const MatrixXd current = stacked_iterate(states[static_cast<std::size_t>(q)], stacked.layout);
  std::optional<MatrixXd> warm;
  if (opts.warm_start) warm = current;

  LocalSolution sol;
  try {
    sol = solve_local(stacked, opts.components, opts.contrast, solver, warm);
  } catch (const Error& e) {
    throw Error(e.kind(), "iteration " + std::to_string(iteration) + ", updating node " + std::to_string(q) +
                          ": local solve failed (" + e.what() + ")");
  }

  if (opts.sign_policy == SignPolicy::PreviousIterate) {
    align_signs(sol, current);
    sol.partition = partition_solution(sol.ica.demixing_raw, stacked.layout);
  }

  rec.stacked_filter = sol.ica.demixing_raw;
  rec.source_estimates = stacked.data * rec.stacked_filter;
  rec.objective = ica_objective(rec.stacked_filter, stacked.data, opts.contrast, opts.solver.center);
  rec.local_converged = sol.ica.all_converged();
  for (int it : sol.ica.iterations) rec.local_inner_iterations += it;

  auto next = apply_update(states, sol.partition, tree, rec.tally);
  rec.filter = global_filter(next);
  return {std::move(next), std::move(rec)};
}

DistricaEngine::DistricaEngine(NetworkGraph graph, EngineOptions opts, BatchProvider provider,
                               std::uint64_t init_seed)
    : DistricaEngine(graph, opts, std::move(provider), random_states(graph, opts.components, init_seed)) {}

DistricaEngine::DistricaEngine(NetworkGraph graph, EngineOptions opts, BatchProvider provider,
                               std::vector<NodeState> initial)
    : graph_(std::move(graph)), opts_(opts), provider_(std::move(provider)), states_(std::move(initial)) {
  graph_.validate();
  require(opts_.reuse >= 1, ErrorKind::InvalidInput, "batch reuse count must be >= 1");
  require(static_cast<int>(states_.size()) == graph_.nodes(), ErrorKind::InvalidInput,
          "one initial state per node required");
}

IterationRecord DistricaEngine::step() {
  if (batch_index() != cached_index_) {
    cached_batch_ = provider_(batch_index());
    cached_index_ = batch_index();
  }
  auto [next, rec] = districa_iteration(graph_, states_, cached_batch_, iteration_, opts_);
  states_ = std::move(next);
  ++iteration_;
  return rec;
}

}  // namespace districa
