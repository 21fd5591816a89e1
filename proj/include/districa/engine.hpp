#ifndef DISTRICA_ENGINE_HPP
#define DISTRICA_ENGINE_HPP

// Distributed ICA over a sensor network. Each iteration one node q receives
// the Q-channel compressed signals fused along a tree rooted at q, solves a
// local FastICA problem on [y_q, ŷ_{n→q}...], and sends one Q×Q gain per
// branch back out. The network-wide filter is never assembled in the network.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "districa/fastica.hpp"
#include "districa/network.hpp"

namespace districa {

struct NodeState {
  NodeId node = 0;
  MatrixXd filter;  // X_k, M_k×Q

  Index channels() const { return filter.rows(); }
};

struct CommTally {
  long long scalars_fused = 0;
  long long scalars_disseminated = 0;
  std::vector<long long> per_node_sent;  // indexed by node id, both flows

  explicit CommTally(int nodes = 0) : per_node_sent(static_cast<std::size_t>(nodes), 0) {}

  void charge_fused(NodeId sender, long long scalars);
  void charge_disseminated(NodeId sender, long long scalars);
};

/// Inward message of the fuse-and-forward flow, immutable once sent.
struct FusedMessage {
  NodeId from = 0;
  NodeId to = 0;
  MatrixXd payload;  // N×Q
};

/// Local data at the updating node. Layout: (q, M_q), then (n, Q) for each
/// root neighbour in ascending id order.
struct StackedLocalBatch {
  MatrixXd data;
  ChannelLayout layout;

  Index channels() const { return data.cols(); }
};

struct SolutionPartition {
  MatrixXd own;                        // X_q^{i+1}
  std::map<NodeId, MatrixXd> gains;    // G_n^{i+1}
};

struct LocalSolution {
  IcaResult<double> ica;  // demixing_raw is X̃_q*
  SolutionPartition partition;
};

/// ŷ_k = X_kᵀ y_k for every sample (rows of `local`).
MatrixXd compress(const NodeState& state, const MatrixXd& local);

/// Leaf-to-root fusion: each non-root node forwards its own compressed signal
/// plus everything received from its children. Returns, per root neighbour n,
/// Σ_{k∈B_nq} ŷ_k. Charges one N×Q message per non-root node.
std::map<NodeId, MatrixXd> fuse_forward(const TreeTopology& tree, const std::vector<MatrixXd>& compressed,
                                        CommTally& tally);

StackedLocalBatch stack_local(NodeId root, const MatrixXd& own, const std::map<NodeId, MatrixXd>& fused);

/// Splits X̃ row-wise along the stacked layout.
SolutionPartition partition_solution(const MatrixXd& stacked_filter, const ChannelLayout& layout);

/// FastICA on the stacked data followed by the partition. `warm_start`
/// optionally seeds the solver with a stacked-domain filter.
LocalSolution solve_local(const StackedLocalBatch& stacked, Index components, const ContrastFunction& contrast,
                          const SolverOptions& opts, const std::optional<MatrixXd>& warm_start = std::nullopt);

/// X_q ← X_q^{i+1}; X_k ← X_k·G_n for k ∈ B_nq. Charges |B_nq|·Q² per branch.
std::vector<NodeState> apply_update(const std::vector<NodeState>& states, const SolutionPartition& partition,
                                    const TreeTopology& tree, CommTally& tally);

/// Vertical stack of the node blocks in node-id order.
MatrixXd global_filter(const std::vector<NodeState>& states);

/// X⁰ with i.i.d. standard normal entries.
std::vector<NodeState> random_states(const NetworkGraph& graph, Index components, std::uint64_t seed);

enum class SignPolicy {
  LargestEntry,     // keep the solver's rule: largest |entry| of each X̃ column positive
  PreviousIterate,  // flip X̃ columns whose outputs anti-correlate with the current iterate's outputs
};

struct EngineOptions {
  Index components = 2;
  ContrastFunction contrast{};
  SolverOptions solver{};
  int reuse = 1;             // consecutive iterations that share one batch
  bool warm_start = true;    // start the local solve from the current iterate
  SignPolicy sign_policy = SignPolicy::PreviousIterate;
};

/// Network-wide N×M batch for a batch index (columns in node order).
using BatchProvider = std::function<MatrixXd(long batch_index)>;

struct IterationRecord {
  long iteration = 0;
  NodeId updating_node = 0;
  MatrixXd filter;            // X^{i+1}
  MatrixXd stacked_filter;    // X̃_q*
  MatrixXd source_estimates;  // X̃_q*ᵀ ỹ_q, N×Q
  double objective = 0.0;     // Σ_m mean F(x̃_mᵀ ỹ_q)
  CommTally tally;
  bool local_converged = false;
  int local_inner_iterations = 0;
};

/// One full iteration: prune, compress, fuse, solve at q = i mod K, update.
/// `network_batch` is the N×M batch the nodes observe this iteration.
std::pair<std::vector<NodeState>, IterationRecord> districa_iteration(const NetworkGraph& graph,
                                                                      const std::vector<NodeState>& states,
                                                                      const MatrixXd& network_batch, long iteration,
                                                                      const EngineOptions& opts);

/// Owns the per-run state and the batch reuse schedule.
class DistricaEngine {
 public:
  DistricaEngine(NetworkGraph graph, EngineOptions opts, BatchProvider provider, std::uint64_t init_seed);
  DistricaEngine(NetworkGraph graph, EngineOptions opts, BatchProvider provider, std::vector<NodeState> initial);

  IterationRecord step();

  long iteration() const { return iteration_; }
  long batch_index() const { return iteration_ / opts_.reuse; }
  const std::vector<NodeState>& states() const { return states_; }
  MatrixXd filter() const { return global_filter(states_); }
  const NetworkGraph& graph() const { return graph_; }

 private:
  NetworkGraph graph_;
  EngineOptions opts_;
  BatchProvider provider_;
  std::vector<NodeState> states_;
  long iteration_ = 0;
  long cached_index_ = -1;
  MatrixXd cached_batch_;
};

}  // namespace districa

#endif  // DISTRICA_ENGINE_HPP
