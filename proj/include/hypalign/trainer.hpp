#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hypalign/graph.hpp"
#include "hypalign/mixture.hpp"
#include "hypalign/objective.hpp"

namespace hypalign {

struct TrainConfig {
  int dim = 10;
  int negatives = 5;         // K
  int walks_per_node = 10;   // h
  int walk_length = 40;      // l
  int window = 5;
  double neg_exponent = 0.75;
  double alpha1 = 0.1;
  double alpha2 = 1.0;
  double rho = 0.05;
  double rho_decay = 0.01;
  int warmup_epochs = 10;
  int burnin_epochs = 5;     // leading warm-up epochs run at rho / 10
  int outer_iters = 10;
  int em_iters_per_outer = 5;
  int sgd_epochs_per_outer = 2;
  // Longest hyperbolic move of one community-gradient step. The fitted
  // scatter matrices can be stiff enough for a plain step to overshoot.
  double community_step_cap = 0.1;
  // Ridge added to every M-step scatter matrix during training.
  double scatter_floor = 1e-3;
  double init_scatter = 0.1;  // initial and reset scatter, times I
  double tolerance = 1e-4;   // relative J1 change that ends the outer loop
  std::size_t eval_terms = 20000;
  double init_radius = 1e-3;
  std::uint64_t seed = 1;
  bool deterministic = true;
  int threads = 1;
  bool full_batch = false;
  double r = 1.0;
  double omega = 1.0;
  int communities_source = 0;  // 0: label count when labeled, else 2
  int communities_target = 0;
  EStepMode estep = EStepMode::OmegaOnly;
  double tau = 0.6;

  /// Throws UsageError naming the first invalid field.
  void validate() const;
};

/// J1 recorded on the fixed evaluation terms.
struct TrainCheckpoint {
  std::string stage;  // "warmup", "outer", "final"
  int outer = 0;
  int epoch = 0;      // epochs completed so far
  double objective = 0.0;
  int resets = 0;     // mixture components re-initialized since the last checkpoint
  std::size_t skipped = 0;
  double seconds = 0.0;
};

struct TrainResult {
  JointModel model;
  std::vector<TrainCheckpoint> history;
  bool converged = false;
};

using TrainLog = std::function<void(const std::string&)>;

/// Skip-gram warm-up, then alternating EM over both mixtures and Riemannian
/// SGD epochs over the embeddings until the relative change of J1 falls below
/// the tolerance or outer_iters is reached.
TrainResult train(const NetworkPair& pair, const TrainConfig& cfg, const TrainLog& log = {});

/// Every skip-gram occurrence of both corpora (negatives not yet drawn).
TermSet build_pairs(const NetworkPair& pair, const TrainConfig& cfg);

/// Fixed-seed subset of `pairs` (at most cfg.eval_terms) with frozen negatives.
TermSet build_eval_terms(const NetworkPair& pair, const TermSet& pairs, const TrainConfig& cfg);

/// Fresh model: embeddings uniform in a ball of radius cfg.init_radius, no
/// communities yet.
JointModel init_model(const NetworkPair& pair, const TrainConfig& cfg);

std::string format_checkpoint(const TrainCheckpoint& c);

}  // namespace hypalign
