#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hypalign/geometry.hpp"
#include "hypalign/graph.hpp"
#include "hypalign/mixture.hpp"

namespace hypalign {

enum class Side : std::uint8_t { Source = 0, Target = 1 };

inline int side_index(Side s) { return static_cast<int>(s); }
inline Side other(Side s) { return s == Side::Source ? Side::Target : Side::Source; }
inline const char* side_name(Side s) { return s == Side::Source ? "source" : "target"; }

/// Embeddings of one network: user (theta) and context (theta') points stored
/// one per column, plus its community model.
struct NetworkEmbedding {
  Eigen::MatrixXd theta;    // d x N
  Eigen::MatrixXd context;  // d x N
  CommunityModel community;
  std::vector<std::string> tokens;
  std::vector<std::uint32_t> degrees;
};

struct JointModel {
  int dim = 0;
  double alpha1 = 0.1;
  double alpha2 = 1.0;
  std::array<NetworkEmbedding, 2> nets;
  // Effective training options, echoed into checkpoints and reports.
  std::vector<std::pair<std::string, std::string>> config;

  NetworkEmbedding& net(Side s) { return nets[static_cast<std::size_t>(side_index(s))]; }
  const NetworkEmbedding& net(Side s) const { return nets[static_cast<std::size_t>(side_index(s))]; }
};

/// Training-anchor lookup: partner[side][i] is the counterpart index on the
/// other side, or -1.
struct AnchorIndex {
  std::array<std::vector<std::int64_t>, 2> partner;

  AnchorIndex() = default;
  AnchorIndex(std::size_t n_source, std::size_t n_target, std::span<const AnchorLink> anchors);
  std::int64_t of(Side s, NodeIndex i) const {
    return partner[static_cast<std::size_t>(side_index(s))][i];
  }
};

/// The skip-gram terms of J1 with their negatives frozen: term t is
/// (side, center, context, negatives[t*k .. t*k+k)). All nodes of a term
/// live on `side`.
struct TermSet {
  int k = 0;
  std::vector<Side> side;
  std::vector<NodeIndex> center;
  std::vector<NodeIndex> context;
  std::vector<NodeIndex> negatives;

  std::size_t size() const { return center.size(); }
  std::span<const NodeIndex> negatives_of(std::size_t t) const {
    return {negatives.data() + t * static_cast<std::size_t>(k), static_cast<std::size_t>(k)};
  }
  void add(Side s, NodeIndex c, NodeIndex ctx, std::span<const NodeIndex> negs);
};

double log_sigmoid(double x);
double sigmoid(double x);

/// -log sigma(-d(positive, center)) - sum_n log sigma(d(negative_n, center)).
/// `negatives` holds one point per column.
double pair_loss(VecRef center, VecRef positive, const Eigen::MatrixXd& negatives);

/// J1 = sum_t l(theta_c; theta'_ctx, negs)
///    + alpha2 sum_t [center anchored] l(theta_partner; theta'_ctx, negs)
///    + alpha1 sum_x community_nll_upper(theta^x, Z^x, psi^x).
double objective(const JointModel& model, const TermSet& terms, const AnchorIndex& anchors);

/// Euclidean gradients of J1 for every embedding, in the model's layout.
struct ObjectiveGradient {
  std::array<Eigen::MatrixXd, 2> theta;
  std::array<Eigen::MatrixXd, 2> context;
  std::size_t skipped = 0;  // term distances dropped at coincident points
};
ObjectiveGradient objective_gradient(const JointModel& model, const TermSet& terms,
                                     const AnchorIndex& anchors);

/// d J1 / d theta^side_i: skip-gram, alpha1 community and alpha2 alignment parts.
Vec grad_user(const JointModel& model, Side side, NodeIndex i, const TermSet& terms,
              const AnchorIndex& anchors, std::size_t* skipped = nullptr);
/// d J1 / d theta'^side_j. Communities do not touch context embeddings.
Vec grad_context(const JointModel& model, Side side, NodeIndex j, const TermSet& terms,
                 const AnchorIndex& anchors, std::size_t* skipped = nullptr);

/// Community part only: alpha1 * sum_p Z_ip * (-grad log Pr(theta_i; psi_p)).
Vec community_grad(const JointModel& model, Side side, NodeIndex i);

/// exp_x(-rho * riemannian_rescale(x, g)).
Vec rsgd_step(VecRef x, VecRef g, double rho);

}  // namespace hypalign
