#include "hypalign/objective.hpp"

#include <cmath>

#include "hypalign/error.hpp"

namespace hypalign {

AnchorIndex::AnchorIndex(std::size_t n_source, std::size_t n_target,
                         std::span<const AnchorLink> anchors) {
  partner[0].assign(n_source, -1);
  partner[1].assign(n_target, -1);
  for (const AnchorLink& a : anchors) {
    if (a.source >= n_source || a.target >= n_target) throw DataError("anchor index out of range");
    partner[0][a.source] = a.target;
    partner[1][a.target] = a.source;
  }
}

void TermSet::add(Side s, NodeIndex c, NodeIndex ctx, std::span<const NodeIndex> negs) {
  if (static_cast<int>(negs.size()) != k) throw UsageError("term has the wrong negative count");
  side.push_back(s);
  center.push_back(c);
  context.push_back(ctx);
  negatives.insert(negatives.end(), negs.begin(), negs.end());
}

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double pair_loss(VecRef center, VecRef positive, const Eigen::MatrixXd& negatives) {
  double loss = -log_sigmoid(-distance(positive, center));
  for (Eigen::Index n = 0; n < negatives.cols(); ++n) {
    loss -= log_sigmoid(distance(negatives.col(n), center));
  }
  return loss;
}

namespace {

// Loss of one term for `center` against contexts of `ctx` and, when `grads`
// is given, the gradients w.r.t. the center, the positive and each negative.
struct TermScratch {
  DistanceGrad dg;
  Vec g_center;
  Vec g_positive;
  std::vector<Vec> g_neg;
  std::size_t skipped = 0;
};

double term_loss_grad(const Eigen::MatrixXd& ctx, VecRef center, NodeIndex positive,
                      std::span<const NodeIndex> negs, TermScratch* s) {
  if (s == nullptr) {
    double loss = -log_sigmoid(-distance(ctx.col(positive), center));
    for (NodeIndex n : negs) loss -= log_sigmoid(distance(ctx.col(n), center));
    return loss;
  }
  const auto d = center.size();
  s->g_center.setZero(d);
  s->g_neg.resize(negs.size());
  double loss = 0.0;
  if (distance_with_grads(ctx.col(positive), center, s->dg)) {
    const double w = sigmoid(s->dg.value);
    s->g_center = w * s->dg.grad_y;
    s->g_positive = w * s->dg.grad_x;
  } else {
    s->g_positive.setZero(d);
    ++s->skipped;
  }
  loss -= log_sigmoid(-s->dg.value);
  for (std::size_t n = 0; n < negs.size(); ++n) {
    if (distance_with_grads(ctx.col(negs[n]), center, s->dg)) {
      const double w = -sigmoid(-s->dg.value);
      s->g_center += w * s->dg.grad_y;
      s->g_neg[n] = w * s->dg.grad_x;
    } else {
      s->g_neg[n].setZero(d);
      ++s->skipped;
    }
    loss -= log_sigmoid(s->dg.value);
  }
  return loss;
}

bool has_communities(const JointModel& model, Side s) {
  return model.alpha1 > 0.0 && model.net(s).community.size() > 0;
}

}  // namespace

double objective(const JointModel& model, const TermSet& terms, const AnchorIndex& anchors) {
  double total = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const Side s = terms.side[t];
    const NetworkEmbedding& net = model.net(s);
    const auto negs = terms.negatives_of(t);
    total += term_loss_grad(net.context, net.theta.col(terms.center[t]), terms.context[t], negs, nullptr);
    if (model.alpha2 > 0.0) {
      const std::int64_t k = anchors.of(s, terms.center[t]);
      if (k >= 0) {
        total += model.alpha2 * term_loss_grad(net.context, model.net(other(s)).theta.col(k),
                                               terms.context[t], negs, nullptr);
      }
    }
  }
  for (Side s : {Side::Source, Side::Target}) {
    if (!has_communities(model, s)) continue;
    const NetworkEmbedding& net = model.net(s);
    total += model.alpha1 *
             community_nll_upper(net.theta, net.community.membership().z, net.community.components());
  }
  return total;
}

Vec community_grad(const JointModel& model, Side side, NodeIndex i) {
  Vec g = Vec::Zero(model.dim);
  if (!has_communities(model, side)) return g;
  const NetworkEmbedding& net = model.net(side);
  const Eigen::MatrixXd& z = net.community.membership().z;
  const auto& comps = net.community.components();
  for (std::size_t p = 0; p < comps.size(); ++p) {
    const double w = z(i, static_cast<Eigen::Index>(p));
    if (w > 0.0) g -= w * gh_logpdf_grad(net.theta.col(i), comps[p]);
  }
  return model.alpha1 * g;
}

ObjectiveGradient objective_gradient(const JointModel& model, const TermSet& terms,
                                     const AnchorIndex& anchors) {
  ObjectiveGradient out;
  for (int s = 0; s < 2; ++s) {
    out.theta[s] = Eigen::MatrixXd::Zero(model.dim, model.nets[s].theta.cols());
    out.context[s] = Eigen::MatrixXd::Zero(model.dim, model.nets[s].context.cols());
  }
  TermScratch scratch;
  auto scatter = [&](int s, std::size_t t, double w) {
    out.context[s].col(terms.context[t]) += w * scratch.g_positive;
    const auto negs = terms.negatives_of(t);
    for (std::size_t n = 0; n < negs.size(); ++n) out.context[s].col(negs[n]) += w * scratch.g_neg[n];
  };
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const Side side = terms.side[t];
    const int s = side_index(side);
    const NetworkEmbedding& net = model.net(side);
    const auto negs = terms.negatives_of(t);
    term_loss_grad(net.context, net.theta.col(terms.center[t]), terms.context[t], negs, &scratch);
    out.theta[s].col(terms.center[t]) += scratch.g_center;
    scatter(s, t, 1.0);
    if (model.alpha2 > 0.0) {
      const std::int64_t k = anchors.of(side, terms.center[t]);
      if (k >= 0) {
        term_loss_grad(net.context, model.net(other(side)).theta.col(k), terms.context[t], negs, &scratch);
        out.theta[1 - s].col(k) += model.alpha2 * scratch.g_center;
        scatter(s, t, model.alpha2);
      }
    }
  }
  for (Side side : {Side::Source, Side::Target}) {
    if (!has_communities(model, side)) continue;
    const auto n = static_cast<NodeIndex>(model.net(side).theta.cols());
    for (NodeIndex i = 0; i < n; ++i) out.theta[side_index(side)].col(i) += community_grad(model, side, i);
  }
  out.skipped = scratch.skipped;
  return out;
}

Vec grad_user(const JointModel& model, Side side, NodeIndex i, const TermSet& terms,
              const AnchorIndex& anchors, std::size_t* skipped) {
  Vec g = community_grad(model, side, i);
  TermScratch scratch;
  const NetworkEmbedding& own = model.net(side);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const Side ts = terms.side[t];
    const auto negs = terms.negatives_of(t);
    if (ts == side && terms.center[t] == i) {
      term_loss_grad(own.context, own.theta.col(i), terms.context[t], negs, &scratch);
      g += scratch.g_center;
    } else if (ts != side && model.alpha2 > 0.0 && anchors.of(ts, terms.center[t]) == i) {
      term_loss_grad(model.net(ts).context, own.theta.col(i), terms.context[t], negs, &scratch);
      g += model.alpha2 * scratch.g_center;
    }
  }
  if (skipped != nullptr) *skipped += scratch.skipped;
  return g;
}

Vec grad_context(const JointModel& model, Side side, NodeIndex j, const TermSet& terms,
                 const AnchorIndex& anchors, std::size_t* skipped) {
  Vec g = Vec::Zero(model.dim);
  TermScratch scratch;
  const NetworkEmbedding& own = model.net(side);
  auto collect = [&](std::size_t t, double w) {
    if (terms.context[t] == j) g += w * scratch.g_positive;
    const auto negs = terms.negatives_of(t);
    for (std::size_t n = 0; n < negs.size(); ++n) {
      if (negs[n] == j) g += w * scratch.g_neg[n];
    }
  };
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (terms.side[t] != side) continue;
    const auto negs = terms.negatives_of(t);
    bool touches = terms.context[t] == j;
    for (NodeIndex n : negs) touches = touches || n == j;
    if (!touches) continue;
    term_loss_grad(own.context, own.theta.col(terms.center[t]), terms.context[t], negs, &scratch);
    collect(t, 1.0);
    if (model.alpha2 > 0.0) {
      const std::int64_t k = anchors.of(side, terms.center[t]);
      if (k >= 0) {
        term_loss_grad(own.context, model.net(other(side)).theta.col(k), terms.context[t], negs, &scratch);
        collect(t, model.alpha2);
      }
    }
  }
  if (skipped != nullptr) *skipped += scratch.skipped;
  return g;
}

Vec rsgd_step(VecRef x, VecRef g, double rho) {
  const Vec step = -rho * riemannian_rescale(x, g);
  return exp_map(x, step);
}

}  // namespace hypalign
