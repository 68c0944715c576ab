#include "hypalign/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <thread>

#include "hypalign/config.hpp"
#include "hypalign/corpus.hpp"
#include "hypalign/error.hpp"

namespace hypalign {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw UsageError(std::string("invalid training option: ") + what);
  };
  require(dim >= 1 && dim <= kMaxDim, "dim must be in [1, 128]");
  require(negatives >= 1, "negatives must be >= 1");
  require(walks_per_node >= 1, "walks_per_node must be >= 1");
  require(walk_length >= 2, "walk_length must be >= 2");
  require(window >= 1, "window must be >= 1");
  require(neg_exponent > 0.0, "neg_exponent must be > 0");
  require(alpha1 >= 0.0 && alpha2 >= 0.0, "alpha1 and alpha2 must be >= 0");
  require(rho > 0.0, "rho must be > 0");
  require(rho_decay >= 0.0, "rho_decay must be >= 0");
  require(warmup_epochs >= 0 && burnin_epochs >= 0, "epoch counts must be >= 0");
  require(outer_iters >= 0 && em_iters_per_outer >= 0 && sgd_epochs_per_outer >= 0,
          "iteration counts must be >= 0");
  require(tolerance >= 0.0, "tolerance must be >= 0");
  require(community_step_cap > 0.0, "community_step_cap must be > 0");
  require(scatter_floor >= 0.0, "scatter_floor must be >= 0");
  require(init_scatter > 0.0, "init_scatter must be > 0");
  require(eval_terms >= 1, "eval_terms must be >= 1");
  require(init_radius > 0.0 && init_radius < 0.5, "init_radius must be in (0, 0.5)");
  require(threads >= 1, "threads must be >= 1");
  require(omega > 0.0, "omega must be > 0");
  require(communities_source >= 0 && communities_target >= 0, "community counts must be >= 0");
  require(tau >= 0.0 && tau <= 1.0, "tau must be in [0, 1]");
}

namespace {

constexpr Side kSides[2] = {Side::Source, Side::Target};

const Network& network(const NetworkPair& pair, Side s) {
  return s == Side::Source ? pair.source : pair.target;
}

int community_count(const Network& net, int requested) {
  if (requested > 0) return requested;
  return net.has_labels() ? net.community_count() : 2;
}

// Hogwild access: plain loads/stores in single-worker mode, relaxed atomics
// per coordinate otherwise.
template <bool Atomic>
void load(const Eigen::MatrixXd& m, Eigen::Index col, Vec& out) {
  const auto d = m.rows();
  out.resize(d);
  const double* p = m.data() + col * d;
  for (Eigen::Index i = 0; i < d; ++i) {
    if constexpr (Atomic) {
      out[i] = std::atomic_ref<double>(const_cast<double&>(p[i])).load(std::memory_order_relaxed);
    } else {
      out[i] = p[i];
    }
  }
}

template <bool Atomic>
void store(Eigen::MatrixXd& m, Eigen::Index col, const Vec& v) {
  const auto d = m.rows();
  double* p = m.data() + col * d;
  for (Eigen::Index i = 0; i < d; ++i) {
    if constexpr (Atomic) {
      std::atomic_ref<double>(p[i]).store(v[i], std::memory_order_relaxed);
    } else {
      p[i] = v[i];
    }
  }
}

struct Worker {
  Vec center, partner, positive;
  std::vector<Vec> neg;
  Vec g_center, g_partner, g_positive;
  std::vector<Vec> g_neg;
  std::vector<NodeIndex> neg_idx;
  DistanceGrad dg;
  std::size_t skipped = 0;

  // Adds w * d l(c; positive, negatives) to the context gradients and writes
  // the (unscaled by w) center gradient into g_c.
  void term(const Vec& c, double w, Vec& g_c) {
    g_c.setZero(c.size());
    if (distance_with_grads(positive, c, dg)) {
      const double s = 1.0 / (1.0 + std::exp(-dg.value));
      g_c += s * dg.grad_y;
      g_positive += (w * s) * dg.grad_x;
    } else {
      ++skipped;
    }
    for (std::size_t n = 0; n < neg.size(); ++n) {
      if (distance_with_grads(neg[n], c, dg)) {
        const double s = -1.0 / (1.0 + std::exp(dg.value));
        g_c += s * dg.grad_y;
        g_neg[n] += (w * s) * dg.grad_x;
      } else {
        ++skipped;
      }
    }
  }

  template <bool Atomic>
  void run(JointModel& model, const TermSet& pairs, std::span<const std::uint32_t> order,
           const std::array<std::unique_ptr<NegativeSampler>, 2>& samplers,
           const AnchorIndex* anchors, int k, double rho, Rng& rng) {
    neg.resize(static_cast<std::size_t>(k));
    g_neg.resize(static_cast<std::size_t>(k));
    const int d = model.dim;
    for (std::uint32_t t : order) {
      const Side side = pairs.side[t];
      const int s = side_index(side);
      NetworkEmbedding& net = model.nets[static_cast<std::size_t>(s)];
      const NodeIndex c = pairs.center[t];
      const NodeIndex j = pairs.context[t];
      samplers[static_cast<std::size_t>(s)]->sample(c, k, rng, neg_idx);

      load<Atomic>(net.theta, c, center);
      load<Atomic>(net.context, j, positive);
      g_positive.setZero(d);
      for (int n = 0; n < k; ++n) {
        load<Atomic>(net.context, neg_idx[static_cast<std::size_t>(n)], neg[static_cast<std::size_t>(n)]);
        g_neg[static_cast<std::size_t>(n)].setZero(d);
      }
      term(center, 1.0, g_center);
      std::int64_t partner_idx = anchors != nullptr ? anchors->of(side, c) : -1;
      NetworkEmbedding& other_net = model.nets[static_cast<std::size_t>(1 - s)];
      if (partner_idx >= 0) {
        load<Atomic>(other_net.theta, partner_idx, partner);
        term(partner, model.alpha2, g_partner);
      }

      store<Atomic>(net.theta, c, rsgd_step(center, g_center, rho));
      if (partner_idx >= 0) {
        store<Atomic>(other_net.theta, partner_idx, rsgd_step(partner, model.alpha2 * g_partner, rho));
      }
      store<Atomic>(net.context, j, rsgd_step(positive, g_positive, rho));
      for (int n = 0; n < k; ++n) {
        const auto nn = static_cast<std::size_t>(n);
        store<Atomic>(net.context, neg_idx[nn], rsgd_step(neg[nn], g_neg[nn], rho));
      }
    }
  }
};

struct Session {
  const NetworkPair& pair;
  const TrainConfig& cfg;
  JointModel& model;
  const TermSet& pairs;
  const TermSet& eval;
  AnchorIndex anchors;
  std::array<std::unique_ptr<NegativeSampler>, 2> samplers;
  int epoch = 0;
  std::size_t skipped = 0;

  double step_size(double scale) const {
    return scale * cfg.rho / (1.0 + cfg.rho_decay * static_cast<double>(epoch));
  }

  void community_pass(double rho) {
    if (model.alpha1 <= 0.0) return;
    for (Side side : kSides) {
      NetworkEmbedding& net = model.net(side);
      if (net.community.size() == 0) continue;
      const auto n = static_cast<NodeIndex>(net.theta.cols());
      // Gradients from one snapshot, then one step per user.
      Eigen::MatrixXd grads(model.dim, n);
      for (NodeIndex i = 0; i < n; ++i) grads.col(i) = community_grad(model, side, i);
      for (NodeIndex i = 0; i < n; ++i) {
        Vec step = -rho * riemannian_rescale(net.theta.col(i), grads.col(i));
        const double length = conformal_factor(net.theta.col(i)) * step.norm();
        if (length > cfg.community_step_cap) step *= cfg.community_step_cap / length;
        net.theta.col(i) = exp_map(net.theta.col(i), step);
      }
    }
  }

  void stochastic_epoch(double rho, bool warm) {
    Rng rng = make_rng(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch));
    std::vector<std::uint32_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    shuffle(order, rng);
    const AnchorIndex* align = (!warm && model.alpha2 > 0.0) ? &anchors : nullptr;
    const int workers = cfg.deterministic ? 1 : cfg.threads;
    if (workers == 1) {
      Worker w;
      w.run<false>(model, pairs, order, samplers, align, cfg.negatives, rho, rng);
      skipped += w.skipped;
    } else {
      std::vector<Worker> ws(static_cast<std::size_t>(workers));
      std::vector<std::thread> threads;
      const std::size_t n = order.size();
      for (int t = 0; t < workers; ++t) {
        const std::size_t lo = n * static_cast<std::size_t>(t) / static_cast<std::size_t>(workers);
        const std::size_t hi = n * static_cast<std::size_t>(t + 1) / static_cast<std::size_t>(workers);
        threads.emplace_back([&, t, lo, hi] {
          Rng local = make_rng(mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch)),
                               static_cast<std::uint64_t>(t));
          ws[static_cast<std::size_t>(t)].run<true>(model, pairs,
                                                    std::span<const std::uint32_t>(order).subspan(lo, hi - lo),
                                                    samplers, align, cfg.negatives, rho, local);
        });
      }
      for (auto& th : threads) th.join();
      for (const auto& w : ws) skipped += w.skipped;
    }
    if (!warm) community_pass(rho);
  }

  void full_batch_epoch(double rho, bool warm) {
    const double a1 = model.alpha1;
    const double a2 = model.alpha2;
    if (warm) model.alpha1 = model.alpha2 = 0.0;
    const ObjectiveGradient g = objective_gradient(model, eval, anchors);
    model.alpha1 = a1;
    model.alpha2 = a2;
    skipped += g.skipped;
    for (int s = 0; s < 2; ++s) {
      NetworkEmbedding& net = model.nets[static_cast<std::size_t>(s)];
      for (Eigen::Index i = 0; i < net.theta.cols(); ++i) {
        net.theta.col(i) = rsgd_step(net.theta.col(i), g.theta[static_cast<std::size_t>(s)].col(i), rho);
        net.context.col(i) = rsgd_step(net.context.col(i), g.context[static_cast<std::size_t>(s)].col(i), rho);
      }
    }
  }

  void run_epoch(double scale, bool warm) {
    const double rho = step_size(scale);
    if (cfg.full_batch) {
      full_batch_epoch(rho, warm);
    } else {
      stochastic_epoch(rho, warm);
    }
    ++epoch;
  }
};

Eigen::MatrixXd random_points(int d, std::size_t n, double radius, Rng& rng) {
  Eigen::MatrixXd m(d, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    Vec v(d);
    for (int k = 0; k < d; ++k) v[k] = standard_normal(rng);
    const double norm = v.norm();
    const double r = radius * std::pow(uniform01(rng), 1.0 / d);
    m.col(static_cast<Eigen::Index>(i)) = norm > 0.0 ? Vec((r / norm) * v) : Vec(Vec::Zero(d));
  }
  return m;
}

}  // namespace

TermSet build_pairs(const NetworkPair& pair, const TrainConfig& cfg) {
  TermSet out;
  out.k = 0;
  for (Side side : kSides) {
    const WalkCorpus corpus = random_walks(network(pair, side), cfg.walks_per_node, cfg.walk_length,
                                           mix_seed(cfg.seed, 10 + static_cast<std::uint64_t>(side_index(side))));
    for (const ContextPair& cp : context_pairs(corpus, cfg.window)) {
      out.side.push_back(side);
      out.center.push_back(cp.center);
      out.context.push_back(cp.context);
    }
  }
  if (out.size() > UINT32_MAX) throw UsageError("too many skip-gram pairs");
  return out;
}

TermSet build_eval_terms(const NetworkPair& pair, const TermSet& pairs, const TrainConfig& cfg) {
  Rng rng = make_rng(cfg.seed, 20);
  std::vector<std::size_t> pick(pairs.size());
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  if (pick.size() > cfg.eval_terms) {
    // Partial Fisher-Yates: the first eval_terms entries form the sample.
    for (std::size_t i = 0; i < cfg.eval_terms; ++i) {
      const std::size_t j = i + uniform_index(rng, pick.size() - i);
      std::swap(pick[i], pick[j]);
    }
    pick.resize(cfg.eval_terms);
    std::sort(pick.begin(), pick.end());
  }
  const NegativeSampler samplers[2] = {NegativeSampler(pair.source, cfg.neg_exponent),
                                       NegativeSampler(pair.target, cfg.neg_exponent)};
  TermSet out;
  out.k = cfg.negatives;
  std::vector<NodeIndex> negs;
  for (std::size_t t : pick) {
    const Side s = pairs.side[t];
    samplers[side_index(s)].sample(pairs.center[t], cfg.negatives, rng, negs);
    out.add(s, pairs.center[t], pairs.context[t], negs);
  }
  return out;
}

JointModel init_model(const NetworkPair& pair, const TrainConfig& cfg) {
  JointModel model;
  model.dim = cfg.dim;
  model.alpha1 = cfg.alpha1;
  model.alpha2 = cfg.alpha2;
  Rng rng = make_rng(cfg.seed, 3);
  for (Side side : kSides) {
    const Network& net = network(pair, side);
    NetworkEmbedding& emb = model.net(side);
    emb.theta = random_points(cfg.dim, net.size(), cfg.init_radius, rng);
    emb.context = random_points(cfg.dim, net.size(), cfg.init_radius, rng);
    emb.tokens = net.tokens();
    emb.degrees.resize(net.size());
    for (NodeIndex i = 0; i < net.size(); ++i) emb.degrees[i] = static_cast<std::uint32_t>(net.degree(i));
  }
  return model;
}

std::string format_checkpoint(const TrainCheckpoint& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s\touter=%d\tepoch=%d\tJ1=%.10g\tresets=%d\tskipped=%zu\ttime=%.3fs",
                c.stage.c_str(), c.outer, c.epoch, c.objective, c.resets, c.skipped, c.seconds);
  return buf;
}

TrainResult train(const NetworkPair& pair, const TrainConfig& cfg, const TrainLog& log) {
  cfg.validate();
  pair.validate();
  if (cfg.alpha2 > 0.0 && pair.anchors_train.empty()) {
    throw UsageError("alpha2 > 0 needs at least one training anchor");
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  TrainResult result;
  result.model = init_model(pair, cfg);
  result.model.config = describe(cfg);
  JointModel& model = result.model;
  const TermSet pairs = build_pairs(pair, cfg);
  const TermSet eval = build_eval_terms(pair, pairs, cfg);

  Session session{pair, cfg, model, pairs, eval,
                  AnchorIndex(pair.source.size(), pair.target.size(), pair.anchors_train), {}};
  for (Side side : kSides) {
    session.samplers[static_cast<std::size_t>(side_index(side))] =
        std::make_unique<NegativeSampler>(network(pair, side), cfg.neg_exponent);
  }

  int resets = 0;
  auto checkpoint = [&](const char* stage, int outer) {
    TrainCheckpoint c{stage, outer, session.epoch, objective(model, eval, session.anchors), resets,
                      session.skipped, elapsed()};
    resets = 0;
    session.skipped = 0;
    if (!std::isfinite(c.objective)) throw NumericalError("objective became non-finite");
    result.history.push_back(c);
    if (log) log(format_checkpoint(c));
    return c.objective;
  };

  // Line 2: skip-gram only.
  for (int e = 0; e < cfg.warmup_epochs; ++e) session.run_epoch(e < cfg.burnin_epochs ? 0.1 : 1.0, true);

  Rng em_rng = make_rng(cfg.seed, 4);
  for (Side side : kSides) {
    MixtureOptions opts;
    opts.components = community_count(network(pair, side),
                                      side == Side::Source ? cfg.communities_source : cfg.communities_target);
    opts.r = cfg.r;
    opts.omega = cfg.omega;
    opts.mode = cfg.estep;
    opts.init_scatter = cfg.init_scatter;
    model.net(side).community = CommunityModel::initialize(model.net(side).theta, opts, em_rng);
  }
  double previous = checkpoint("warmup", 0);

  for (int outer = 1; outer <= cfg.outer_iters; ++outer) {
    if (cfg.alpha1 > 0.0) {
      for (Side side : kSides) {
        NetworkEmbedding& net = model.net(side);
        resets += net.community.fit(net.theta, cfg.em_iters_per_outer, cfg.estep, em_rng, cfg.init_scatter, cfg.scatter_floor);
      }
    }
    for (int e = 0; e < cfg.sgd_epochs_per_outer; ++e) session.run_epoch(1.0, false);
    const double current = checkpoint("outer", outer);
    const double change = std::abs(current - previous) / std::max(std::abs(previous), 1e-300);
    previous = current;
    if (change < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }

  // Leave the mixtures fitted to the final embeddings.
  if (cfg.alpha1 > 0.0 && cfg.em_iters_per_outer > 0) {
    for (Side side : kSides) {
      NetworkEmbedding& net = model.net(side);
      resets += net.community.fit(net.theta, cfg.em_iters_per_outer, cfg.estep, em_rng, cfg.init_scatter, cfg.scatter_floor);
    }
    checkpoint("final", static_cast<int>(result.history.size()) - 1);
  }
  return result;
}

}  // namespace hypalign
