#include "hypalign/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "hypalign/error.hpp"

namespace hypalign {

RankedCandidates rank_users(const JointModel& model, const std::vector<NodeIndex>& queries,
                            const std::vector<NodeIndex>& candidates) {
  if (candidates.empty()) throw UsageError("empty candidate set");
  const Eigen::MatrixXd& src = model.net(Side::Source).theta;
  const Eigen::MatrixXd& tgt = model.net(Side::Target).theta;
  RankedCandidates out;
  out.reserve(queries.size());
  for (NodeIndex q : queries) {
    if (q >= tgt.cols()) throw UsageError("query index out of range");
    Ranking r;
    r.query = q;
    r.candidates.reserve(candidates.size());
    for (NodeIndex c : candidates) {
      if (c >= src.cols()) throw UsageError("candidate index out of range");
      r.candidates.emplace_back(c, distance(src.col(c), tgt.col(q)));
    }
    std::sort(r.candidates.begin(), r.candidates.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::size_t> truth_ranks(const RankedCandidates& ranked, const std::vector<AnchorLink>& truth) {
  std::vector<std::size_t> ranks;
  ranks.reserve(truth.size());
  for (const AnchorLink& a : truth) {
    const auto it = std::find_if(ranked.begin(), ranked.end(), [&](const Ranking& r) { return r.query == a.target; });
    if (it == ranked.end()) throw UsageError("truth anchor query missing from the ranking");
    std::size_t rank = 0;
    for (std::size_t i = 0; i < it->candidates.size(); ++i) {
      if (it->candidates[i].first == a.source) {
        rank = i + 1;
        break;
      }
    }
    ranks.push_back(rank);
  }
  return ranks;
}

namespace {

template <class Score>
double mean_over_truth(const RankedCandidates& ranked, const std::vector<AnchorLink>& truth, int k, Score score) {
  if (k < 1) throw UsageError("k must be >= 1");
  if (truth.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t rank : truth_ranks(ranked, truth)) {
    if (rank >= 1 && rank <= static_cast<std::size_t>(k)) total += score(rank);
  }
  return total / static_cast<double>(truth.size());
}

}  // namespace

double precision_at_k(const RankedCandidates& ranked, const std::vector<AnchorLink>& truth, int k) {
  return mean_over_truth(ranked, truth, k, [](std::size_t) { return 1.0; });
}

double map_at_k(const RankedCandidates& ranked, const std::vector<AnchorLink>& truth, int k) {
  return mean_over_truth(ranked, truth, k, [](std::size_t rank) { return 1.0 / static_cast<double>(rank); });
}

std::vector<CommunityMatch> align_communities(const JointModel& model) {
  const auto& cs = model.net(Side::Source).community.components();
  const auto& ct = model.net(Side::Target).community.components();
  std::vector<CommunityMatch> all;
  for (std::size_t p = 0; p < cs.size(); ++p) {
    for (std::size_t q = 0; q < ct.size(); ++q) {
      all.push_back({static_cast<int>(p), static_cast<int>(q), distance(cs[p].mu(), ct[q].mu())});
    }
  }
  std::sort(all.begin(), all.end(), [](const CommunityMatch& a, const CommunityMatch& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  std::vector<bool> used_s(cs.size()), used_t(ct.size());
  std::vector<CommunityMatch> out;
  for (const CommunityMatch& m : all) {
    if (used_s[static_cast<std::size_t>(m.source)] || used_t[static_cast<std::size_t>(m.target)]) continue;
    used_s[static_cast<std::size_t>(m.source)] = used_t[static_cast<std::size_t>(m.target)] = true;
    out.push_back(m);
  }
  return out;
}

std::vector<std::pair<int, int>> anchor_communities(const NetworkPair& pair, double tau) {
  if (!pair.source.has_labels() || !pair.target.has_labels()) {
    throw DataError("anchor communities need labels on both networks");
  }
  std::vector<std::pair<int, int>> out;
  for (int p = 0; p < pair.source.community_count(); ++p) {
    if (pair.source.community_size(p) == 0) continue;
    for (int q = 0; q < pair.target.community_count(); ++q) {
      if (pair.target.community_size(q) == 0) continue;
      if (anchor_community_ratio(p, q, pair) >= tau) out.emplace_back(p, q);
    }
  }
  return out;
}

namespace {

// mass(l, p) = sum over users labeled l of Z_ip.
Eigen::MatrixXd label_mass(const JointModel& model, Side side, const Network& net) {
  const Eigen::MatrixXd& z = model.net(side).community.membership().z;
  if (z.rows() != static_cast<Eigen::Index>(net.size())) throw DataError("membership does not match the network");
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(net.community_count(), z.cols());
  for (NodeIndex i = 0; i < net.size(); ++i) {
    const int l = net.label(i);
    if (l >= 0) mass.row(l) += z.row(i);
  }
  return mass;
}

}  // namespace

std::vector<int> component_labels(const JointModel& model, Side side, const Network& net) {
  const Eigen::MatrixXd mass = label_mass(model, side, net);
  std::vector<int> out(static_cast<std::size_t>(mass.cols()), -1);
  if (mass.rows() == 0) return out;
  for (Eigen::Index p = 0; p < mass.cols(); ++p) {
    Eigen::Index best = 0;
    mass.col(p).maxCoeff(&best);
    out[static_cast<std::size_t>(p)] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> label_components(const JointModel& model, Side side, const Network& net) {
  const Eigen::MatrixXd mass = label_mass(model, side, net);
  std::vector<int> out(static_cast<std::size_t>(mass.rows()), -1);
  if (mass.cols() == 0) return out;
  for (Eigen::Index l = 0; l < mass.rows(); ++l) {
    if (mass.row(l).sum() <= 0.0) continue;
    Eigen::Index best = 0;
    mass.row(l).maxCoeff(&best);
    out[static_cast<std::size_t>(l)] = static_cast<int>(best);
  }
  return out;
}

double community_accuracy(const std::vector<CommunityMatch>& matches, const NetworkPair& pair,
                          const JointModel& model, double tau) {
  const auto truth = anchor_communities(pair, tau);
  if (truth.empty()) throw DataError("no ground-truth anchor communities at tau " + std::to_string(tau));
  const auto ls = component_labels(model, Side::Source, pair.source);
  const auto lt = component_labels(model, Side::Target, pair.target);
  std::size_t hits = 0;
  for (const auto& [a, b] : truth) {
    const bool found = std::any_of(matches.begin(), matches.end(), [&](const CommunityMatch& m) {
      return ls[static_cast<std::size_t>(m.source)] == a && lt[static_cast<std::size_t>(m.target)] == b;
    });
    if (found) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double quality_from_distances(const std::vector<double>& distances) {
  if (distances.empty()) throw DataError("quality needs at least one community pair");
  double total = 0.0;
  for (double d : distances) total += 2.0 * sigmoid(-d);
  return total / static_cast<double>(distances.size());
}

double quality(const NetworkPair& pair, const JointModel& model, double tau) {
  const auto truth = anchor_communities(pair, tau);
  if (truth.empty()) throw DataError("no ground-truth anchor communities at tau " + std::to_string(tau));
  const auto cs = label_components(model, Side::Source, pair.source);
  const auto ct = label_components(model, Side::Target, pair.target);
  const auto& ms = model.net(Side::Source).community.components();
  const auto& mt = model.net(Side::Target).community.components();
  std::vector<double> dists;
  for (const auto& [a, b] : truth) {
    const int p = cs[static_cast<std::size_t>(a)];
    const int q = ct[static_cast<std::size_t>(b)];
    if (p < 0 || q < 0) throw DataError("anchor community without a mixture component");
    dists.push_back(distance(ms[static_cast<std::size_t>(p)].mu(), mt[static_cast<std::size_t>(q)].mu()));
  }
  return quality_from_distances(dists);
}

void check_model_matches(const JointModel& model, const NetworkPair& pair) {
  auto check = [](const NetworkEmbedding& emb, const Network& net, const char* name) {
    if (emb.tokens != net.tokens()) {
      throw DataError(std::string("model was trained on a different ") + name + " network");
    }
  };
  check(model.net(Side::Source), pair.source, "source");
  check(model.net(Side::Target), pair.target, "target");
}

AlignmentReport evaluate(const JointModel& model, const NetworkPair& pair, double tau,
                         const std::vector<int>& ks) {
  check_model_matches(model, pair);
  if (ks.empty()) throw UsageError("need at least one k");
  if (pair.anchors_test.empty()) throw DataError("no test anchors to evaluate");
  AlignmentReport rep;
  rep.ks = ks;
  rep.tau = tau;
  rep.config = model.config;

  std::vector<bool> train_src(pair.source.size(), false);
  for (const AnchorLink& a : pair.anchors_train) train_src[a.source] = true;
  std::vector<NodeIndex> candidates, queries;
  for (NodeIndex i = 0; i < pair.source.size(); ++i) {
    if (!train_src[i]) candidates.push_back(i);
  }
  for (const AnchorLink& a : pair.anchors_test) queries.push_back(a.target);
  rep.ranked = rank_users(model, queries, candidates);
  rep.queries = queries.size();
  rep.candidates = candidates.size();
  for (int k : ks) {
    rep.precision[k] = precision_at_k(rep.ranked, pair.anchors_test, k);
    rep.map[k] = map_at_k(rep.ranked, pair.anchors_test, k);
  }

  rep.matches = align_communities(model);
  rep.source_tokens = pair.source.tokens();
  rep.target_tokens = pair.target.tokens();
  if (pair.source.has_labels() && pair.target.has_labels() && !rep.matches.empty()) {
    rep.source_component_labels = component_labels(model, Side::Source, pair.source);
    rep.target_component_labels = component_labels(model, Side::Target, pair.target);
    rep.source_label_names = pair.source.community_names();
    rep.target_label_names = pair.target.community_names();
    rep.truth_communities = anchor_communities(pair, tau);
    if (!rep.truth_communities.empty()) {
      rep.accuracy = community_accuracy(rep.matches, pair, model, tau);
      rep.quality = quality(pair, model, tau);
    }
  }
  return rep;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string label_of(const std::vector<int>& labels, const std::vector<std::string>& names, int comp) {
  if (labels.empty()) return "-";
  const int l = labels[static_cast<std::size_t>(comp)];
  return l >= 0 ? names[static_cast<std::size_t>(l)] : "-";
}

}  // namespace

std::string format_report_text(const AlignmentReport& r) {
  std::string out = "# alignment report\n";
  out += "version " HYPALIGN_VERSION "\n";
  out += "queries " + std::to_string(r.queries) + "\n";
  out += "candidates " + std::to_string(r.candidates) + "\n";
  out += "tau " + fmt(r.tau) + "\n";
  out += "\n[users]\nk\tprecision\tmap\trandom\n";
  for (int k : r.ks) {
    const double random = std::min(1.0, static_cast<double>(k) / static_cast<double>(r.candidates));
    out += std::to_string(k) + "\t" + fmt(r.precision.at(k)) + "\t" + fmt(r.map.at(k)) + "\t" + fmt(random) + "\n";
  }
  out += "\n[communities]\nsource\ttarget\tsource_label\ttarget_label\tdistance\n";
  for (const CommunityMatch& m : r.matches) {
    out += std::to_string(m.source) + "\t" + std::to_string(m.target) + "\t" +
           label_of(r.source_component_labels, r.source_label_names, m.source) + "\t" +
           label_of(r.target_component_labels, r.target_label_names, m.target) + "\t" + fmt(m.distance) + "\n";
  }
  out += "anchor_communities " + std::to_string(r.truth_communities.size()) + "\n";
  out += "accuracy " + (r.accuracy ? fmt(*r.accuracy) : std::string("n/a")) + "\n";
  out += "quality " + (r.quality ? fmt(*r.quality) : std::string("n/a")) + "\n";
  out += "\n[config]\n";
  for (const auto& [k, v] : r.config) out += k + " = " + v + "\n";
  return out;
}

std::string format_report_json(const AlignmentReport& r) {
  nlohmann::ordered_json j;
  j["version"] = HYPALIGN_VERSION;
  j["queries"] = r.queries;
  j["candidates"] = r.candidates;
  j["tau"] = r.tau;
  for (int k : r.ks) {
    j["precision_at_k"][std::to_string(k)] = r.precision.at(k);
    j["map_at_k"][std::to_string(k)] = r.map.at(k);
  }
  j["community_matches"] = nlohmann::json::array();
  for (const CommunityMatch& m : r.matches) {
    j["community_matches"].push_back({{"source", m.source}, {"target", m.target}, {"distance", m.distance}});
  }
  j["anchor_communities"] = nlohmann::json::array();
  for (const auto& [a, b] : r.truth_communities) {
    j["anchor_communities"].push_back({r.source_label_names[static_cast<std::size_t>(a)],
                                       r.target_label_names[static_cast<std::size_t>(b)]});
  }
  j["community_accuracy"] = r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr);
  j["quality"] = r.quality ? nlohmann::json(*r.quality) : nlohmann::json(nullptr);
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) j["config"][k] = v;
  return j.dump(2) + "\n";
}

std::string format_ranked(const AlignmentReport& r, std::size_t limit) {
  std::string out = "query\trank\tcandidate\tdistance\n";
  char buf[32];
  for (const Ranking& q : r.ranked) {
    const std::size_t n = limit == 0 ? q.candidates.size() : std::min(limit, q.candidates.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", q.candidates[i].second);
      out += r.target_tokens[q.query] + "\t" + std::to_string(i + 1) + "\t" +
             r.source_tokens[q.candidates[i].first] + "\t" + buf + "\n";
    }
  }
  return out;
}

}  // namespace hypalign
