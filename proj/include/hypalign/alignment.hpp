#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypalign/graph.hpp"
#include "hypalign/objective.hpp"

namespace hypalign {

/// Candidates of one target-side query, nearest first (ties: lower index).
struct Ranking {
  NodeIndex query = 0;
  std::vector<std::pair<NodeIndex, double>> candidates;
};
using RankedCandidates = std::vector<Ranking>;

/// Ranks source-side `candidates` for each target-side query by hyperbolic
/// distance between user embeddings.
RankedCandidates rank_users(const JointModel& model, const std::vector<NodeIndex>& queries,
                            const std::vector<NodeIndex>& candidates);

/// 1-based rank of the true counterpart of every truth anchor, 0 when absent.
std::vector<std::size_t> truth_ranks(const RankedCandidates& ranked, const std::vector<AnchorLink>& truth);

double precision_at_k(const RankedCandidates& ranked, const std::vector<AnchorLink>& truth, int k);
double map_at_k(const RankedCandidates& ranked, const std::vector<AnchorLink>& truth, int k);

struct CommunityMatch {
  int source = 0;  // component index
  int target = 0;
  double distance = 0.0;
};

/// Greedy one-to-one matching of the component locations, closest pair first.
std::vector<CommunityMatch> align_communities(const JointModel& model);

/// Label community pairs (p, q) with anchor_community_ratio >= tau over all
/// anchors.
std::vector<std::pair<int, int>> anchor_communities(const NetworkPair& pair, double tau);

/// For each mixture component the label community carrying the largest
/// responsibility mass.
std::vector<int> component_labels(const JointModel& model, Side side, const Network& net);

/// For each label community the component carrying its largest responsibility
/// mass (-1 for an empty community).
std::vector<int> label_components(const JointModel& model, Side side, const Network& net);

/// Fraction of ground-truth anchor communities (a, b) for which some match
/// maps onto labels (a, b). Throws DataError when there are none.
double community_accuracy(const std::vector<CommunityMatch>& matches, const NetworkPair& pair,
                          const JointModel& model, double tau);

/// Mean over distances of 2 sigma(-d).
double quality_from_distances(const std::vector<double>& distances);

/// 2 mean sigma(-d(mu_a, mu_b)) over ground-truth anchor communities (a, b),
/// each label represented by its component.
double quality(const NetworkPair& pair, const JointModel& model, double tau);

struct AlignmentReport {
  std::vector<int> ks;
  std::map<int, double> precision;
  std::map<int, double> map;
  std::size_t queries = 0;
  std::size_t candidates = 0;
  std::vector<CommunityMatch> matches;
  std::vector<std::pair<int, int>> truth_communities;
  std::optional<double> accuracy;
  std::optional<double> quality;
  double tau = 0.6;
  std::vector<std::pair<std::string, std::string>> config;
  RankedCandidates ranked;
  // Token lookups for the text outputs.
  std::vector<std::string> source_tokens;
  std::vector<std::string> target_tokens;
  std::vector<int> source_component_labels;
  std::vector<int> target_component_labels;
  std::vector<std::string> source_label_names;
  std::vector<std::string> target_label_names;
};

/// Ranks the test anchors against every non-training-anchor source user and
/// evaluates the community metrics when both networks carry labels.
AlignmentReport evaluate(const JointModel& model, const NetworkPair& pair, double tau,
                         const std::vector<int>& ks);

std::string format_report_text(const AlignmentReport& report);
std::string format_report_json(const AlignmentReport& report);
/// query token, rank, candidate token, distance; `limit` ranks per query (0 = all).
std::string format_ranked(const AlignmentReport& report, std::size_t limit = 0);

/// Throws DataError when the model was trained on different node sets.
void check_model_matches(const JointModel& model, const NetworkPair& pair);

}  // namespace hypalign
