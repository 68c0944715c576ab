#include "hypalign/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hypalign/error.hpp"
#include "hypalign/rng.hpp"

namespace hypalign {

namespace {

// Splits `text` into lines and whitespace tokens, skipping blanks and '#' comments.
template <class Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) fields.push_back(line.substr(i, j - i));
      i = j;
    }
    if (fields.empty() || fields.front().front() == '#') continue;
    fn(line_no, fields);
  }
}

}  // namespace

Network Network::from_edges(std::vector<std::string> tokens, const std::vector<Edge>& edges) {
  Network net;
  net.tokens_ = std::move(tokens);
  net.index_.reserve(net.tokens_.size());
  for (NodeIndex i = 0; i < net.tokens_.size(); ++i) {
    if (!net.index_.emplace(net.tokens_[i], i).second) {
      throw DataError("duplicate node token '" + net.tokens_[i] + "'");
    }
  }
  net.adjacency_.assign(net.tokens_.size(), {});
  for (const auto& [a, b] : edges) {
    if (a >= net.size() || b >= net.size()) throw DataError("edge endpoint out of range");
    if (a == b) throw DataError("self-loop at node '" + net.tokens_[a] + "'");
    net.adjacency_[a].push_back(b);
    net.adjacency_[b].push_back(a);
  }
  std::size_t directed = 0;
  for (auto& nbrs : net.adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    directed += nbrs.size();
  }
  net.edge_count_ = directed / 2;
  return net;
}

std::optional<NodeIndex> Network::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Network::adjacent(NodeIndex a, NodeIndex b) const {
  const auto& nbrs = adjacency_[a];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::vector<Edge> Network::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeIndex a = 0; a < size(); ++a) {
    for (NodeIndex b : adjacency_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<NodeIndex> Network::community_members(int community) const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == community) out.push_back(i);
  }
  return out;
}

std::size_t Network::community_size(int community) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), community));
}

void Network::set_labels(std::vector<int> labels, std::vector<std::string> names) {
  if (labels.size() != size()) throw DataError("label vector size does not match node count");
  for (int c : labels) {
    if (c < -1 || c >= static_cast<int>(names.size())) throw DataError("community index out of range");
  }
  labels_ = std::move(labels);
  community_names_ = std::move(names);
}

Network Network::without_nodes(const std::vector<bool>& remove,
                               std::vector<std::int64_t>* old_to_new) const {
  std::vector<std::int64_t> map(size(), -1);
  std::vector<std::string> tokens;
  for (NodeIndex i = 0; i < size(); ++i) {
    if (!remove[i]) {
      map[i] = static_cast<std::int64_t>(tokens.size());
      tokens.push_back(tokens_[i]);
    }
  }
  std::vector<Edge> kept;
  for (const auto& [a, b] : edges()) {
    if (map[a] >= 0 && map[b] >= 0) {
      kept.emplace_back(static_cast<NodeIndex>(map[a]), static_cast<NodeIndex>(map[b]));
    }
  }
  Network out = from_edges(std::move(tokens), kept);
  if (has_labels()) {
    std::vector<int> labels(out.size(), -1);
    for (NodeIndex i = 0; i < size(); ++i) {
      if (map[i] >= 0) labels[static_cast<std::size_t>(map[i])] = labels_[i];
    }
    out.set_labels(std::move(labels), community_names_);
  }
  if (old_to_new != nullptr) *old_to_new = std::move(map);
  return out;
}

std::vector<AnchorLink> NetworkPair::all_anchors() const {
  std::vector<AnchorLink> all = anchors_train;
  all.insert(all.end(), anchors_test.begin(), anchors_test.end());
  return all;
}

void NetworkPair::validate() const {
  std::set<NodeIndex> seen_source;
  std::set<NodeIndex> seen_target;
  for (const AnchorLink& a : all_anchors()) {
    if (a.source >= source.size() || a.target >= target.size()) {
      throw DataError("anchor index out of range");
    }
    if (!seen_source.insert(a.source).second) {
      throw DataError("source node '" + source.token(a.source) + "' anchored twice");
    }
    if (!seen_target.insert(a.target).second) {
      throw DataError("target node '" + target.token(a.target) + "' anchored twice");
    }
  }
}

Network load_edge_list(std::string_view text) {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, NodeIndex> index;
  std::vector<Edge> edges;
  auto intern = [&](std::string_view tok) {
    auto [it, inserted] = index.emplace(std::string(tok), static_cast<NodeIndex>(tokens.size()));
    if (inserted) tokens.emplace_back(tok);
    return it->second;
  };
  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& f) {
    if (f.size() != 2) {
      throw DataError("edge list line " + std::to_string(line) + ": expected 2 tokens, got " +
                      std::to_string(f.size()));
    }
    if (f[0] == f[1]) {
      throw DataError("edge list line " + std::to_string(line) + ": self-loop on '" +
                      std::string(f[0]) + "'");
    }
    const NodeIndex a = intern(f[0]);
    const NodeIndex b = intern(f[1]);
    edges.emplace_back(a, b);
  });
  return Network::from_edges(std::move(tokens), edges);
}

void load_labels(Network& net, std::string_view text) {
  std::vector<int> labels(net.size(), -1);
  std::vector<std::string> names;
  std::unordered_map<std::string, int> community_index;
  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& f) {
    if (f.size() != 2) {
      throw DataError("label line " + std::to_string(line) + ": expected 2 tokens");
    }
    auto node = net.find(f[0]);
    if (!node) throw DataError("label line " + std::to_string(line) + ": unknown node '" +
                               std::string(f[0]) + "'");
    auto [it, inserted] = community_index.emplace(std::string(f[1]), static_cast<int>(names.size()));
    if (inserted) names.emplace_back(f[1]);
    labels[*node] = it->second;
  });
  net.set_labels(std::move(labels), std::move(names));
}

std::vector<AnchorLink> load_anchors(std::string_view text, const Network& source,
                                     const Network& target) {
  std::vector<AnchorLink> out;
  std::set<NodeIndex> seen_source;
  std::set<NodeIndex> seen_target;
  for_each_record(text, [&](std::size_t line, const std::vector<std::string_view>& f) {
    if (f.size() != 2) {
      throw DataError("anchor line " + std::to_string(line) + ": expected 2 tokens");
    }
    auto s = source.find(f[0]);
    if (!s) throw DataError("unknown node '" + std::string(f[0]) + "' (anchor line " +
                            std::to_string(line) + ")");
    auto t = target.find(f[1]);
    if (!t) throw DataError("unknown node '" + std::string(f[1]) + "' (anchor line " +
                            std::to_string(line) + ")");
    if (!seen_source.insert(*s).second) {
      throw DataError("duplicate source '" + std::string(f[0]) + "' (anchor line " +
                      std::to_string(line) + ")");
    }
    if (!seen_target.insert(*t).second) {
      throw DataError("duplicate target '" + std::string(f[1]) + "' (anchor line " +
                      std::to_string(line) + ")");
    }
    out.push_back({*s, *t});
  });
  return out;
}

std::string format_edge_list(const Network& net) {
  std::string out;
  for (const auto& [a, b] : net.edges()) {
    out += net.token(a);
    out += ' ';
    out += net.token(b);
    out += '\n';
  }
  return out;
}

std::string format_labels(const Network& net) {
  std::string out;
  for (NodeIndex i = 0; i < net.size(); ++i) {
    if (net.label(i) < 0) continue;
    out += net.token(i);
    out += ' ';
    out += net.community_names()[static_cast<std::size_t>(net.label(i))];
    out += '\n';
  }
  return out;
}

std::string format_anchors(const std::vector<AnchorLink>& anchors, const Network& source,
                           const Network& target) {
  std::string out;
  for (const AnchorLink& a : anchors) {
    out += source.token(a.source);
    out += ' ';
    out += target.token(a.target);
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path + "'");
}

double overlap_rate(const NetworkPair& pair) {
  const std::size_t total = pair.source.size() + pair.target.size();
  if (total == 0) return 0.0;
  const std::size_t anchors = pair.anchors_train.size() + pair.anchors_test.size();
  return 2.0 * static_cast<double>(anchors) / static_cast<double>(total);
}

NetworkPair subsample_overlap(const NetworkPair& pair, double target_eta, std::uint64_t seed,
                              bool balance_communities) {
  const double current = overlap_rate(pair);
  if (target_eta > current + 1e-12) {
    throw UsageError("target overlap rate " + std::to_string(target_eta) +
                     " exceeds current rate " + std::to_string(current));
  }
  const bool balance = balance_communities && pair.source.has_labels() && pair.target.has_labels();

  struct Tracked {
    AnchorLink link;
    bool train;
  };
  std::vector<Tracked> anchors;
  for (const auto& a : pair.anchors_train) anchors.push_back({a, true});
  for (const auto& a : pair.anchors_test) anchors.push_back({a, false});

  const Network* nets[2] = {&pair.source, &pair.target};
  std::vector<bool> removed[2] = {std::vector<bool>(pair.source.size(), false),
                                  std::vector<bool>(pair.target.size(), false)};
  std::vector<std::size_t> degree[2];
  std::size_t alive[2] = {pair.source.size(), pair.target.size()};
  for (int s = 0; s < 2; ++s) {
    degree[s].resize(nets[s]->size());
    for (NodeIndex i = 0; i < nets[s]->size(); ++i) degree[s][i] = nets[s]->degree(i);
  }
  // Live community sizes for the balanced variant.
  std::vector<std::size_t> comm_size[2];
  if (balance) {
    for (int s = 0; s < 2; ++s) {
      comm_size[s].assign(static_cast<std::size_t>(nets[s]->community_count()), 0);
      for (int c : nets[s]->labels()) {
        if (c >= 0) ++comm_size[s][static_cast<std::size_t>(c)];
      }
    }
  }

  auto removable = [&](int side, NodeIndex v) {
    for (NodeIndex u : nets[side]->neighbors(v)) {
      if (!removed[side][u] && degree[side][u] <= 1) return false;
    }
    return true;
  };
  auto remove_node = [&](int side, NodeIndex v) {
    removed[side][v] = true;
    --alive[side];
    for (NodeIndex u : nets[side]->neighbors(v)) {
      if (!removed[side][u]) --degree[side][u];
    }
    if (balance) {
      const int c = nets[side]->label(v);
      if (c >= 0) --comm_size[side][static_cast<std::size_t>(c)];
    }
  };

  Rng rng = make_rng(seed, 0x5ab5);
  std::vector<std::size_t> order;
  for (;;) {
    const double a = static_cast<double>(anchors.size());
    const double n = static_cast<double>(alive[0] + alive[1]);
    if (anchors.empty() || n <= 1.0) break;
    const double rate = 2.0 * a / n;
    const double next = 2.0 * (a - 1.0) / (n - 1.0);
    if (rate <= target_eta + 1e-12 || next < target_eta - 1e-12) break;

    // Candidate anchors, in random order.
    order.clear();
    if (balance) {
      std::map<std::pair<int, int>, std::size_t> group_count;
      for (const auto& t : anchors) {
        ++group_count[{nets[0]->label(t.link.source), nets[1]->label(t.link.target)}];
      }
      std::pair<int, int> best{-1, -1};
      double best_ratio = -1.0;
      for (const auto& [key, count] : group_count) {
        if (key.first < 0 || key.second < 0) continue;
        const double sizes = static_cast<double>(comm_size[0][static_cast<std::size_t>(key.first)] +
                                                 comm_size[1][static_cast<std::size_t>(key.second)]);
        const double ratio = 2.0 * static_cast<double>(count) / sizes;
        if (ratio > best_ratio) {
          best_ratio = ratio;
          best = key;
        }
      }
      // Stop before any community pair drops below the target ratio.
      if (best.first >= 0) {
        const double sizes = static_cast<double>(comm_size[0][static_cast<std::size_t>(best.first)] +
                                                 comm_size[1][static_cast<std::size_t>(best.second)]);
        const double count = static_cast<double>(group_count[best]);
        if (2.0 * (count - 1.0) / (sizes - 1.0) < target_eta - 1e-12) break;
      }
      for (std::size_t k = 0; k < anchors.size(); ++k) {
        const auto& l = anchors[k].link;
        if (best.first < 0 ||
            (nets[0]->label(l.source) == best.first && nets[1]->label(l.target) == best.second)) {
          order.push_back(k);
        }
      }
    } else {
      for (std::size_t k = 0; k < anchors.size(); ++k) order.push_back(k);
    }
    shuffle(order, rng);

    bool done = false;
    for (std::size_t k : order) {
      const AnchorLink l = anchors[k].link;
      int side;
      if (balance) {
        const std::size_t s_size = comm_size[0][static_cast<std::size_t>(nets[0]->label(l.source))];
        const std::size_t t_size = comm_size[1][static_cast<std::size_t>(nets[1]->label(l.target))];
        side = s_size > t_size ? 0 : (t_size > s_size ? 1 : static_cast<int>(rng() & 1U));
      } else {
        side = alive[0] > alive[1] ? 0 : (alive[1] > alive[0] ? 1 : static_cast<int>(rng() & 1U));
      }
      for (int attempt = 0; attempt < 2 && !done; ++attempt) {
        const int s = attempt == 0 ? side : 1 - side;
        const NodeIndex v = s == 0 ? l.source : l.target;
        if (removable(s, v)) {
          remove_node(s, v);
          anchors.erase(anchors.begin() + static_cast<std::ptrdiff_t>(k));
          done = true;
        }
      }
      if (done) break;
    }
    if (!done) throw DataError("no anchored user can be deleted without isolating a neighbor");
  }

  NetworkPair out;
  std::vector<std::int64_t> map_s;
  std::vector<std::int64_t> map_t;
  out.source = pair.source.without_nodes(removed[0], &map_s);
  out.target = pair.target.without_nodes(removed[1], &map_t);
  // Keep the original file order of the surviving anchors.
  auto keep = [&](const std::vector<AnchorLink>& in, std::vector<AnchorLink>& dst) {
    for (const AnchorLink& l : in) {
      if (map_s[l.source] >= 0 && map_t[l.target] >= 0) {
        dst.push_back({static_cast<NodeIndex>(map_s[l.source]), static_cast<NodeIndex>(map_t[l.target])});
      }
    }
  };
  keep(pair.anchors_train, out.anchors_train);
  keep(pair.anchors_test, out.anchors_test);
  out.community_truth = pair.community_truth;
  return out;
}

double anchor_community_ratio(int source_community, int target_community,
                              const NetworkPair& pair) {
  if (!pair.source.has_labels() || !pair.target.has_labels()) {
    throw UsageError("anchor community ratio needs labels on both networks");
  }
  const std::size_t ns = pair.source.community_size(source_community);
  const std::size_t nt = pair.target.community_size(target_community);
  if (ns == 0 || nt == 0) throw DataError("anchor community ratio of an empty community");
  std::size_t shared = 0;
  for (const AnchorLink& a : pair.all_anchors()) {
    if (pair.source.label(a.source) == source_community &&
        pair.target.label(a.target) == target_community) {
      ++shared;
    }
  }
  return 2.0 * static_cast<double>(shared) / static_cast<double>(ns + nt);
}

}  // namespace hypalign
