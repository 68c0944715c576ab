#include "hypalign/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <unordered_map>

#include "hypalign/error.hpp"
#include "hypalign/rng.hpp"

namespace hypalign {

void SynthSpec::validate() const {
  if (n < 2) throw UsageError("synth: n must be >= 2");
  if (communities < 1 || communities > n) throw UsageError("synth: communities must be in [1, n]");
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) throw UsageError("synth: need 0 <= p_out < p_in <= 1");
  if (!(edge_keep > 0.0 && edge_keep <= 1.0)) throw UsageError("synth: edge_keep must be in (0, 1]");
  if (!(eta > 0.0 && eta <= 1.0)) throw UsageError("synth: eta must be in (0, 1]");
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw UsageError("synth: train_fraction must be in [0, 1]");
  }
}

namespace {

struct Copy {
  Network net;
  std::vector<std::int64_t> index_of;  // base node -> index, -1 if absent
  std::unordered_map<std::string, int> identity;
};

Copy observe(const std::vector<Edge>& base, const std::vector<int>& labels, int communities, double keep,
             const char* prefix, Rng& rng) {
  const std::size_t n = labels.size();
  std::vector<Edge> kept;
  std::vector<bool> present(n, false);
  for (const Edge& e : base) {
    if (uniform01(rng) < keep) {
      kept.push_back(e);
      present[e.first] = present[e.second] = true;
    }
  }
  // Opaque tokens: a random relabeling, with node order following the token.
  std::vector<std::uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
  shuffle(perm, rng);
  std::vector<std::uint32_t> by_token;
  for (std::size_t u = 0; u < n; ++u) {
    if (present[u]) by_token.push_back(static_cast<std::uint32_t>(u));
  }
  std::sort(by_token.begin(), by_token.end(), [&](std::uint32_t a, std::uint32_t b) { return perm[a] < perm[b]; });

  Copy out;
  out.index_of.assign(n, -1);
  std::vector<std::string> tokens;
  std::vector<int> node_labels;
  for (std::uint32_t u : by_token) {
    out.index_of[u] = static_cast<std::int64_t>(tokens.size());
    tokens.push_back(prefix + std::to_string(perm[u]));
    out.identity.emplace(tokens.back(), static_cast<int>(u));
    node_labels.push_back(labels[u]);
  }
  std::vector<Edge> mapped;
  mapped.reserve(kept.size());
  for (const Edge& e : kept) {
    mapped.emplace_back(static_cast<NodeIndex>(out.index_of[e.first]), static_cast<NodeIndex>(out.index_of[e.second]));
  }
  std::sort(mapped.begin(), mapped.end());
  out.net = Network::from_edges(std::move(tokens), mapped);
  std::vector<std::string> names;
  for (int c = 0; c < communities; ++c) names.push_back("c" + std::to_string(c));

  out.net.set_labels(std::move(node_labels), std::move(names));
  return out;
}

std::vector<std::string> identities(const Network& net, const std::unordered_map<std::string, int>& id) {
  std::vector<std::string> out;
  out.reserve(net.size());
  for (const std::string& t : net.tokens()) out.push_back("u" + std::to_string(id.at(t)));
  return out;
}

// Renumbers in BFS order (roots and new neighbours by current index). The
// edge list then introduces nodes in index order, so reading the written file
// back reproduces this numbering exactly.
Network bfs_renumbered(const Network& net, std::vector<NodeIndex>& new_index) {
  new_index.assign(net.size(), 0);
  std::vector<bool> seen(net.size(), false);
  std::vector<NodeIndex> order;
  order.reserve(net.size());
  auto visit = [&](NodeIndex v) {
    seen[v] = true;
    new_index[v] = static_cast<NodeIndex>(order.size());
    order.push_back(v);
  };
  for (NodeIndex root = 0; root < net.size(); ++root) {
    if (seen[root]) continue;
    visit(root);
    for (std::size_t head = order.size() - 1; head < order.size(); ++head) {
      for (NodeIndex v : net.neighbors(order[head])) {
        if (!seen[v]) visit(v);
      }
    }
  }
  std::vector<std::string> tokens;
  std::vector<int> labels;
  for (NodeIndex v : order) {
    tokens.push_back(net.token(v));
    if (net.has_labels()) labels.push_back(net.label(v));
  }
  std::vector<Edge> edges;
  for (const auto& [a, b] : net.edges()) edges.emplace_back(new_index[a], new_index[b]);
  Network out = Network::from_edges(std::move(tokens), edges);
  if (net.has_labels()) out.set_labels(std::move(labels), net.community_names());
  return out;
}

// Re-reads the pair through its own file formats so the in-memory node order
// is the one a later load of the written files produces.
NetworkPair canonical(const NetworkPair& input) {
  NetworkPair pair = input;
  std::vector<NodeIndex> map_s, map_t;
  pair.source = bfs_renumbered(input.source, map_s);
  pair.target = bfs_renumbered(input.target, map_t);
  for (auto* anchors : {&pair.anchors_train, &pair.anchors_test}) {
    for (AnchorLink& l : *anchors) l = {map_s[l.source], map_t[l.target]};
  }
  NetworkPair out;
  out.source = load_edge_list(format_edge_list(pair.source));
  out.target = load_edge_list(format_edge_list(pair.target));
  load_labels(out.source, format_labels(pair.source));
  load_labels(out.target, format_labels(pair.target));
  out.anchors_train = load_anchors(format_anchors(pair.anchors_train, pair.source, pair.target), out.source, out.target);
  out.anchors_test = load_anchors(format_anchors(pair.anchors_test, pair.source, pair.target), out.source, out.target);
  // Label indices follow first appearance in the label file; translate by name.
  auto rename = [](const Network& from, const Network& to, int c) {
    const auto& names = to.community_names();
    return static_cast<int>(std::find(names.begin(), names.end(), from.community_names()[static_cast<std::size_t>(c)]) -
                            names.begin());
  };
  if (pair.community_truth) {
    std::vector<std::pair<int, int>> truth;
    for (const auto& [a, b] : *pair.community_truth) {
      truth.emplace_back(rename(pair.source, out.source, a), rename(pair.target, out.target, b));
    }
    out.community_truth = truth;
  }
  out.validate();
  return out;
}

}  // namespace

SynthPair generate(const SynthSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n);
  std::vector<int> labels(n);
  for (std::size_t u = 0; u < n; ++u) labels[u] = static_cast<int>(u * static_cast<std::size_t>(spec.communities) / n);

  Rng base_rng = make_rng(spec.seed, 0);
  std::vector<Edge> base;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? spec.p_in : spec.p_out;
      if (uniform01(base_rng) < p) base.emplace_back(static_cast<NodeIndex>(u), static_cast<NodeIndex>(v));
    }
  }

  Rng rng_s = make_rng(spec.seed, 1);
  Rng rng_t = make_rng(spec.seed, 2);
  Copy src = observe(base, labels, spec.communities, spec.edge_keep, "s", rng_s);
  Copy tgt = observe(base, labels, spec.communities, spec.edge_keep, "t", rng_t);

  NetworkPair pair;
  pair.source = std::move(src.net);
  pair.target = std::move(tgt.net);
  for (std::size_t u = 0; u < n; ++u) {
    if (src.index_of[u] >= 0 && tgt.index_of[u] >= 0) {
      pair.anchors_train.push_back({static_cast<NodeIndex>(src.index_of[u]), static_cast<NodeIndex>(tgt.index_of[u])});
    }
  }
  std::vector<std::pair<int, int>> truth;
  for (int c = 0; c < spec.communities; ++c) truth.emplace_back(c, c);
  pair.community_truth = truth;

  const double rate = overlap_rate(pair);
  const double one_user = 2.0 / static_cast<double>(pair.source.size() + pair.target.size());
  if (spec.eta > rate + one_user) {
    throw DataError("synth: overlap rate " + std::to_string(spec.eta) + " unreachable (pair has " +
                    std::to_string(rate) + ")");
  }
  if (spec.eta < rate) pair = subsample_overlap(pair, spec.eta, mix_seed(spec.seed, 3), spec.balance_communities);

  // Train/test split over the surviving anchors.
  std::vector<AnchorLink> all = pair.all_anchors();
  std::sort(all.begin(), all.end());
  Rng split_rng = make_rng(spec.seed, 4);
  shuffle(all, split_rng);
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(all.size())));
  pair.anchors_train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
  pair.anchors_test.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end());
  std::sort(pair.anchors_train.begin(), pair.anchors_train.end());
  std::sort(pair.anchors_test.begin(), pair.anchors_test.end());

  std::vector<std::pair<int, int>> surviving;
  for (const auto& [a, b] : truth) {
    if (pair.source.community_size(a) > 0 && pair.target.community_size(b) > 0) surviving.emplace_back(a, b);
  }
  pair.community_truth = surviving;
  pair = canonical(pair);

  SynthPair out;
  out.source_identity = identities(pair.source, src.identity);
  out.target_identity = identities(pair.target, tgt.identity);
  out.pair = std::move(pair);
  return out;
}

namespace {

std::string join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<std::pair<int, int>> parse_community_truth(std::string_view text, const NetworkPair& pair) {
  if (!pair.source.has_labels() || !pair.target.has_labels()) {
    throw DataError("community truth needs labels on both networks");
  }
  auto index = [](const Network& net, std::string_view name) {
    const auto& names = net.community_names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DataError("unknown community '" + std::string(name) + "'");
    return static_cast<int>(it - names.begin());
  };
  std::vector<std::pair<int, int>> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    std::vector<std::string_view> f;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) f.push_back(line.substr(i, j - i));
      i = j;
    }
    if (f.empty() || f[0].front() == '#') continue;
    if (f.size() != 2) throw DataError("community truth line " + std::to_string(line_no) + ": expected 2 tokens");
    out.emplace_back(index(pair.source, f[0]), index(pair.target, f[1]));
  }
  return out;
}

}  // namespace

void write_pair_dir(const std::string& dir, const NetworkPair& pair, const SynthPair* synth) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
  write_text_file(join(dir, PairFiles::source_edges), format_edge_list(pair.source));
  write_text_file(join(dir, PairFiles::target_edges), format_edge_list(pair.target));
  if (pair.source.has_labels()) write_text_file(join(dir, PairFiles::source_labels), format_labels(pair.source));
  if (pair.target.has_labels()) write_text_file(join(dir, PairFiles::target_labels), format_labels(pair.target));
  write_text_file(join(dir, PairFiles::train_anchors), format_anchors(pair.anchors_train, pair.source, pair.target));
  write_text_file(join(dir, PairFiles::test_anchors), format_anchors(pair.anchors_test, pair.source, pair.target));
  if (pair.community_truth) {
    std::string text;
    for (const auto& [a, b] : *pair.community_truth) {
      text += pair.source.community_names()[static_cast<std::size_t>(a)] + " " +
              pair.target.community_names()[static_cast<std::size_t>(b)] + "\n";
    }
    write_text_file(join(dir, PairFiles::community_truth), text);
  }
  if (synth != nullptr) {
    std::string text = "# side token identity\n";
    for (std::size_t i = 0; i < pair.source.size(); ++i) {
      text += "source " + pair.source.token(static_cast<NodeIndex>(i)) + " " + synth->source_identity[i] + "\n";
    }
    for (std::size_t i = 0; i < pair.target.size(); ++i) {
      text += "target " + pair.target.token(static_cast<NodeIndex>(i)) + " " + synth->target_identity[i] + "\n";
    }
    write_text_file(join(dir, PairFiles::identity), text);
  }
}

NetworkPair load_pair(const std::string& source_edges, const std::string& target_edges,
                      const std::string& train_anchors, const std::string& test_anchors,
                      const std::string& source_labels, const std::string& target_labels,
                      const std::string& community_truth) {
  NetworkPair pair;
  auto with_path = [](const std::string& path, auto&& fn) {
    try {
      fn(read_text_file(path));
    } catch (const DataError& e) {
      const std::string what = e.what();
      if (what.find(path) != std::string::npos) throw;
      throw DataError(path + ": " + what);
    }
  };
  with_path(source_edges, [&](const std::string& t) { pair.source = load_edge_list(t); });
  with_path(target_edges, [&](const std::string& t) { pair.target = load_edge_list(t); });
  if (!source_labels.empty()) with_path(source_labels, [&](const std::string& t) { load_labels(pair.source, t); });
  if (!target_labels.empty()) with_path(target_labels, [&](const std::string& t) { load_labels(pair.target, t); });
  if (!train_anchors.empty()) {
    with_path(train_anchors, [&](const std::string& t) { pair.anchors_train = load_anchors(t, pair.source, pair.target); });
  }
  if (!test_anchors.empty()) {
    with_path(test_anchors, [&](const std::string& t) { pair.anchors_test = load_anchors(t, pair.source, pair.target); });
  }
  if (!community_truth.empty()) {
    with_path(community_truth, [&](const std::string& t) { pair.community_truth = parse_community_truth(t, pair); });
  }
  pair.validate();
  return pair;
}

NetworkPair load_pair_dir(const std::string& dir) {
  auto optional = [&](const char* name) {
    const std::string p = join(dir, name);
    return std::filesystem::exists(p) ? p : std::string();
  };
  return load_pair(join(dir, PairFiles::source_edges), join(dir, PairFiles::target_edges),
                   join(dir, PairFiles::train_anchors), optional(PairFiles::test_anchors),
                   optional(PairFiles::source_labels), optional(PairFiles::target_labels),
                   optional(PairFiles::community_truth));
}

}  // namespace hypalign
