#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "hypalign/graph.hpp"

namespace hypalign {

/// Dense symmetric matrix of hop counts; kUnreachable marks disconnected pairs.
class DistanceMatrix {
 public:
  using Hops = std::uint16_t;
  static constexpr Hops kUnreachable = std::numeric_limits<Hops>::max();

  explicit DistanceMatrix(std::size_t n = 0) : n_(n), hops_(n * n, kUnreachable) {}

  std::size_t size() const { return n_; }
  Hops operator()(std::size_t i, std::size_t j) const { return hops_[i * n_ + j]; }
  Hops& operator()(std::size_t i, std::size_t j) { return hops_[i * n_ + j]; }
  const Hops* row(std::size_t i) const { return hops_.data() + i * n_; }

 private:
  std::size_t n_;
  std::vector<Hops> hops_;
};

/// Largest graph for which the dense matrix is built (~512 MiB of hops).
inline constexpr std::size_t kMaxDistanceMatrixNodes = 16384;

/// BFS from every node.
DistanceMatrix all_pairs_distances(const Network& net);

/// Four-point condition for one quadruple: (S1 - S2) / 2 over the sorted pair
/// sums. std::nullopt when any distance is infinite.
std::optional<double> four_point_delta(double d_wx, double d_yz, double d_wy, double d_xz,
                                       double d_wz, double d_xy);

struct DeltaOptions {
  bool exact = true;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t exact_cap = 200;
};

struct DeltaResult {
  double delta = 0.0;
  std::uint64_t quadruples = 0;  // quadruples with all six distances finite
  bool exact = true;
};

/// Gromov delta over all quadruples (exact) or n random quadruples (sampled,
/// a lower bound on the exact value).
DeltaResult graph_delta(const Network& net, const DeltaOptions& options = {});

}  // namespace hypalign
