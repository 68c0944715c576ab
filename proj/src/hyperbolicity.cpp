#include "hypalign/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>

#include "hypalign/error.hpp"
#include "hypalign/rng.hpp"

namespace hypalign {

DistanceMatrix all_pairs_distances(const Network& net) {
  const std::size_t n = net.size();
  if (n > kMaxDistanceMatrixNodes) {
    throw UsageError("graph with " + std::to_string(n) + " nodes exceeds the distance matrix limit of " +
                     std::to_string(kMaxDistanceMatrixNodes));
  }
  DistanceMatrix dist(n);
  std::vector<NodeIndex> queue(n);
  for (NodeIndex s = 0; s < n; ++s) {
    std::size_t head = 0;
    std::size_t tail = 0;
    dist(s, s) = 0;
    queue[tail++] = s;
    while (head < tail) {
      const NodeIndex u = queue[head++];
      const auto du = dist(s, u);
      for (NodeIndex v : net.neighbors(u)) {
        if (dist(s, v) == DistanceMatrix::kUnreachable) {
          dist(s, v) = static_cast<DistanceMatrix::Hops>(du + 1);
          queue[tail++] = v;
        }
      }
    }
  }
  return dist;
}

std::optional<double> four_point_delta(double d_wx, double d_yz, double d_wy, double d_xz,
                                       double d_wz, double d_xy) {
  for (double d : {d_wx, d_yz, d_wy, d_xz, d_wz, d_xy}) {
    if (!std::isfinite(d)) return std::nullopt;
  }
  double s[3] = {d_wx + d_yz, d_wy + d_xz, d_wz + d_xy};
  std::sort(s, s + 3);
  return (s[2] - s[1]) / 2.0;
}

namespace {

using Hops = DistanceMatrix::Hops;

// Twice the four-point delta in integer hops; -1 when a pair is unreachable.
inline int twice_delta(Hops wx, Hops yz, Hops wy, Hops xz, Hops wz, Hops xy) {
  constexpr Hops inf = DistanceMatrix::kUnreachable;
  if (wx == inf || yz == inf || wy == inf || xz == inf || wz == inf || xy == inf) return -1;
  int a = wx + yz;
  int b = wy + xz;
  int c = wz + xy;
  if (a < b) std::swap(a, b);
  if (b < c) std::swap(b, c);
  if (a < b) std::swap(a, b);
  return a - b;
}

}  // namespace

DeltaResult graph_delta(const Network& net, const DeltaOptions& options) {
  const std::size_t n = net.size();
  DeltaResult result;
  result.exact = options.exact;
  if (options.exact && n > options.exact_cap) {
    throw UsageError("exact delta limited to " + std::to_string(options.exact_cap) +
                     " nodes (graph has " + std::to_string(n) + "); use sampled mode");
  }
  if (n < 4) return result;
  const DistanceMatrix dist = all_pairs_distances(net);

  int best = 0;
  if (options.exact) {
    for (std::size_t w = 0; w < n; ++w) {
      const Hops* dw = dist.row(w);
      for (std::size_t x = w + 1; x < n; ++x) {
        const Hops* dx = dist.row(x);
        if (dw[x] == DistanceMatrix::kUnreachable) continue;
        for (std::size_t y = x + 1; y < n; ++y) {
          const Hops* dy = dist.row(y);
          if (dw[y] == DistanceMatrix::kUnreachable) continue;
          for (std::size_t z = y + 1; z < n; ++z) {
            const int t = twice_delta(dw[x], dy[z], dw[y], dx[z], dw[z], dx[y]);
            if (t < 0) continue;
            ++result.quadruples;
            best = std::max(best, t);
          }
        }
      }
    }
  } else {
    Rng rng = make_rng(options.seed, 0xde17a);
    for (std::uint64_t s = 0; s < options.samples; ++s) {
      std::size_t q[4];
      for (int k = 0; k < 4; ++k) {
        bool fresh;
        do {
          q[k] = uniform_index(rng, n);
          fresh = std::find(q, q + k, q[k]) == q + k;
        } while (!fresh);
      }
      const int t = twice_delta(dist(q[0], q[1]), dist(q[2], q[3]), dist(q[0], q[2]),
                                dist(q[1], q[3]), dist(q[0], q[3]), dist(q[1], q[2]));
      if (t < 0) continue;
      ++result.quadruples;
      best = std::max(best, t);
    }
  }
  result.delta = best / 2.0;
  return result;
}

}  // namespace hypalign
