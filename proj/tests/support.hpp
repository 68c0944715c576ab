#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hypalign/graph.hpp"

namespace testsupport {

inline std::string data_path(const std::string& name) { return std::string(HYPALIGN_DATA_DIR) + "/" + name; }

inline hypalign::Network zachary() {
  hypalign::Network net = hypalign::load_edge_list(hypalign::read_text_file(data_path("zachary.edges")));
  hypalign::load_labels(net, hypalign::read_text_file(data_path("zachary.labels")));
  return net;
}

inline hypalign::Network path_graph(int n) {
  std::string text;
  for (int i = 0; i + 1 < n; ++i) text += std::to_string(i) + " " + std::to_string(i + 1) + "\n";
  return hypalign::load_edge_list(text);
}

// Heap-numbered balanced binary tree: node k has children 2k+1, 2k+2.
inline hypalign::Network binary_tree(int depth) {
  const int n = (1 << (depth + 1)) - 1;
  std::string text;
  for (int k = 1; k < n; ++k) text += std::to_string((k - 1) / 2) + " " + std::to_string(k) + "\n";
  return hypalign::load_edge_list(text);
}

// Adaptive Simpson on [a, b]; `tol` is relative to the panel's first estimate.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 30) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, eps / 2.0, d - 1) +
               rec(mid, hi, fmid, frm, fhi, right, eps / 2.0, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, tol * std::abs(whole) + 1e-300, depth);
}

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, split into unit panels
// until the integrand is negligible.
inline double bessel_k_quadrature(double nu, double x) {
  auto f = [&](double t) { return std::exp(-x * std::cosh(t) + std::abs(nu) * t) * 0.5 * (1.0 + std::exp(-2.0 * std::abs(nu) * t)); };
  double total = 0.0;
  for (double t = 0.0; t < 200.0; t += 1.0) {
    const double piece = simpson(f, t, t + 1.0, 1e-13);
    total += piece;
    if (t > 1.0 && piece < 1e-17 * total) break;
  }
  return total;
}

// d/dnu K_nu(x) = int_0^inf t exp(-x cosh t) sinh(nu t) dt.
inline double bessel_k_dorder_quadrature(double nu, double x) {
  auto f = [&](double t) { return t * std::exp(-x * std::cosh(t)) * std::sinh(nu * t); };
  double total = 0.0;
  for (double t = 0.0; t < 200.0; t += 1.0) {
    const double piece = simpson(f, t, t + 1.0, 1e-13);
    total += piece;
    if (t > 1.0 && std::abs(piece) < 1e-17 * std::abs(total)) break;
  }
  return total;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace testsupport
