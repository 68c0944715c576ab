#include "hypalign/geometry.hpp"

#include <cmath>

#include "hypalign/error.hpp"

namespace hypalign {

double conformal_factor(VecRef x) { return 2.0 / (1.0 - x.squaredNorm()); }

double arcosh(double z) {
  if (z < 1.0) z = 1.0;
  return std::log(z + std::sqrt(z * z - 1.0));
}

namespace {

// 2||x-y||^2 / ((1-||x||^2)(1-||y||^2)), i.e. cosh(d) - 1.
inline double cosh_minus_one(double diff_sq, double alpha, double beta) {
  return 2.0 * diff_sq / (alpha * beta);
}

}  // namespace

double distance(VecRef x, VecRef y) {
  const double alpha = 1.0 - y.squaredNorm();
  const double beta = 1.0 - x.squaredNorm();
  const double g1 = cosh_minus_one((x - y).squaredNorm(), alpha, beta);
  // log1p form keeps precision for nearby points: arcosh(1+u) = log1p(u + sqrt(u(u+2))).
  return std::log1p(g1 + std::sqrt(g1 * (g1 + 2.0)));
}

bool distance_with_grads(VecRef x, VecRef y, DistanceGrad& out) {
  const double xx = x.squaredNorm();
  const double yy = y.squaredNorm();
  const double xy = x.dot(y);
  const double diff_sq = std::max(0.0, xx - 2.0 * xy + yy);
  const double alpha = 1.0 - yy;
  const double beta = 1.0 - xx;
  const double g1 = cosh_minus_one(diff_sq, alpha, beta);
  out.value = std::log1p(g1 + std::sqrt(g1 * (g1 + 2.0)));
  if (std::sqrt(diff_sq) < kCoincideEps) return false;
  // sqrt(gamma^2 - 1) = sqrt(g1 (g1 + 2)).
  const double root = std::sqrt(g1 * (g1 + 2.0));
  const double cy = 4.0 / (beta * root);
  const double cx = 4.0 / (alpha * root);
  // The coefficient of y carries the squared norm of the *other* point.
  out.grad_y = cy * ((xx - 2.0 * xy + 1.0) / (alpha * alpha) * y - x / alpha);
  out.grad_x = cx * ((yy - 2.0 * xy + 1.0) / (beta * beta) * x - y / beta);
  return true;
}

Vec distance_grad_y(VecRef x, VecRef y) {
  DistanceGrad g;
  if (!distance_with_grads(x, y, g)) throw CoincidentPointsError();
  return g.grad_y;
}

Vec riemannian_rescale(VecRef x, VecRef g) {
  const double s = 0.5 * (1.0 - x.squaredNorm());
  return (s * s) * g;
}

Vec exp_map(VecRef x, VecRef a) {
  const double norm_a = a.norm();
  if (norm_a == 0.0) return project_to_ball(x);
  const double lambda = conformal_factor(x);
  const double t = lambda * norm_a;
  // Beyond t ~ 700 cosh/sinh overflow; the image is then on the boundary along
  // the direction of the numerator's dominant terms.
  const double tc = std::min(t, 700.0);
  const double ch = std::cosh(tc);
  const double sh = std::sinh(tc);
  const double xu = x.dot(a) / norm_a;
  Vec num = lambda * (ch + xu * sh) * x + (sh / norm_a) * a;
  const double den = 1.0 + (lambda - 1.0) * ch + lambda * xu * sh;
  return project_to_ball(num / den);
}

Vec project_to_ball(VecRef v, double eps) {
  if (!v.allFinite()) throw NumericalError("non-finite coordinate in ball projection");
  const double norm = v.norm();
  const double limit = 1.0 - eps;
  if (norm >= limit) return (limit / norm) * v;
  return v;
}

}  // namespace hypalign
