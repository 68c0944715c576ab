#pragma once

#include <Eigen/Core>

namespace hypalign {

/// Largest supported embedding dimension; lets point vectors live on the stack.
inline constexpr int kMaxDim = 128;

/// Point of the Poincare ball, or a tangent vector at one. Heap-free for d <= kMaxDim.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

/// Points are kept at norm <= 1 - kBallEps.
inline constexpr double kBallEps = 1e-5;
/// Below this separation the distance gradient is treated as undefined.
inline constexpr double kCoincideEps = 1e-9;

/// 2 / (1 - ||x||^2).
double conformal_factor(VecRef x);

/// ln(z + sqrt(z^2 - 1)) with z clamped to >= 1.
double arcosh(double z);

/// Geodesic distance on the unit Poincare ball.
double distance(VecRef x, VecRef y);

/// Euclidean gradient of distance(x, y) with respect to y.
/// Throws CoincidentPointsError when ||x - y|| < kCoincideEps.
Vec distance_grad_y(VecRef x, VecRef y);

/// Distance and both partial gradients from one set of shared intermediates.
struct DistanceGrad {
  double value = 0.0;
  Vec grad_x;
  Vec grad_y;
};
/// Returns false (leaving `out` unspecified) for coincident points.
bool distance_with_grads(VecRef x, VecRef y, DistanceGrad& out);

/// Euclidean -> Riemannian gradient: ((1 - ||x||^2) / 2)^2 * g.
Vec riemannian_rescale(VecRef x, VecRef g);

/// Exponential map at x applied to tangent vector a, re-projected into the ball.
Vec exp_map(VecRef x, VecRef a);

/// Rescales v onto norm 1 - eps when it reaches that radius. Throws
/// NumericalError on non-finite input.
Vec project_to_ball(VecRef v, double eps = kBallEps);

}  // namespace hypalign
