#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hypalign/geometry.hpp"
#include "hypalign/rng.hpp"

namespace hypalign {

/// Parameters (mu, Delta, beta, r, omega) of one generalized hyperbolic
/// component. The scatter matrix is stored with its inverse and log-determinant.
class GHParams {
 public:
  GHParams() = default;
  GHParams(Eigen::VectorXd mu, const Eigen::MatrixXd& scatter, Eigen::VectorXd beta, double r,
           double omega);

  int dim() const { return static_cast<int>(mu_.size()); }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& scatter() const { return scatter_; }
  const Eigen::MatrixXd& scatter_inverse() const { return scatter_inv_; }
  double log_det() const { return log_det_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  double r() const { return r_; }
  double omega() const { return omega_; }

  /// omega + beta' Delta^-1 beta.
  double nu() const { return nu_; }
  /// Delta^-1 beta.
  const Eigen::VectorXd& inv_beta() const { return inv_beta_; }

  /// (theta - mu)' Delta^-1 (theta - mu).
  double mahalanobis(VecRef theta) const;

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd scatter_;
  Eigen::MatrixXd scatter_inv_;
  double log_det_ = 0.0;
  Eigen::VectorXd beta_;
  double r_ = 1.0;
  double omega_ = 1.0;
  double nu_ = 1.0;
  Eigen::VectorXd inv_beta_;
};

/// Log density of the generalized hyperbolic distribution at theta, evaluated
/// over R^d coordinates.
double gh_logpdf(VecRef theta, const GHParams& psi);

/// Gradient of gh_logpdf with respect to theta.
Eigen::VectorXd gh_logpdf_grad(VecRef theta, const GHParams& psi);

/// Conditional moments used by the E-step.
///  - Conditional: W | theta_i ~ GIG(r - d/2, omega + delta_i, nu); the
///    moments depend on the point.
///  - OmegaOnly: moments of the prior W ~ GIG(r, omega, omega); a = E[W],
///    b = E[1/W], identical for all points.
///  - OmegaOnlySwapped: OmegaOnly with a and b exchanged.
enum class EStepMode { Conditional, OmegaOnly, OmegaOnlySwapped };

const char* to_string(EStepMode mode);
EStepMode parse_estep_mode(const std::string& text);

/// Responsibilities (N x C, rows sum to 1) and mixing weights.
struct Membership {
  Eigen::MatrixXd z;
  Eigen::VectorXd priors;

  int argmax(Eigen::Index i) const;
};

struct EStepStats {
  Eigen::MatrixXd z;  // N x C responsibilities
  Eigen::MatrixXd a;  // E[W | theta_i, component p]
  Eigen::MatrixXd b;  // E[1/W | theta_i, component p]
  Eigen::MatrixXd c;  // E[log W | theta_i, component p]
  Eigen::VectorXd n;  // responsibility mass per component
  Eigen::VectorXd a_bar;
  Eigen::VectorXd b_bar;
  Eigen::VectorXd c_bar;
  Eigen::MatrixXd theta_bar;  // d x C responsibility-weighted means
};

/// `thetas` holds one point per column (d x N).
EStepStats e_step(const Eigen::MatrixXd& thetas, const std::vector<GHParams>& models,
                  const Eigen::VectorXd& priors, EStepMode mode = EStepMode::OmegaOnly);

/// Closed-form update of one component. r and omega are carried over.
/// `scatter_floor` > 0 adds floor * I to the updated scatter (a ridge that
/// bounds the curvature of the log density). Throws DegenerateComponentError
/// when the update denominator vanishes or the scatter is not positive definite.
GHParams m_step_component(const Eigen::MatrixXd& thetas, const EStepStats& stats, int p,
                          const GHParams& previous, double scatter_floor = 0.0);

struct MStepResult {
  std::vector<GHParams> models;
  Eigen::VectorXd priors;
};
MStepResult m_step(const Eigen::MatrixXd& thetas, const EStepStats& stats,
                   const std::vector<GHParams>& previous);

/// True iff the smallest eigenvalue is positive. Throws UsageError for a
/// matrix that is not square or not symmetric within 1e-10.
bool check_pd(const Eigen::MatrixXd& m);

/// -sum_i log sum_p w_ip Pr(theta_i; psi_p), with w an N x C weight matrix.
double community_nll(const Eigen::MatrixXd& thetas, const Eigen::MatrixXd& weights,
                     const std::vector<GHParams>& models);

/// -sum_i sum_p w_ip log Pr(theta_i; psi_p). Bounds community_nll from above
/// when every row of w sums to one.
double community_nll_upper(const Eigen::MatrixXd& thetas, const Eigen::MatrixXd& weights,
                           const std::vector<GHParams>& models);

/// community_nll with every row of the weights equal to `priors`: the
/// marginal mixture likelihood that EM decreases.
double mixture_nll(const Eigen::MatrixXd& thetas, const Eigen::VectorXd& priors,
                   const std::vector<GHParams>& models);

struct MixtureOptions {
  int components = 2;
  double r = 1.0;
  double omega = 1.0;
  EStepMode mode = EStepMode::OmegaOnly;
  double init_scatter = 0.1;
  int lloyd_iters = 20;  // k-means refinement after seeding; 0 keeps the raw seeds
};

/// One network's community model: GH components plus membership.
class CommunityModel {
 public:
  CommunityModel() = default;
  CommunityModel(std::vector<GHParams> components, Membership membership);

  /// k-means++ seeding of the locations (Euclidean) plus Lloyd refinement,
  /// scaled-identity scatter,
  /// zero skewness, uniform priors and responsibilities.
  static CommunityModel initialize(const Eigen::MatrixXd& thetas, const MixtureOptions& options,
                                   Rng& rng);

  /// Runs `iterations` E/M rounds. A degenerate component is reset to a random
  /// user embedding with scaled-identity scatter; returns the number of resets.
  int fit(const Eigen::MatrixXd& thetas, int iterations, EStepMode mode, Rng& rng,
          double reset_scatter = 0.1, double scatter_floor = 0.0);

  /// Refreshes the responsibilities only.
  void update_membership(const Eigen::MatrixXd& thetas, EStepMode mode);

  int size() const { return static_cast<int>(components_.size()); }
  const std::vector<GHParams>& components() const { return components_; }
  const Membership& membership() const { return membership_; }

 private:
  std::vector<GHParams> components_;
  Membership membership_;
};

}  // namespace hypalign
