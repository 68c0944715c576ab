#include "hypalign/mixture.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>

#include "hypalign/bessel.hpp"
#include "hypalign/error.hpp"

namespace hypalign {

GHParams::GHParams(Eigen::VectorXd mu, const Eigen::MatrixXd& scatter, Eigen::VectorXd beta,
                   double r, double omega)
    : mu_(std::move(mu)), scatter_(0.5 * (scatter + scatter.transpose())), beta_(std::move(beta)),
      r_(r), omega_(omega) {
  const auto d = mu_.size();
  if (scatter_.rows() != d || scatter_.cols() != d || beta_.size() != d) {
    throw UsageError("GH parameter dimensions disagree");
  }
  if (!(omega_ > 0.0)) throw UsageError("GH concentration omega must be positive");
  Eigen::LLT<Eigen::MatrixXd> llt(scatter_);
  if (llt.info() != Eigen::Success) throw NumericalError("GH scatter matrix is not positive definite");
  scatter_inv_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
  scatter_inv_ = 0.5 * (scatter_inv_ + scatter_inv_.transpose());
  log_det_ = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  inv_beta_ = scatter_inv_ * beta_;
  nu_ = omega_ + beta_.dot(inv_beta_);
}

double GHParams::mahalanobis(VecRef theta) const {
  const Eigen::VectorXd diff = theta - mu_;
  return diff.dot(scatter_inv_ * diff);
}

namespace {

void require_finite(double value, const char* term) {
  if (!std::isfinite(value)) {
    throw NumericalError(std::string("non-finite GH density term: ") + term);
  }
}

}  // namespace

double gh_logpdf(VecRef theta, const GHParams& psi) {
  const double d = psi.dim();
  const Eigen::VectorXd diff = theta - psi.mu();
  const double delta = diff.dot(psi.scatter_inverse() * diff);
  const double chi = psi.omega() + delta;
  const double nu = psi.nu();
  const double zeta = psi.r() - 0.5 * d;
  const double skew = diff.dot(psi.inv_beta());
  const double norm = -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * psi.log_det();
  const double power = 0.5 * zeta * (std::log(chi) - std::log(nu));
  const double bessel_num = log_bessel_k(zeta, std::sqrt(nu * chi));
  const double bessel_den = log_bessel_k(psi.r(), psi.omega());
  require_finite(skew, "skewness");
  require_finite(norm, "normalizer");
  require_finite(power, "power");
  require_finite(bessel_num, "bessel numerator");
  require_finite(bessel_den, "bessel denominator");
  return skew + norm + power + bessel_num - bessel_den;
}

Eigen::VectorXd gh_logpdf_grad(VecRef theta, const GHParams& psi) {
  const Eigen::VectorXd diff = theta - psi.mu();
  const Eigen::VectorXd inv_diff = psi.scatter_inverse() * diff;
  const double chi = psi.omega() + diff.dot(inv_diff);
  const double zeta = psi.r() - 0.5 * psi.dim();
  const double s = std::sqrt(psi.nu() * chi);
  // K_{zeta-1}(s) / K_zeta(s)
  const double lower_ratio = 1.0 / bessel_k_ratio(zeta - 1.0, s);
  return psi.inv_beta() - std::sqrt(psi.nu() / chi) * lower_ratio * inv_diff;
}

const char* to_string(EStepMode mode) {
  switch (mode) {
    case EStepMode::Conditional: return "conditional";
    case EStepMode::OmegaOnly: return "omega_only";
    case EStepMode::OmegaOnlySwapped: return "omega_only_swapped";
  }
  return "conditional";
}

EStepMode parse_estep_mode(const std::string& text) {
  if (text == "conditional") return EStepMode::Conditional;
  if (text == "omega_only") return EStepMode::OmegaOnly;
  if (text == "omega_only_swapped") return EStepMode::OmegaOnlySwapped;
  throw UsageError("unknown E-step mode '" + text + "'");
}

int Membership::argmax(Eigen::Index i) const {
  Eigen::Index best = 0;
  z.row(i).maxCoeff(&best);
  return static_cast<int>(best);
}

namespace {

// log(prior_p) + log Pr(theta_i; psi_p), N x C.
Eigen::MatrixXd log_joint(const Eigen::MatrixXd& thetas, const std::vector<GHParams>& models,
                          const Eigen::VectorXd& priors) {
  const Eigen::Index n = thetas.cols();
  const auto c = static_cast<Eigen::Index>(models.size());
  Eigen::MatrixXd out(n, c);
  for (Eigen::Index p = 0; p < c; ++p) {
    const double log_prior = std::log(priors(p));
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, p) = log_prior + gh_logpdf(thetas.col(i), models[static_cast<std::size_t>(p)]);
    }
  }
  return out;
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double m = row.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((row.array() - m).exp().sum());
}

}  // namespace

EStepStats e_step(const Eigen::MatrixXd& thetas, const std::vector<GHParams>& models,
                  const Eigen::VectorXd& priors, EStepMode mode) {
  const Eigen::Index n = thetas.cols();
  const auto c = static_cast<Eigen::Index>(models.size());
  const auto d = static_cast<double>(thetas.rows());
  if (c == 0 || priors.size() != c) throw UsageError("E-step needs one prior per component");

  EStepStats s;
  s.z = log_joint(thetas, models, priors);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lse = log_sum_exp(s.z.row(i));
    if (!std::isfinite(lse)) {
      throw NumericalError("all component densities vanish at point " + std::to_string(i));
    }
    s.z.row(i) = (s.z.row(i).array() - lse).exp();
  }

  s.a.resize(n, c);
  s.b.resize(n, c);
  s.c.resize(n, c);
  for (Eigen::Index p = 0; p < c; ++p) {
    const GHParams& psi = models[static_cast<std::size_t>(p)];
    if (mode == EStepMode::Conditional) {
      const double lambda = psi.r() - 0.5 * d;
      const double psi_gig = psi.nu();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double chi = psi.omega() + psi.mahalanobis(thetas.col(i));
        const double arg = std::sqrt(chi * psi_gig);
        const double ratio = bessel_k_ratio(lambda, arg);
        s.a(i, p) = std::sqrt(chi / psi_gig) * ratio;
        s.b(i, p) = std::sqrt(psi_gig / chi) * ratio - 2.0 * lambda / chi;
        s.c(i, p) = 0.5 * std::log(chi / psi_gig) + log_bessel_k_dorder(lambda, arg);
      }
    } else {
      const double ratio = bessel_k_ratio(psi.r(), psi.omega());
      double a = ratio;
      double b = ratio - 2.0 * psi.r() / psi.omega();
      if (mode == EStepMode::OmegaOnlySwapped) std::swap(a, b);
      s.a.col(p).setConstant(a);
      s.b.col(p).setConstant(b);
      s.c.col(p).setConstant(log_bessel_k_dorder(psi.r(), psi.omega()));
    }
  }

  s.n = s.z.colwise().sum().transpose();
  s.a_bar.resize(c);
  s.b_bar.resize(c);
  s.c_bar.resize(c);
  s.theta_bar.resize(thetas.rows(), c);
  for (Eigen::Index p = 0; p < c; ++p) {
    const double mass = s.n(p);
    const double inv = mass > 0.0 ? 1.0 / mass : 0.0;
    s.a_bar(p) = inv * s.z.col(p).dot(s.a.col(p));
    s.b_bar(p) = inv * s.z.col(p).dot(s.b.col(p));
    s.c_bar(p) = inv * s.z.col(p).dot(s.c.col(p));
    s.theta_bar.col(p) = inv * (thetas * s.z.col(p));
  }
  return s;
}

GHParams m_step_component(const Eigen::MatrixXd& thetas, const EStepStats& stats, int p,
                          const GHParams& previous, double scatter_floor) {
  const Eigen::Index d = thetas.rows();
  const double mass = stats.n(p);
  if (!(mass > 1e-8)) throw DegenerateComponentError(p);
  const double a_bar = stats.a_bar(p);
  const double b_bar = stats.b_bar(p);
  const Eigen::ArrayXd z = stats.z.col(p).array();
  const Eigen::ArrayXd b = stats.b.col(p).array();

  const Eigen::VectorXd w_mu = (z * (a_bar * b - 1.0)).matrix();
  const double denom = w_mu.sum();
  if (!(denom > 1e-10 * mass)) throw DegenerateComponentError(p);
  const Eigen::VectorXd w_beta = (z * (b_bar - b)).matrix();

  Eigen::VectorXd mu = thetas * w_mu / denom;
  const Eigen::VectorXd beta = thetas * w_beta / denom;
  if (mu.norm() >= 1.0 - kBallEps) mu = project_to_ball(mu);

  const Eigen::VectorXd centered_bar = stats.theta_bar.col(p) - mu;
  const Eigen::MatrixXd diff = thetas.colwise() - mu;
  const Eigen::VectorXd wb = (z * b).matrix() / mass;
  Eigen::MatrixXd scatter = diff * wb.asDiagonal() * diff.transpose();
  scatter.noalias() -= beta * centered_bar.transpose() + centered_bar * beta.transpose();
  scatter.noalias() += a_bar * beta * beta.transpose();
  scatter = 0.5 * (scatter + scatter.transpose());
  if (scatter_floor > 0.0) scatter.diagonal().array() += scatter_floor;
  if (!scatter.allFinite() || !check_pd(scatter)) throw DegenerateComponentError(p);
  (void)d;
  return GHParams(std::move(mu), scatter, beta, previous.r(), previous.omega());
}

MStepResult m_step(const Eigen::MatrixXd& thetas, const EStepStats& stats,
                   const std::vector<GHParams>& previous) {
  MStepResult out;
  out.models.reserve(previous.size());
  for (std::size_t p = 0; p < previous.size(); ++p) {
    out.models.push_back(m_step_component(thetas, stats, static_cast<int>(p), previous[p]));
  }
  out.priors = stats.n / static_cast<double>(thetas.cols());
  return out;
}

bool check_pd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw UsageError("check_pd needs a square matrix");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw UsageError("check_pd needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return false;
  return eig.eigenvalues().minCoeff() > 0.0;
}

double community_nll(const Eigen::MatrixXd& thetas, const Eigen::MatrixXd& weights,
                     const std::vector<GHParams>& models) {
  const Eigen::Index n = thetas.cols();
  const auto c = static_cast<Eigen::Index>(models.size());
  if (weights.rows() != n || weights.cols() != c) throw UsageError("weight matrix shape mismatch");
  double total = 0.0;
  Eigen::RowVectorXd terms(c);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index p = 0; p < c; ++p) {
      const double w = weights(i, p);
      terms(p) = w > 0.0 ? std::log(w) + gh_logpdf(thetas.col(i), models[static_cast<std::size_t>(p)])
                         : -std::numeric_limits<double>::infinity();
    }
    total -= log_sum_exp(terms);
  }
  return total;
}

double community_nll_upper(const Eigen::MatrixXd& thetas, const Eigen::MatrixXd& weights,
                           const std::vector<GHParams>& models) {
  const Eigen::Index n = thetas.cols();
  const auto c = static_cast<Eigen::Index>(models.size());
  if (weights.rows() != n || weights.cols() != c) throw UsageError("weight matrix shape mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index p = 0; p < c; ++p) {
      const double w = weights(i, p);
      if (w > 0.0) total -= w * gh_logpdf(thetas.col(i), models[static_cast<std::size_t>(p)]);
    }
  }
  return total;
}

double mixture_nll(const Eigen::MatrixXd& thetas, const Eigen::VectorXd& priors,
                   const std::vector<GHParams>& models) {
  const Eigen::MatrixXd weights = Eigen::VectorXd::Ones(thetas.cols()) * priors.transpose();
  return community_nll(thetas, weights, models);
}

CommunityModel::CommunityModel(std::vector<GHParams> components, Membership membership)
    : components_(std::move(components)), membership_(std::move(membership)) {}

CommunityModel CommunityModel::initialize(const Eigen::MatrixXd& thetas,
                                          const MixtureOptions& options, Rng& rng) {
  const Eigen::Index n = thetas.cols();
  const Eigen::Index d = thetas.rows();
  const int c = options.components;
  if (c < 1) throw UsageError("community count must be >= 1");
  if (n < c) throw UsageError("fewer users than communities");

  std::vector<Eigen::Index> centers;
  centers.push_back(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
  Eigen::VectorXd nearest = (thetas.colwise() - thetas.col(centers[0])).colwise().squaredNorm().transpose();
  while (static_cast<int>(centers.size()) < c) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = uniform01(rng) * total;
      for (pick = 0; pick < n - 1; ++pick) {
        u -= nearest(pick);
        if (u < 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
    }
    centers.push_back(pick);
    nearest = nearest.cwiseMin((thetas.colwise() - thetas.col(pick)).colwise().squaredNorm().transpose());
  }

  Eigen::MatrixXd mu(d, c);
  for (int p = 0; p < c; ++p) mu.col(p) = thetas.col(centers[static_cast<std::size_t>(p)]);

  // Lloyd refinement of the seeds; an emptied cluster keeps its location.
  for (int it = 0; it < options.lloyd_iters; ++it) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, c);
    Eigen::VectorXd count = Eigen::VectorXd::Zero(c);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      (mu.colwise() - thetas.col(i)).colwise().squaredNorm().minCoeff(&best);
      sum.col(best) += thetas.col(i);
      count(best) += 1.0;
    }
    Eigen::MatrixXd next = mu;
    for (int p = 0; p < c; ++p) {
      if (count(p) > 0.0) next.col(p) = sum.col(p) / count(p);
    }
    const bool moved = (next - mu).cwiseAbs().maxCoeff() > 0.0;
    mu = next;
    if (!moved) break;
  }

  std::vector<GHParams> comps;
  for (int p = 0; p < c; ++p) {
    comps.emplace_back(mu.col(p), options.init_scatter * Eigen::MatrixXd::Identity(d, d),
                       Eigen::VectorXd::Zero(d), options.r, options.omega);
  }
  Membership m;
  m.z = Eigen::MatrixXd::Constant(n, c, 1.0 / c);
  m.priors = Eigen::VectorXd::Constant(c, 1.0 / c);
  return CommunityModel(std::move(comps), std::move(m));
}

int CommunityModel::fit(const Eigen::MatrixXd& thetas, int iterations, EStepMode mode, Rng& rng,
                        double reset_scatter, double scatter_floor) {
  const Eigen::Index d = thetas.rows();
  const int c = size();
  int resets = 0;
  for (int it = 0; it < iterations; ++it) {
    const EStepStats stats = e_step(thetas, components_, membership_.priors, mode);
    Eigen::VectorXd priors = stats.n / static_cast<double>(thetas.cols());
    for (int p = 0; p < c; ++p) {
      try {
        components_[static_cast<std::size_t>(p)] =
            m_step_component(thetas, stats, p, components_[static_cast<std::size_t>(p)], scatter_floor);
      } catch (const DegenerateComponentError&) {
        const auto pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(thetas.cols())));
        const GHParams& old = components_[static_cast<std::size_t>(p)];
        components_[static_cast<std::size_t>(p)] =
            GHParams(thetas.col(pick), reset_scatter * Eigen::MatrixXd::Identity(d, d),
                     Eigen::VectorXd::Zero(d), old.r(), old.omega());
        priors(p) = std::max(priors(p), 1.0 / c);
        ++resets;
      }
    }
    membership_.priors = priors / priors.sum();
  }
  update_membership(thetas, mode);
  return resets;
}

void CommunityModel::update_membership(const Eigen::MatrixXd& thetas, EStepMode mode) {
  membership_.z = e_step(thetas, components_, membership_.priors, mode).z;
}

}  // namespace hypalign
