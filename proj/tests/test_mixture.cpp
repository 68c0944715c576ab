#include <gtest/gtest.h>

#include <cmath>

#include "hypalign/error.hpp"
#include "hypalign/mixture.hpp"
#include "hypalign/rng.hpp"
#include "mixture_oracles.hpp"
#include "support.hpp"

using namespace hypalign;

namespace {

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

GHParams random_params(Rng& rng, int d) {
  Eigen::VectorXd mu(d), beta(d);
  Eigen::MatrixXd a(d, d);
  for (int k = 0; k < d; ++k) {
    mu(k) = 0.4 * (uniform01(rng) - 0.5);
    beta(k) = 0.2 * (uniform01(rng) - 0.5);
    for (int j = 0; j < d; ++j) a(k, j) = 0.2 * standard_normal(rng);
  }
  const Eigen::MatrixXd scatter = a * a.transpose() + 0.02 * Eigen::MatrixXd::Identity(d, d);
  return GHParams(mu, scatter, beta, 0.5 + 2.0 * uniform01(rng), 0.5 + 2.0 * uniform01(rng));
}

Eigen::MatrixXd random_points(Rng& rng, int d, int n, double scale = 0.3) {
  Eigen::MatrixXd t(d, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) t(k, i) = scale * standard_normal(rng);
  return t;
}

Eigen::MatrixXd random_weights(Rng& rng, int n, int c) {
  Eigen::MatrixXd w(n, c);
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < c; ++p) w(i, p) = uniform01(rng) + 1e-3;
    w.row(i) /= w.row(i).sum();
  }
  return w;
}

// Two well-separated 2-D clusters with GH noise.
Eigen::MatrixXd two_clusters(Rng& rng, int per_cluster) {
  const Eigen::MatrixXd s = 0.002 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd a = testsupport::sample_gh(v2(0.3, 0.1), s, v2(0.01, 0.0), 1.0, 1.0, per_cluster, rng);
  const Eigen::MatrixXd b = testsupport::sample_gh(v2(-0.2, -0.3), s, v2(0.0, -0.01), 1.0, 1.0, per_cluster, rng);
  Eigen::MatrixXd out(2, 2 * per_cluster);
  out << a, b;
  return out;
}

}  // namespace

TEST(GHDensity, SymmetricWithoutSkew) {
  Rng rng = make_rng(1);
  for (int i = 0; i < 20; ++i) {
    GHParams p = random_params(rng, 3);
    p = GHParams(p.mu(), p.scatter(), Eigen::VectorXd::Zero(3), p.r(), p.omega());
    const Eigen::VectorXd v = 0.2 * random_points(rng, 3, 1).col(0);
    EXPECT_NEAR(gh_logpdf(p.mu() + v, p), gh_logpdf(p.mu() - v, p), 1e-10);
  }
}

TEST(GHDensity, TranslationCovariant) {
  Rng rng = make_rng(2);
  for (int i = 0; i < 20; ++i) {
    const GHParams p = random_params(rng, 2);
    const Eigen::VectorXd c = 0.05 * random_points(rng, 2, 1).col(0);
    const Eigen::VectorXd theta = random_points(rng, 2, 1).col(0);
    const GHParams q(p.mu() + c, p.scatter(), p.beta(), p.r(), p.omega());
    EXPECT_NEAR(gh_logpdf(theta, p), gh_logpdf(theta + c, q), 1e-10);
  }
}

TEST(GHDensity, OneDimensionalIntegratesToOne) {
  for (const auto& [r, omega, beta, scatter] :
       std::vector<std::tuple<double, double, double, double>>{{1.0, 1.0, 0.0, 0.04}, {2.5, 0.7, 0.1, 0.01}, {-1.0, 2.0, -0.05, 0.09}}) {
    Eigen::VectorXd mu(1), b(1);
    mu << 0.1;
    b << beta;
    const GHParams p(mu, Eigen::MatrixXd::Constant(1, 1, scatter), b, r, omega);
    auto f = [&](double x) {
      Eigen::VectorXd t(1);
      t << x;
      return std::exp(gh_logpdf(t, p));
    };
    double total = 0.0;
    for (double lo = -60.0; lo < 60.0; lo += 0.5) total += testsupport::simpson(f, lo, lo + 0.5, 1e-10);
    EXPECT_NEAR(total, 1.0, 1e-4) << r << " " << omega;
  }
}

TEST(GHDensity, GradientMatchesFiniteDifferences) {
  Rng rng = make_rng(3);
  for (int i = 0; i < 20; ++i) {
    const GHParams p = random_params(rng, 3);
    const Eigen::VectorXd theta = random_points(rng, 3, 1).col(0);
    const Eigen::VectorXd g = gh_logpdf_grad(theta, p);
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp(k) += 1e-6;
      tm(k) -= 1e-6;
      const double fd = (gh_logpdf(tp, p) - gh_logpdf(tm, p)) / 2e-6;
      EXPECT_NEAR(g(k), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(EStep, SingleComponentAndSymmetry) {
  Rng rng = make_rng(4);
  const Eigen::MatrixXd t = random_points(rng, 2, 30);
  const GHParams p = random_params(rng, 2);
  const EStepStats one = e_step(t, {p}, Eigen::VectorXd::Ones(1));
  EXPECT_TRUE((one.z.array() == 1.0).all());
  const EStepStats two = e_step(t, {p, p}, Eigen::VectorXd::Constant(2, 0.5));
  EXPECT_LT((two.z.array() - 0.5).abs().maxCoeff(), 1e-15);
}

TEST(EStep, RowsSumToOneAndJensenProduct) {
  Rng rng = make_rng(5);
  for (EStepMode mode : {EStepMode::OmegaOnly, EStepMode::OmegaOnlySwapped, EStepMode::Conditional}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd t = random_points(rng, 3, 40);
      const std::vector<GHParams> models = {random_params(rng, 3), random_params(rng, 3), random_params(rng, 3)};
      const EStepStats s = e_step(t, models, Eigen::Vector3d(0.2, 0.3, 0.5), mode);
      EXPECT_LT((s.z.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
      EXPECT_GE((s.a.array() * s.b.array()).minCoeff(), 1.0 - 1e-12) << to_string(mode);
      EXPECT_NEAR(s.n.sum(), 40.0, 1e-9);
    }
  }
}

TEST(EStep, OmegaOnlyMomentsAreGigMoments) {
  // For W ~ GIG(r, omega, omega): E[W] = K_{r+1}/K_r (omega) and E[1/W] = K_{r+1}/K_r - 2r/omega.
  Rng rng = make_rng(6);
  const testsupport::GigSampler gig(1.3, 0.8);
  double mw = 0.0, minv = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double w = gig(rng);
    mw += w / n;
    minv += 1.0 / (w * n);
  }
  const GHParams p(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1), 1.3, 0.8);
  const EStepStats s = e_step(Eigen::MatrixXd::Zero(1, 1), {p}, Eigen::VectorXd::Ones(1), EStepMode::OmegaOnly);
  EXPECT_NEAR(s.a(0, 0), mw, 0.02 * mw);
  EXPECT_NEAR(s.b(0, 0), minv, 0.02 * minv);
  const EStepStats w = e_step(Eigen::MatrixXd::Zero(1, 1), {p}, Eigen::VectorXd::Ones(1), EStepMode::OmegaOnlySwapped);
  EXPECT_EQ(w.a(0, 0), s.b(0, 0));
  EXPECT_EQ(w.b(0, 0), s.a(0, 0));
}

TEST(EStep, FarPointsStayNormalized) {
  // Linear-domain densities underflow to zero here; the log domain keeps the
  // responsibilities well defined.
  const GHParams p(v2(0.0, 0.0), 1e-6 * Eigen::MatrixXd::Identity(2, 2), v2(0.0, 0.0), 1.0, 1.0);
  const GHParams q(v2(0.5, 0.0), 1e-6 * Eigen::MatrixXd::Identity(2, 2), v2(0.0, 0.0), 1.0, 1.0);
  Eigen::MatrixXd far(2, 1);
  far << -0.9, 0.0;
  EXPECT_EQ(std::exp(gh_logpdf(far.col(0), p)), 0.0);
  const EStepStats s = e_step(far, {p, q}, Eigen::VectorXd::Constant(2, 0.5));
  EXPECT_NEAR(s.z(0, 0), 1.0, 1e-12);
  EXPECT_TRUE(s.a.allFinite() && s.b.allFinite());
}

TEST(MStep, ConstantWeightsGiveMeanAndZeroSkew) {
  Rng rng = make_rng(7);
  const Eigen::MatrixXd t = random_points(rng, 2, 50);
  const GHParams p = random_params(rng, 2);
  const EStepStats s = e_step(t, {p}, Eigen::VectorXd::Ones(1), EStepMode::OmegaOnly);
  const MStepResult m = m_step(t, s, {p});
  EXPECT_LT((m.models[0].mu() - t.rowwise().mean()).norm(), 1e-12);
  EXPECT_LT(m.models[0].beta().norm(), 1e-12);
  EXPECT_NEAR(m.priors(0), 1.0, 1e-15);
}

TEST(MStep, ScatterFloorAddsRidge) {
  Rng rng = make_rng(8);
  const Eigen::MatrixXd t = random_points(rng, 2, 50);
  const GHParams p = random_params(rng, 2);
  const EStepStats s = e_step(t, {p}, Eigen::VectorXd::Ones(1), EStepMode::OmegaOnly);
  const GHParams plain = m_step_component(t, s, 0, p);
  const GHParams ridged = m_step_component(t, s, 0, p, 0.5);
  EXPECT_LT((ridged.scatter() - plain.scatter() - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-12);
}

TEST(MStep, EmptyComponentIsDegenerate) {
  Rng rng = make_rng(9);
  const Eigen::MatrixXd t = random_points(rng, 2, 20);
  const GHParams p = random_params(rng, 2);
  EStepStats s = e_step(t, {p, p}, Eigen::VectorXd::Constant(2, 0.5));
  s.z.col(1).setZero();
  s.z.col(0).setOnes();
  s.n << 20.0, 0.0;
  EXPECT_THROW(m_step_component(t, s, 1, p), DegenerateComponentError);
}

TEST(CheckPd, Examples) {
  EXPECT_TRUE(check_pd(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_FALSE(check_pd(Eigen::Vector2d(1.0, -1.0).asDiagonal().toDenseMatrix()));
  Rng rng = make_rng(10);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd x = random_points(rng, 4, 1, 1.0).col(0);
    EXPECT_TRUE(check_pd(x * x.transpose() + 1e-6 * Eigen::MatrixXd::Identity(4, 4)));
  }
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
  asym(0, 1) = 1e-3;
  EXPECT_THROW(check_pd(asym), UsageError);
  EXPECT_THROW(check_pd(Eigen::MatrixXd::Identity(2, 3)), UsageError);
}

TEST(CommunityNll, SingleComponentEqualsSumOfLogPdf) {
  Rng rng = make_rng(11);
  const Eigen::MatrixXd t = random_points(rng, 2, 15);
  const GHParams p = random_params(rng, 2);
  double want = 0.0;
  for (int i = 0; i < 15; ++i) want -= gh_logpdf(t.col(i), p);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(15, 1);
  EXPECT_NEAR(community_nll(t, ones, {p}), want, 1e-10 * std::abs(want));
  EXPECT_NEAR(community_nll_upper(t, ones, {p}), want, 1e-10 * std::abs(want));
}

TEST(CommunityNll, MatchesDirectSummation) {
  Rng rng = make_rng(12);
  const Eigen::MatrixXd t = random_points(rng, 2, 10);
  const std::vector<GHParams> models = {random_params(rng, 2), random_params(rng, 2)};
  const Eigen::MatrixXd w = random_weights(rng, 10, 2);
  double want = 0.0;
  for (int i = 0; i < 10; ++i) {
    double mix = 0.0;
    for (int p = 0; p < 2; ++p) mix += w(i, p) * std::exp(gh_logpdf(t.col(i), models[static_cast<std::size_t>(p)]));
    want -= std::log(mix);
  }
  EXPECT_NEAR(community_nll(t, w, models), want, 1e-10);
}

TEST(CommunityNll, ZeroMembershipComponentIsInert) {
  Rng rng = make_rng(13);
  const Eigen::MatrixXd t = random_points(rng, 2, 12);
  const std::vector<GHParams> two = {random_params(rng, 2), random_params(rng, 2)};
  const Eigen::MatrixXd w = random_weights(rng, 12, 2);
  std::vector<GHParams> three = two;
  three.push_back(random_params(rng, 2));
  Eigen::MatrixXd w3 = Eigen::MatrixXd::Zero(12, 3);
  w3.leftCols(2) = w;
  EXPECT_EQ(community_nll(t, w3, three), community_nll(t, w, two));
}

TEST(CommunityNll, JensenSandwich) {
  Rng rng = make_rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int c = 1 + trial % 4;
    const Eigen::MatrixXd t = random_points(rng, 3, 20);
    std::vector<GHParams> models;
    for (int p = 0; p < c; ++p) models.push_back(random_params(rng, 3));
    const Eigen::MatrixXd w = random_weights(rng, 20, c);
    EXPECT_LE(community_nll(t, w, models), community_nll_upper(t, w, models) + 1e-9);
  }
}

TEST(CommunityNll, OneHotRowsAreTight) {
  Rng rng = make_rng(15);
  const Eigen::MatrixXd t = random_points(rng, 2, 10);
  const std::vector<GHParams> models = {random_params(rng, 2), random_params(rng, 2)};
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(10, 2);
  for (int i = 0; i < 10; ++i) w(i, i % 2) = 1.0;
  EXPECT_NEAR(community_nll(t, w, models), community_nll_upper(t, w, models), 1e-10);
}

TEST(EM, ScatterStaysPositiveDefinite) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng = make_rng(seed, 50);
    const Eigen::MatrixXd t = two_clusters(rng, 100);
    MixtureOptions opt;
    opt.components = 2;
    CommunityModel m = CommunityModel::initialize(t, opt, rng);
    for (int it = 0; it < 20; ++it) {
      EXPECT_EQ(m.fit(t, 1, EStepMode::OmegaOnly, rng), 0);
      for (const auto& c : m.components()) ASSERT_TRUE(check_pd(c.scatter()));
    }
  }
}

TEST(EM, ConditionalModeIsMonotone) {
  Rng rng = make_rng(16);
  const Eigen::MatrixXd t = two_clusters(rng, 120);
  MixtureOptions opt;
  opt.components = 2;
  opt.mode = EStepMode::Conditional;
  CommunityModel m = CommunityModel::initialize(t, opt, rng);
  double last = mixture_nll(t, m.membership().priors, m.components());
  for (int it = 0; it < 40; ++it) {
    ASSERT_EQ(m.fit(t, 1, EStepMode::Conditional, rng), 0);
    const double now = mixture_nll(t, m.membership().priors, m.components());
    EXPECT_LE(now, last + 1e-8) << "iteration " << it;
    last = now;
  }
}

TEST(EM, RecoversClusters) {
  Rng rng = make_rng(17);
  const Eigen::MatrixXd t = two_clusters(rng, 150);
  MixtureOptions opt;
  opt.components = 2;
  CommunityModel m = CommunityModel::initialize(t, opt, rng);
  m.fit(t, 30, EStepMode::OmegaOnly, rng);
  int agree = 0;
  const int first = m.membership().argmax(0);
  for (int i = 0; i < 300; ++i) agree += (m.membership().argmax(i) == first) == (i < 150);
  EXPECT_GE(agree, 297);
}

TEST(EM, SingleComponentLocationRecovery) {
  Rng rng = make_rng(18);
  const Eigen::VectorXd mu_star = v2(0.2, 0.1);
  const Eigen::MatrixXd scatter = (Eigen::Matrix2d() << 0.004, 0.001, 0.001, 0.002).finished();
  const Eigen::MatrixXd t = testsupport::sample_gh(mu_star, scatter, v2(0.01, -0.005), 1.0, 1.0, 500, rng);
  for (EStepMode mode : {EStepMode::Conditional, EStepMode::OmegaOnly}) {
    MixtureOptions opt;
    opt.components = 1;
    Rng fit_rng = make_rng(1);
    CommunityModel m = CommunityModel::initialize(t, opt, fit_rng);
    m.fit(t, 50, mode, fit_rng);
    EXPECT_LT((m.components()[0].mu() - mu_star).norm(), 0.05) << to_string(mode);
  }
}

TEST(EM, DegenerateComponentIsReset) {
  // Three components over data with two clusters: an extra component seeded
  // far away collects no mass and must be re-initialized, not crash.
  Rng rng = make_rng(19);
  const Eigen::MatrixXd t = two_clusters(rng, 60);
  const Eigen::MatrixXd s = 0.002 * Eigen::MatrixXd::Identity(2, 2);
  std::vector<GHParams> comps = {GHParams(v2(0.3, 0.1), s, v2(0, 0), 1.0, 1.0),
                                 GHParams(v2(-0.2, -0.3), s, v2(0, 0), 1.0, 1.0),
                                 GHParams(v2(0.9, 0.9), 1e-6 * Eigen::MatrixXd::Identity(2, 2), v2(0, 0), 1.0, 1.0)};
  Membership mem;
  mem.priors = Eigen::Vector3d(0.45, 0.45, 0.1);
  mem.z = Eigen::MatrixXd::Constant(120, 3, 1.0 / 3.0);
  CommunityModel m(comps, mem);
  const int resets = m.fit(t, 3, EStepMode::OmegaOnly, rng);
  EXPECT_GE(resets, 1);
  EXPECT_NEAR(m.membership().priors.sum(), 1.0, 1e-12);
  for (const auto& c : m.components()) EXPECT_TRUE(check_pd(c.scatter()));
}

TEST(EStepMode, Names) {
  for (EStepMode m : {EStepMode::Conditional, EStepMode::OmegaOnly, EStepMode::OmegaOnlySwapped}) {
    EXPECT_EQ(parse_estep_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_estep_mode("paper"), UsageError);
}
