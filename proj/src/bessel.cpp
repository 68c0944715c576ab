#include "hypalign/bessel.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hypalign/error.hpp"

namespace hypalign {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

// Taylor coefficients of 1/Gamma(z) (Abramowitz & Stegun 6.1.34), c_1 .. c_16.
constexpr double kRecipGamma[] = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
};

// (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) for |mu| <= 1/2.
double gamma_odd_part(double mu, double recip_minus, double recip_plus) {
  if (std::abs(mu) > 0.1) return (recip_minus - recip_plus) / (2.0 * mu);
  // -(c_2 + c_4 mu^2 + c_6 mu^4 + ...)
  const double mu2 = mu * mu;
  double sum = 0.0;
  double power = 1.0;
  for (int k = 2; k <= 16; k += 2) {
    sum += kRecipGamma[k - 1] * power;
    power *= mu2;
  }
  return -sum;
}

struct ScaledPair {
  double log_scale;  // log K_mu
  double ratio;      // K_{mu+1} / K_mu
};

// K_mu and K_{mu+1} for |mu| <= 1/2, x < 2: Temme's series.
ScaledPair temme_series(double mu, double x) {
  const double x2 = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  const double d = -std::log(x2);
  const double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const double gampl = 1.0 / std::tgamma(1.0 + mu);
  const double gammi = 1.0 / std::tgamma(1.0 - mu);
  const double gam1 = gamma_odd_part(mu, gammi, gampl);
  const double gam2 = 0.5 * (gammi + gampl);

  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  const double ee = std::exp(e);
  double p = 0.5 * ee / gampl;
  double q = 0.5 / (ee * gammi);
  double c = 1.0;
  const double dd = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i <= kMaxIter; ++i) {
    ff = (i * ff + p + q) / (i * i - mu2);
    c *= dd / i;
    p /= (i - mu);
    q /= (i + mu);
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - i * ff);
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return {std::log(sum), sum1 * (2.0 / x) / sum};
}

// K_mu and K_{mu+1} for |mu| <= 1/2, x >= 2: Steed's continued fraction CF2.
ScaledPair steed_cf2(double mu, double x) {
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h = a1 * h;
  const double log_kmu = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x - std::log(s);
  return {log_kmu, (mu + x + 0.5 - h) / x};
}

// log K_nu and K_{nu+1}/K_nu for nu >= 0.
ScaledPair log_k_with_ratio(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw NumericalError("Bessel K needs a positive finite argument, got " + std::to_string(x));
  }
  if (!std::isfinite(nu)) throw NumericalError("Bessel K order is not finite");
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  ScaledPair start = x < 2.0 ? temme_series(mu, x) : steed_cf2(mu, x);
  // Upward recurrence K_{m+1} = (2m/x) K_m + K_{m-1}, stable for K, tracked as
  // log K_m plus the running ratio K_{m+1}/K_m.
  double log_k = start.log_scale;
  double ratio = start.ratio;
  for (int i = 1; i <= nl; ++i) {
    log_k += std::log(ratio);
    ratio = 2.0 * (mu + i) / x + 1.0 / ratio;
  }
  return {log_k, ratio};
}

}  // namespace

double log_bessel_k(double nu, double x) { return log_k_with_ratio(std::abs(nu), x).log_scale; }

double bessel_k(double nu, double x) { return std::exp(log_bessel_k(nu, x)); }

double bessel_k_ratio(double nu, double x) {
  if (nu >= 0.0) return log_k_with_ratio(nu, x).ratio;
  // K_{nu+1}/K_nu = K_{|nu|-1}/K_{|nu|}.
  return std::exp(log_bessel_k(nu + 1.0, x) - log_bessel_k(nu, x));
}

double log_bessel_k_dorder(double nu, double x) {
  return (log_bessel_k(nu + kOrderStep, x) - log_bessel_k(nu - kOrderStep, x)) / (2.0 * kOrderStep);
}

double bessel_k_dorder(double nu, double x) {
  return bessel_k(nu, x) * log_bessel_k_dorder(nu, x);
}

}  // namespace hypalign
