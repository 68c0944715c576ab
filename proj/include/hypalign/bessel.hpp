#pragma once

namespace hypalign {

/// log K_nu(x), the modified Bessel function of the second kind, for real order
/// and x > 0. Evaluated in the log domain so that large orders and large
/// arguments neither overflow nor underflow.
double log_bessel_k(double nu, double x);

/// K_nu(x). May underflow to 0 or overflow to inf where log_bessel_k does not.
double bessel_k(double nu, double x);

/// K_{nu+1}(x) / K_nu(x).
double bessel_k_ratio(double nu, double x);

/// d/dnu log K_nu(x), central difference with step kOrderStep.
double log_bessel_k_dorder(double nu, double x);

/// d/dnu K_nu(x).
double bessel_k_dorder(double nu, double x);

inline constexpr double kOrderStep = 1e-5;

}  // namespace hypalign
