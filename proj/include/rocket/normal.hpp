#pragma once

namespace rocket::stats {

// Standard normal CDF. Evaluated through Cody's rational-Chebyshev erfc
// (W. J. Cody, "Rational Chebyshev approximation for the error function",
// Math. Comp. 23, 1969), absolute error well below 1e-15. Used instead of
// std::erfc so results are bit-stable across libm implementations.
double norm_cdf(double z);

// Standard normal quantile, Wichura's algorithm AS241 (PPND16),
// Appl. Statist. 37(3), 1988. Absolute error ~1e-15 on (0,1).
// Returns -inf / +inf at p = 0 / 1.
double norm_quantile(double p);

// Upper-tail quantile z_{alpha/2} used by two-sided intervals:
// P{N(0,1) > z} = alpha/2.
double two_sided_quantile(double alpha);

// Two-sided p-value 2 - 2*Phi(|z|).
double two_sided_pvalue(double z);

} // namespace rocket::stats
