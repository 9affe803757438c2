#pragma once

#include "infsamp/random.hpp"

#include <Eigen/Core>

#include <cstddef>

namespace infsamp {

// Standard normal helpers.  The tail forms use erfc so that values far into either tail keep
// full relative precision.
double norm_pdf(double x);
double norm_cdf(double x);
double norm_sf(double x);
double norm_quantile(double p);
double log_norm_sf(double x);
double log_norm_cdf(double x);

/// P(a <= Z <= b) for standard normal Z, accurate when [a, b] lies in a tail or is very narrow.
double norm_interval_prob(double a, double b);
double log_norm_interval_prob(double a, double b);

/** Quantile of the standard normal truncated to [a, b] at probability u in [0, 1].
 *
 * Works from the survival function when the interval lies in the upper tail (and by reflection in
 * the lower tail), and falls back to a log-domain Newton inversion once the tail probability
 * underflows.  The result is clamped to [a, b].
 */
double truncated_normal_quantile(double a, double b, double u);

/// Draw from N(mean, sd^2) conditioned on [lo, hi].  Infinite bounds are allowed.
double sample_truncated_normal(double mean, double sd, double lo, double hi, RandomStream& rng);

/// Inverse-gamma with density proportional to x^{-shape-1} exp(-scale/x).
double sample_inverse_gamma(double shape, double scale, RandomStream& rng);

/** Covariance whose precision is (I_m + 1 1') / sigmaE2.
 *
 * This is the structure of both the conditional covariance of the non-sampled z block and the
 * covariance of the Gaussian kernel in the normalisation constant.  Closed forms:
 * Sigma = sigmaE2 (I - J/(m+1)), det Sigma = sigmaE2^m / (m+1).
 */
struct StructuredCovariance {
    std::size_t m = 1;
    double sigmaE2 = 1.0;

    Eigen::MatrixXd dense() const;
    Eigen::MatrixXd precision() const;
    /// Lower Cholesky factor by the O(m) closed-form recurrence (all sub-diagonal entries of a
    /// column are equal).
    Eigen::MatrixXd cholesky() const;
    double log_det() const;
    double variance() const { return sigmaE2 * static_cast<double>(m) / static_cast<double>(m + 1); }
    double covariance() const { return -sigmaE2 / static_cast<double>(m + 1); }
};

} // namespace infsamp
