#pragma once

#include "infsamp/model.hpp"
#include "infsamp/mvn.hpp"
#include "infsamp/random.hpp"

#include <cstddef>

namespace infsamp {

struct NormConstConfig {
    MvnOptions mvn;
    /// Inner single-site Gibbs on the box, used for the sum-constraint proportion.
    std::size_t r2_burn_in = 200;
    std::size_t r2_draws = 1000;
};

/** Log of the normalisation constant of the restricted Gaussian in z, split into its factors.
 *
 * log_c = log_prefactor + log_c0_closed + log_r1_prob + log(r2_proportion), and
 * log_c0 = log_c0_closed + log_r1_prob.
 */
struct ConstantEstimate {
    double log_c = 0.0;
    double log_prefactor = 0.0;
    double log_c0_closed = 0.0;
    double log_c0 = 0.0;
    double log_r1_prob = 0.0;
    double r2_proportion = 1.0;
    /// Standard error of log_c (box probability and proportion errors in quadrature).
    double mc_error = 0.0;
    std::size_t inner_draws = 0;
    /// Some factor was zero (log_c = -inf) or the box probability was degenerate.
    bool flagged = false;
    bool mvn_unconverged = false;
};

/// mu'_i = theta_i - mean(theta), i < N.
Vector mu_prime(const Vector& theta);

struct C0Estimate {
    double closed = 0.0;
    double log_r1_prob = 0.0;
    double value = 0.0;
    double error = 0.0;
    bool degenerate = false;
    bool unconverged = false;
};

/// Gaussian integral of the kernel over the box -t/N <= z_i <= t/n - t/N, i < N.
C0Estimate log_c0(const Vector& theta, double sigmaE2, double t, std::size_t n, std::size_t N, const MvnOptions& opt,
                  RandomStream& rng);

struct ProportionEstimate {
    double value = 1.0;
    /// Batch-means standard error.
    double error = 0.0;
    std::size_t draws = 0;
};

/// Fraction of box-restricted Gaussian draws whose coordinate sum lies in [region.sum_lo, region.sum_hi].
ProportionEstimate r2_proportion(const Vector& theta, double sigmaE2, const ConstraintRegion& region, std::size_t burn_in,
                                 std::size_t draws, RandomStream& rng);

/// theta_i = beta0 + beta1 * y_i over all N units; returns log C for the SIR weight.
ConstantEstimate log_C(const Vector& y, double beta0, double beta1, double sigmaE2, double t, std::size_t n, std::size_t N,
                       const NormConstConfig& cfg, RandomStream& rng);

} // namespace infsamp
