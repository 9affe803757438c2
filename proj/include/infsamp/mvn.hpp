#pragma once

#include "infsamp/distributions.hpp"
#include "infsamp/random.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <variant>

namespace infsamp {

/// Quasi-Monte Carlo settings for rectangle probabilities.
struct MvnOptions {
    /// Number of independent random shifts; the spread across them gives the error estimate.
    std::size_t randomizations = 8;
    /// Lattice points per randomization in the first pass (doubled until the target is met).
    std::size_t initial_points = 64;
    /// Cap on integrand evaluations summed over all randomizations.
    std::size_t max_points = 1u << 16;
    double target_error = 1e-6;
    /// When true, target_error is relative to the estimate.
    bool relative_target = true;
    /// Sort variables by ascending marginal interval probability before conditioning.
    bool reorder = true;
};

/** P(lo <= X <= hi) for X ~ N(mean, covariance).
 *
 * The covariance is either the structured matrix used throughout the model (conditioned in O(m)
 * per point) or a general dense matrix (conditioned through its Cholesky factor).
 */
struct RectangleProblem {
    Eigen::VectorXd mean;
    std::variant<StructuredCovariance, Eigen::MatrixXd> covariance;
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    MvnOptions options;

    std::size_t dimension() const { return static_cast<std::size_t>(mean.size()); }
};

struct MvnResult {
    double prob = 0.0;
    /// One standard error of `prob`.
    double error = 0.0;
    double log_prob = 0.0;
    /// Standard error propagated to the log scale (relative error of `prob`).
    double log_error = 0.0;
    std::size_t points = 0;
    /// Target not reached within max_points.
    bool unconverged = false;
    /// The estimate is zero or numerically degenerate.
    bool degenerate = false;
};

MvnResult mvn_rectangle_prob(const RectangleProblem& problem, RandomStream& rng);

/// Same computation as mvn_rectangle_prob; named for call sites that only use the log fields.
inline MvnResult log_mvn_rectangle_prob(const RectangleProblem& problem, RandomStream& rng) {
    return mvn_rectangle_prob(problem, rng);
}

} // namespace infsamp
