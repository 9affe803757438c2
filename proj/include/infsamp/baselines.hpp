#pragma once

#include "infsamp/gibbs.hpp"
#include "infsamp/model.hpp"
#include "infsamp/random.hpp"
#include "infsamp/sir.hpp"

#include <cstddef>
#include <vector>

namespace infsamp {

/// Systematic probability-proportional-to-size sample of n distinct units (sorted indices into nu).
std::vector<std::size_t> systematic_pps(const Vector& nu, std::size_t n, RandomStream& rng);

enum class HtInterval {
    /// Estimate +- z * sqrt(v).
    Rooted,
    /// Estimate +- z * v, the unrooted form.
    Literal,
};

struct HTResult {
    double total_hat = 0.0;
    double var_hat = 0.0;
    IntervalEstimate ci;
    /// Total-scale results divided by N.
    double mean_hat = 0.0;
    IntervalEstimate mean_ci;
};

HTResult ht_estimate(const Vector& y_s, const Vector& nu_s, double t, std::size_t N, double level = 0.95,
                     HtInterval form = HtInterval::Rooted);

struct IgResult {
    std::vector<double> ybar_draws;
    std::vector<double> ey_draws;
    Summary ybar;
    Summary ey;
};

/// Ignorable-model posterior: noninformative conjugate normal on the Gaussian scale of y_s, then
/// predictive draws for the N - n non-sampled responses.
IgResult ig_infer(const Vector& y_s, std::size_t N, std::size_t M0, double level, ModelVariant variant, RandomStream& rng);

} // namespace infsamp
