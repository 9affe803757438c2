#pragma once

#include "infsamp/gibbs.hpp"
#include "infsamp/model.hpp"
#include "infsamp/normconst.hpp"
#include "infsamp/random.hpp"

#include <cstddef>
#include <vector>

namespace infsamp {

/// Importance weights proportional to 1/C for a set of Gibbs draws.
struct WeightedDraws {
    /// -log_c, unnormalised.
    Vector log_weights;
    /// Sums to one; zero where log_c was -inf.
    Vector normalized;
    /// 1 / sum(w^2).
    double ess = 0.0;
    std::size_t positive = 0;
};

WeightedDraws compute_weights(const std::vector<double>& log_c);
WeightedDraws compute_weights(const std::vector<ConstantEstimate>& constants);

/** Indices of M0 draws taken without replacement, each pick proportional to the remaining weights.
 *
 * Uses exponential keys log(E_k) - log(w_k): the M0 smallest keys have the same law as sequential
 * draw-and-renormalise.  The returned order is the order of selection.
 */
std::vector<std::size_t> resample_without_replacement(const WeightedDraws& wd, std::size_t M0, RandomStream& rng);

enum class IntervalKind { EqualTail, HPD };

struct IntervalEstimate {
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    IntervalKind kind = IntervalKind::EqualTail;
    double level = 0.95;

    double width() const { return hi - lo; }
    bool covers(double x) const { return lo <= x && x <= hi; }
};

struct Summary {
    IntervalEstimate equal_tail;
    IntervalEstimate hpd;
};

/// Point = sample mean.  Both intervals span ceil(level * M) order statistics.
Summary summarize(std::vector<double> samples, double level = 0.95);

struct Functionals {
    double ybar;
    double ey;
};

/// Finite-population mean and superpopulation mean of the response for one draw.
Functionals finite_population_functionals(const GibbsDraw& draw, const ObservedData& data, ModelVariant variant);

/// Superpopulation mean of Y implied by (mu, sigma2) under the given variant.
double expected_response(double mu, double sigma2, ModelVariant variant);

} // namespace infsamp
