#include "infsamp/sir.hpp"

#include "infsamp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace infsamp {

WeightedDraws compute_weights(const std::vector<double>& log_c) {
    if (log_c.empty()) throw ConstraintViolation("compute_weights: no draws");
    WeightedDraws wd;
    const auto M = static_cast<Eigen::Index>(log_c.size());
    wd.log_weights.resize(M);
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < M; ++k) {
        const double lc = log_c[static_cast<std::size_t>(k)];
        if (std::isnan(lc) || lc == std::numeric_limits<double>::infinity())
            throw NumericalFault("compute_weights: log constant is NaN or +inf at draw " + std::to_string(k));
        // A draw whose constant is zero had no feasible mass; it gets weight zero.
        wd.log_weights[k] = lc == -std::numeric_limits<double>::infinity() ? -std::numeric_limits<double>::infinity() : -lc;
        mx = std::max(mx, wd.log_weights[k]);
    }
    if (mx == -std::numeric_limits<double>::infinity()) throw NumericalFault("compute_weights: all weights are zero");
    // Scalar exp: Eigen's vectorised exp clamps its argument and turns -inf into a denormal.
    wd.normalized.resize(M);
    for (Eigen::Index k = 0; k < M; ++k) wd.normalized[k] = std::exp(wd.log_weights[k] - mx);
    wd.normalized /= wd.normalized.sum();
    wd.ess = 1.0 / wd.normalized.squaredNorm();
    wd.positive = static_cast<std::size_t>((wd.normalized.array() > 0.0).count());
    return wd;
}

WeightedDraws compute_weights(const std::vector<ConstantEstimate>& constants) {
    std::vector<double> lc(constants.size());
    for (std::size_t k = 0; k < constants.size(); ++k) lc[k] = constants[k].log_c;
    return compute_weights(lc);
}

std::vector<std::size_t> resample_without_replacement(const WeightedDraws& wd, std::size_t M0, RandomStream& rng) {
    if (M0 > wd.positive)
        throw ConstraintViolation("resample_without_replacement: M0 = " + std::to_string(M0) + " exceeds the " +
                                  std::to_string(wd.positive) + " draws with positive weight");
    std::vector<std::pair<double, std::size_t>> keys;
    keys.reserve(wd.positive);
    for (Eigen::Index k = 0; k < wd.normalized.size(); ++k) {
        if (!(wd.normalized[k] > 0.0)) continue;
        const double e = -std::log(rng.uniform());
        keys.emplace_back(std::log(e) - wd.log_weights[k], static_cast<std::size_t>(k));
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(M0), keys.end());
    std::vector<std::size_t> out(M0);
    for (std::size_t j = 0; j < M0; ++j) out[j] = keys[j].second;
    return out;
}

Summary summarize(std::vector<double> samples, double level) {
    if (samples.empty()) throw ConstraintViolation("summarize: no samples");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("summarize: level must be in (0, 1)");
    std::sort(samples.begin(), samples.end());
    const std::size_t M = samples.size();
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(M);
    const std::size_t k = std::min<std::size_t>(M, static_cast<std::size_t>(std::ceil(level * static_cast<double>(M) - 1e-9)));

    Summary s;
    // Equal-tail window: centred among the M - k excluded order statistics.
    const std::size_t start = (M - k) / 2;
    s.equal_tail = {mean, samples[start], samples[start + k - 1], IntervalKind::EqualTail, level};

    // Shortest window of the same size; ties keep the earliest.
    std::size_t best = start;
    double best_width = samples[start + k - 1] - samples[start];
    for (std::size_t i = 0; i + k <= M; ++i) {
        const double w = samples[i + k - 1] - samples[i];
        if (w < best_width) {
            best_width = w;
            best = i;
        }
    }
    s.hpd = {mean, samples[best], samples[best + k - 1], IntervalKind::HPD, level};
    return s;
}

double expected_response(double mu, double sigma2, ModelVariant variant) {
    return variant == ModelVariant::LognormalY ? std::exp(mu + 0.5 * sigma2) : mu;
}

Functionals finite_population_functionals(const GibbsDraw& draw, const ObservedData& data, ModelVariant variant) {
    const double total = data.y_s.sum() + draw.y_ns.sum();
    return {total / static_cast<double>(data.N), expected_response(draw.mu, draw.sigma2, variant)};
}

} // namespace infsamp
