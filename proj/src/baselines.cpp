#include "infsamp/baselines.hpp"

#include "infsamp/distributions.hpp"
#include "infsamp/error.hpp"

#include <algorithm>
#include <cmath>

namespace infsamp {

std::vector<std::size_t> systematic_pps(const Vector& nu, std::size_t n, RandomStream& rng) {
    const auto N = static_cast<std::size_t>(nu.size());
    if (n == 0 || n > N) throw ConstraintViolation("systematic_pps: need 1 <= n <= N");
    if ((nu.array() <= 0.0).any()) throw ConstraintViolation("systematic_pps: sizes must be positive");
    const double t = nu.sum();
    const double skip = t / static_cast<double>(n);
    if (n < N)
        for (std::size_t i = 0; i < N; ++i)
            if (nu[static_cast<Eigen::Index>(i)] >= skip)
                throw InfeasibleDesign("systematic_pps: unit " + std::to_string(i) + " is a certainty unit");
    if (n == N) {
        std::vector<std::size_t> all(N);
        for (std::size_t i = 0; i < N; ++i) all[i] = i;
        return all;
    }

    const double start = skip * rng.uniform();
    std::vector<std::size_t> out;
    out.reserve(n);
    double cum = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < N && k < n; ++i) {
        const double next = cum + nu[static_cast<Eigen::Index>(i)];
        // Unit i owns the half-open interval [cum, next).
        while (k < n && start + static_cast<double>(k) * skip < next) {
            out.push_back(i);
            ++k;
        }
        cum = next;
    }
    // Rounding can leave the last point just past the final cumulative size.
    while (out.size() < n) out.push_back(N - 1);
    return out;
}

HTResult ht_estimate(const Vector& y_s, const Vector& nu_s, double t, std::size_t N, double level, HtInterval form) {
    const auto n = static_cast<std::size_t>(y_s.size());
    if (n < 2) throw ConstraintViolation("ht_estimate: variance needs n >= 2");
    if (nu_s.size() != y_s.size()) throw ConstraintViolation("ht_estimate: length mismatch");
    if ((nu_s.array() <= 0.0).any()) throw ConstraintViolation("ht_estimate: sizes must be positive");
    const double nd = static_cast<double>(n);
    const Vector ratio = y_s.array() / (nu_s.array() / t);
    HTResult r;
    r.total_hat = ratio.sum() / nd;
    r.var_hat = (ratio.array() - r.total_hat).square().sum() / (nd * (nd - 1.0));
    const double z = -norm_quantile(0.5 * (1.0 - level));
    const double half = z * (form == HtInterval::Rooted ? std::sqrt(r.var_hat) : r.var_hat);
    r.ci = {r.total_hat, r.total_hat - half, r.total_hat + half, IntervalKind::EqualTail, level};
    const double Nd = static_cast<double>(N);
    r.mean_hat = r.total_hat / Nd;
    // The mean interval rescales the total interval.
    r.mean_ci = {r.mean_hat, r.ci.lo / Nd, r.ci.hi / Nd, IntervalKind::EqualTail, level};
    return r;
}

IgResult ig_infer(const Vector& y_s, std::size_t N, std::size_t M0, double level, ModelVariant variant, RandomStream& rng) {
    const auto n = static_cast<std::size_t>(y_s.size());
    if (n < 3) throw ConstraintViolation("ig_infer: need n >= 3");
    if (n > N) throw ConstraintViolation("ig_infer: n exceeds N");
    if (M0 == 0) throw ConstraintViolation("ig_infer: need M0 >= 1");
    Vector w = y_s;
    if (variant == ModelVariant::LognormalY) {
        if ((y_s.array() <= 0.0).any()) throw DomainError("ig_infer: lognormal variant needs positive responses");
        w = y_s.array().log();
    }
    const double nd = static_cast<double>(n);
    const double wbar = w.mean();
    const double ss = (w.array() - wbar).square().sum();
    if (!(ss > 0.0)) throw NumericalFault("ig_infer: zero sample variance");

    IgResult r;
    r.ybar_draws.reserve(M0);
    r.ey_draws.reserve(M0);
    const double sum_s = y_s.sum();
    for (std::size_t k = 0; k < M0; ++k) {
        const double sigma2 = sample_inverse_gamma(0.5 * (nd - 1.0), 0.5 * ss, rng);
        const double mu = wbar + std::sqrt(sigma2 / nd) * rng.normal();
        double total = sum_s;
        for (std::size_t i = n; i < N; ++i) {
            const double wi = mu + std::sqrt(sigma2) * rng.normal();
            total += variant == ModelVariant::LognormalY ? std::exp(wi) : wi;
        }
        r.ybar_draws.push_back(total / static_cast<double>(N));
        r.ey_draws.push_back(expected_response(mu, sigma2, variant));
    }
    r.ybar = summarize(r.ybar_draws, level);
    r.ey = summarize(r.ey_draws, level);
    return r;
}

} // namespace infsamp
