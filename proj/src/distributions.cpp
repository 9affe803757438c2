#include "infsamp/distributions.hpp"

#include "infsamp/error.hpp"

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace infsamp {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;
constexpr double log_sqrt_2pi = 0.91893853320467274178;
// Below this survival probability the plain erfc route is abandoned for log-domain arithmetic.
constexpr double tail_underflow = 1e-290;
constexpr double narrow_width = 1e-7;
// Double-precision evaluation; the default policy promotes to long double, which is much slower.
using quantile_policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

double log_norm_pdf(double x) { return -0.5 * x * x - log_sqrt_2pi; }

// Quantile of the standard normal truncated to [a, b] with 0 <= a < b.
double upper_tail_quantile(double a, double b, double u) {
    const double qa = norm_sf(a);
    if (qa > tail_underflow) {
        const double mass = norm_interval_prob(a, b);
        const double q = qa - u * mass;
        if (!(q > 0.0)) return b;
        return -norm_quantile(q);
    }
    const double la = log_norm_sf(a);
    const double lb = std::isinf(b) ? -std::numeric_limits<double>::infinity() : log_norm_sf(b);
    const double frac = -std::expm1(lb - la);
    const double target = la + std::log1p(-u * frac);
    double x = a;
    for (int it = 0; it < 60; ++it) {
        const double lq = log_norm_sf(x);
        const double slope = -std::exp(log_norm_pdf(x) - lq);
        const double step = (lq - target) / slope;
        x -= step;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

} // namespace

double norm_pdf(double x) { return std::exp(log_norm_pdf(x)); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * inv_sqrt2); }

double norm_sf(double x) { return 0.5 * std::erfc(x * inv_sqrt2); }

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw DomainError("norm_quantile: p outside [0, 1]");
    }
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p, quantile_policy());
}

double log_norm_sf(double x) {
    if (x < 35.0) {
        if (x < -5.0) return std::log1p(-norm_cdf(x));
        return std::log(norm_sf(x));
    }
    // Asymptotic (Mills ratio) expansion; relative error below 1e-13 for x >= 35.
    const double r = 1.0 / (x * x);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    return log_norm_pdf(x) - std::log(x) + std::log(series);
}

double log_norm_cdf(double x) { return log_norm_sf(-x); }

double norm_interval_prob(double a, double b) {
    if (!(a < b)) return 0.0;
    const double w = b - a;
    if (w < narrow_width) {
        const double m = 0.5 * (a + b);
        return norm_pdf(m) * w * (1.0 + (m * m - 1.0) * w * w / 24.0);
    }
    if (a >= 0.0) return norm_sf(a) - norm_sf(b);
    if (b <= 0.0) return norm_cdf(b) - norm_cdf(a);
    return 1.0 - norm_cdf(a) - norm_sf(b);
}

double log_norm_interval_prob(double a, double b) {
    if (!(a < b)) return -std::numeric_limits<double>::infinity();
    const double w = b - a;
    if (w < narrow_width) {
        const double m = 0.5 * (a + b);
        return log_norm_pdf(m) + std::log(w) + std::log1p((m * m - 1.0) * w * w / 24.0);
    }
    if (b <= 0.0) return log_norm_interval_prob(-b, -a);
    if (a >= 0.0) {
        const double la = log_norm_sf(a);
        if (std::isinf(b)) return la;
        const double lb = log_norm_sf(b);
        return la + std::log(-std::expm1(lb - la));
    }
    return std::log(norm_interval_prob(a, b));
}

double truncated_normal_quantile(double a, double b, double u) {
    if (!(a < b)) return a;
    u = std::clamp(u, 0.0, 1.0);
    double x;
    if (b - a < narrow_width) {
        x = a + u * (b - a);
    } else if (a >= 0.0) {
        x = upper_tail_quantile(a, b, u);
    } else if (b <= 0.0) {
        x = -upper_tail_quantile(-b, -a, 1.0 - u);
    } else {
        const double mass = norm_interval_prob(a, b);
        const double p = norm_cdf(a) + u * mass;
        if (p <= 0.5) {
            x = norm_quantile(p);
        } else {
            const double q = norm_sf(b) + (1.0 - u) * mass;
            x = q > 0.0 ? -norm_quantile(q) : b;
        }
    }
    return std::clamp(x, a, b);
}

double sample_truncated_normal(double mean, double sd, double lo, double hi, RandomStream& rng) {
    if (!(sd > 0.0)) throw DomainError("sample_truncated_normal: sd must be positive");
    if (!(lo < hi)) throw ConstraintViolation("sample_truncated_normal: empty interval (lo >= hi)");
    const double a = (lo - mean) / sd;
    const double b = (hi - mean) / sd;
    if (a < -1.0 && b > 1.0) {
        // At least 68% of the mass is inside: plain rejection is cheaper than the quantile route.
        for (;;) {
            const double x = rng.normal();
            if (x >= a && x <= b) return mean + sd * x;
        }
    }
    const double x = truncated_normal_quantile(a, b, rng.uniform());
    return std::clamp(mean + sd * x, lo, hi);
}

double sample_inverse_gamma(double shape, double scale, RandomStream& rng) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw DomainError("sample_inverse_gamma: shape and scale must be positive");
    return scale / rng.gamma(shape);
}

Eigen::MatrixXd StructuredCovariance::dense() const {
    const auto mi = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(mi, mi, covariance());
    s.diagonal().setConstant(variance());
    return s;
}

Eigen::MatrixXd StructuredCovariance::precision() const {
    const auto mi = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd p = Eigen::MatrixXd::Constant(mi, mi, 1.0 / sigmaE2);
    p.diagonal().setConstant(2.0 / sigmaE2);
    return p;
}

Eigen::MatrixXd StructuredCovariance::cholesky() const {
    const auto mi = static_cast<Eigen::Index>(m);
    const double v = variance();
    const double c = covariance();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(mi, mi);
    double s = 0.0;
    for (Eigen::Index j = 0; j < mi; ++j) {
        const double d = std::sqrt(v - s);
        const double below = (c - s) / d;
        L(j, j) = d;
        for (Eigen::Index k = j + 1; k < mi; ++k) L(k, j) = below;
        s += below * below;
    }
    return L;
}

double StructuredCovariance::log_det() const {
    return static_cast<double>(m) * std::log(sigmaE2) - std::log(static_cast<double>(m + 1));
}

} // namespace infsamp
