#pragma once
// Shared test helpers: KS statistics against analytic or grid CDFs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double ks_stat(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return d;
}

// 1% critical value of the one-sample KS statistic.
inline double ks_crit(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

/// CDF of an unnormalised log-density on [lo, hi], tabulated by the trapezoid rule.
class GridCdf {
public:
    GridCdf(const std::function<double(double)>& log_density, double lo, double hi, std::size_t cells = 200000)
        : lo_(lo), h_((hi - lo) / static_cast<double>(cells)), cum_(cells + 1, 0.0) {
        std::vector<double> lv(cells + 1);
        double mx = -INFINITY;
        for (std::size_t i = 0; i <= cells; ++i) {
            lv[i] = log_density(lo + h_ * static_cast<double>(i));
            mx = std::max(mx, lv[i]);
        }
        for (std::size_t i = 1; i <= cells; ++i)
            cum_[i] = cum_[i - 1] + 0.5 * h_ * (std::exp(lv[i - 1] - mx) + std::exp(lv[i] - mx));
        for (auto& c : cum_) c /= cum_.back();
    }

    double operator()(double x) const {
        const double pos = (x - lo_) / h_;
        if (pos <= 0.0) return 0.0;
        const auto i = static_cast<std::size_t>(pos);
        if (i + 1 >= cum_.size()) return 1.0;
        const double f = pos - static_cast<double>(i);
        return cum_[i] + f * (cum_[i + 1] - cum_[i]);
    }

private:
    double lo_, h_;
    std::vector<double> cum_;
};

} // namespace oracle
