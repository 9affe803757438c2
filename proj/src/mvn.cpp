#include "infsamp/mvn.hpp"

#include "infsamp/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace infsamp {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
// Above this dimension the lattice is replaced by plain pseudo-random points.
constexpr std::size_t max_lattice_dim = 200;

const std::vector<double>& richtmyer_generators() {
    static const std::vector<double> gens = [] {
        std::vector<double> out;
        for (unsigned p = 2; out.size() < max_lattice_dim; ++p) {
            bool prime = true;
            for (unsigned d = 2; d * d <= p; ++d)
                if (p % d == 0) {
                    prime = false;
                    break;
                }
            if (prime) {
                const double s = std::sqrt(static_cast<double>(p));
                out.push_back(s - std::floor(s));
            }
        }
        return out;
    }();
    return gens;
}

// Standard normal tails are treated as exactly zero beyond this point.
constexpr double tail_cut = 38.0;

double cdf_or_zero(double x) { return x < -tail_cut ? 0.0 : norm_cdf(x); }
double sf_or_zero(double x) { return x > tail_cut ? 0.0 : norm_sf(x); }

struct StepResult {
    double prob;
    double x;
};

// Interval probability and truncated quantile from a single pair of tail evaluations.  Returns
// prob < 0 when the interval is narrow or deep in a tail, where the careful routines must be used.
StepResult fast_step(double a, double b, double w) {
    if (b - a < 1e-7) return {-1.0, 0.0};
    double p, x;
    if (a >= 0.0) {
        const double qa = sf_or_zero(a);
        const double qb = sf_or_zero(b);
        p = qa - qb;
        if (qa < 1e-280 || p <= 1e-10 * qa) return {-1.0, 0.0};
        x = -norm_quantile(qa - w * p);
    } else if (b <= 0.0) {
        const double pa = cdf_or_zero(a);
        const double pb = cdf_or_zero(b);
        p = pb - pa;
        if (pb < 1e-280 || p <= 1e-10 * pb) return {-1.0, 0.0};
        x = norm_quantile(pa + w * p);
    } else {
        const double pa = cdf_or_zero(a);
        const double qb = sf_or_zero(b);
        p = 1.0 - pa - qb;
        const double u = pa + w * p;
        x = u <= 0.5 ? norm_quantile(u) : -norm_quantile(qb + (1.0 - w) * p);
    }
    return {p, std::clamp(x, a, b)};
}

double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// Sequential conditioning of the permuted problem.  The integrand value at w in [0,1]^{m-1} is
// the product of the conditional interval probabilities.
class Integrand {
public:
    Integrand(const RectangleProblem& p, const std::vector<Eigen::Index>& order) : m_(static_cast<Eigen::Index>(order.size())) {
        mean_.resize(m_);
        lo_.resize(m_);
        hi_.resize(m_);
        for (Eigen::Index k = 0; k < m_; ++k) {
            mean_[k] = p.mean[order[k]];
            lo_[k] = p.lo[order[k]];
            hi_[k] = p.hi[order[k]];
        }
        if (const auto* sc = std::get_if<StructuredCovariance>(&p.covariance)) {
            structured_ = true;
            const double sigma_e = std::sqrt(sc->sigmaE2);
            cond_sd_.resize(m_);
            shrink_.resize(m_);
            for (Eigen::Index k = 0; k < m_; ++k) {
                const double r = static_cast<double>(m_ - k);
                cond_sd_[k] = sigma_e * std::sqrt(r / (r + 1.0));
                shrink_[k] = 1.0 / (r + 1.0);
            }
        } else {
            const auto& cov = std::get<Eigen::MatrixXd>(p.covariance);
            Eigen::MatrixXd permuted(m_, m_);
            for (Eigen::Index i = 0; i < m_; ++i)
                for (Eigen::Index j = 0; j < m_; ++j) permuted(i, j) = cov(order[i], order[j]);
            Eigen::LLT<Eigen::MatrixXd> llt(permuted);
            if (llt.info() != Eigen::Success) throw DecompositionError("mvn_rectangle_prob: covariance is not positive definite");
            chol_ = llt.matrixL();
            y_.resize(m_);
        }
    }

    double log_value(const double* w) {
        double logf = 0.0;
        // Running product, folded into logf before it can underflow.
        double prod = 1.0;
        double dev_sum = 0.0;
        for (Eigen::Index k = 0; k < m_; ++k) {
            double cm, sd;
            if (structured_) {
                cm = mean_[k] - dev_sum * shrink_[k];
                sd = cond_sd_[k];
            } else {
                cm = mean_[k] + chol_.row(k).head(k).dot(y_.head(k));
                sd = chol_(k, k);
            }
            const double a = (lo_[k] - cm) / sd;
            const double b = (hi_[k] - cm) / sd;
            const bool last = k + 1 == m_;
            auto step = fast_step(a, b, last ? 0.5 : w[k]);
            if (step.prob > 0.0) {
                prod *= step.prob;
                if (prod < 1e-250) {
                    logf += std::log(prod);
                    prod = 1.0;
                }
            } else {
                const double lp = log_norm_interval_prob(a, b);
                if (lp == neg_inf) return neg_inf;
                logf += lp;
                if (!last) step.x = truncated_normal_quantile(a, b, w[k]);
            }
            if (!last) {
                const double x = step.x;
                if (structured_)
                    dev_sum += cm + sd * x - mean_[k];
                else
                    y_[k] = x;
            }
        }
        return logf + std::log(prod);
    }

private:
    Eigen::Index m_;
    bool structured_ = false;
    Eigen::VectorXd mean_, lo_, hi_, y_, cond_sd_, shrink_;
    Eigen::MatrixXd chol_;
};

std::vector<Eigen::Index> variable_order(const RectangleProblem& p) {
    const auto m = static_cast<Eigen::Index>(p.dimension());
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (!p.options.reorder) return order;
    std::vector<double> marginal(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        double sd;
        if (const auto* sc = std::get_if<StructuredCovariance>(&p.covariance))
            sd = std::sqrt(sc->variance());
        else
            sd = std::sqrt(std::get<Eigen::MatrixXd>(p.covariance)(i, i));
        marginal[static_cast<std::size_t>(i)] = log_norm_interval_prob((p.lo[i] - p.mean[i]) / sd, (p.hi[i] - p.mean[i]) / sd);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return marginal[static_cast<std::size_t>(a)] < marginal[static_cast<std::size_t>(b)]; });
    return order;
}

void validate(const RectangleProblem& p) {
    const auto m = p.mean.size();
    if (m == 0) throw ConstraintViolation("mvn_rectangle_prob: empty problem");
    if (p.lo.size() != m || p.hi.size() != m) throw ConstraintViolation("mvn_rectangle_prob: bound length mismatch");
    for (Eigen::Index i = 0; i < m; ++i)
        if (!(p.lo[i] < p.hi[i])) throw ConstraintViolation("mvn_rectangle_prob: lo must be < hi componentwise");
    if (const auto* sc = std::get_if<StructuredCovariance>(&p.covariance)) {
        if (static_cast<Eigen::Index>(sc->m) != m) throw ConstraintViolation("mvn_rectangle_prob: covariance dimension mismatch");
        if (!(sc->sigmaE2 > 0.0)) throw DecompositionError("mvn_rectangle_prob: structured covariance needs sigmaE2 > 0");
    } else {
        const auto& cov = std::get<Eigen::MatrixXd>(p.covariance);
        if (cov.rows() != m || cov.cols() != m) throw ConstraintViolation("mvn_rectangle_prob: covariance dimension mismatch");
        if (!cov.isApprox(cov.transpose(), 1e-12)) throw DecompositionError("mvn_rectangle_prob: covariance is not symmetric");
    }
    if (p.options.randomizations < 2) throw ConstraintViolation("mvn_rectangle_prob: need at least two randomizations");
}

} // namespace

MvnResult mvn_rectangle_prob(const RectangleProblem& problem, RandomStream& rng) {
    validate(problem);
    const auto& opt = problem.options;
    const auto order = variable_order(problem);
    Integrand integrand(problem, order);
    const auto m = problem.dimension();
    const std::size_t dims = m - 1;
    const std::size_t R = opt.randomizations;

    MvnResult result;
    // Widths below 1e-12 standard deviations carry no reliable mass.
    for (Eigen::Index i = 0; i < problem.mean.size(); ++i) {
        double sd = std::holds_alternative<StructuredCovariance>(problem.covariance)
                        ? std::sqrt(std::get<StructuredCovariance>(problem.covariance).variance())
                        : std::sqrt(std::get<Eigen::MatrixXd>(problem.covariance)(i, i));
        if ((problem.hi[i] - problem.lo[i]) / sd < 1e-12) result.degenerate = true;
    }

    const bool lattice = dims <= max_lattice_dim;
    const auto& gens = richtmyer_generators();
    std::vector<std::vector<double>> shifts(R, std::vector<double>(dims));
    for (auto& s : shifts)
        for (auto& v : s) v = rng.uniform();

    std::vector<double> lse(R, neg_inf);
    std::vector<double> w(dims), w_anti(dims);
    std::size_t done = 0;
    std::size_t per_rand = std::max<std::size_t>(opt.initial_points, 1);
    if (dims == 0) per_rand = 1;

    for (;;) {
        for (std::size_t r = 0; r < R; ++r) {
            for (std::size_t j = done + 1; j <= per_rand; ++j) {
                for (std::size_t k = 0; k < dims; ++k) {
                    double u;
                    if (lattice) {
                        u = static_cast<double>(j) * gens[k] + shifts[r][k];
                        u -= std::floor(u);
                    } else {
                        u = rng.uniform();
                    }
                    const double tent = std::abs(2.0 * u - 1.0);
                    w[k] = tent;
                    w_anti[k] = 1.0 - tent;
                }
                lse[r] = log_add(lse[r], integrand.log_value(w.data()));
                lse[r] = log_add(lse[r], integrand.log_value(w_anti.data()));
            }
        }
        done = per_rand;
        result.points = 2 * done * R;

        const double log_count = std::log(2.0 * static_cast<double>(done));
        double ref = neg_inf;
        for (double v : lse) ref = std::max(ref, v - log_count);
        if (ref == neg_inf) {
            result.prob = 0.0;
            result.error = 0.0;
            result.log_prob = neg_inf;
            result.log_error = std::numeric_limits<double>::infinity();
            result.degenerate = true;
            return result;
        }
        double mean = 0.0;
        std::vector<double> vals(R);
        for (std::size_t r = 0; r < R; ++r) {
            vals[r] = std::exp(lse[r] - log_count - ref);
            mean += vals[r];
        }
        mean /= static_cast<double>(R);
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= static_cast<double>(R - 1);
        const double se_rel = std::sqrt(var / static_cast<double>(R)) / mean;

        result.log_prob = ref + std::log(mean);
        result.prob = std::exp(result.log_prob);
        result.log_error = se_rel;
        result.error = se_rel * result.prob;

        const double target = opt.relative_target ? opt.target_error * result.prob : opt.target_error;
        if (result.error <= target || dims == 0) {
            result.unconverged = false;
            break;
        }
        if (4 * per_rand * R > opt.max_points) {
            result.unconverged = true;
            break;
        }
        per_rand *= 2;
    }
    if (result.prob == 0.0) result.degenerate = true;
    return result;
}

} // namespace infsamp
