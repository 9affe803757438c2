#include "infsamp/normconst.hpp"

#include "infsamp/distributions.hpp"
#include "infsamp/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace infsamp {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double log_2pi = 1.83787706640934548356;
constexpr std::size_t batches = 20;

} // namespace

Vector mu_prime(const Vector& theta) {
    if (theta.size() < 2) throw ConstraintViolation("mu_prime: need N >= 2");
    const double mean = theta.mean();
    return theta.head(theta.size() - 1).array() - mean;
}

C0Estimate log_c0(const Vector& theta, double sigmaE2, double t, std::size_t n, std::size_t N, const MvnOptions& opt,
                  RandomStream& rng) {
    if (!(sigmaE2 > 0.0)) throw DomainError("log_c0: sigmaE2 must be positive");
    if (static_cast<std::size_t>(theta.size()) != N) throw ConstraintViolation("log_c0: theta must have length N");
    const std::size_t m = N - 1;
    const Vector mp = mu_prime(theta);
    const StructuredCovariance cov{m, sigmaE2};

    const double thetaN = theta[theta.size() - 1];
    const double quad = thetaN * thetaN + theta.head(theta.size() - 1).squaredNorm() - mp.sum() * mp.sum() - mp.squaredNorm();

    C0Estimate out;
    out.closed = -quad / (2.0 * sigmaE2) + 0.5 * static_cast<double>(m) * log_2pi + 0.5 * cov.log_det();

    const auto region = ConstraintRegion::from_design(t, n, N);
    RectangleProblem p;
    p.mean = mp;
    p.covariance = cov;
    p.lo = Vector::Constant(static_cast<Eigen::Index>(m), region.box_lo);
    p.hi = Vector::Constant(static_cast<Eigen::Index>(m), region.box_hi);
    p.options = opt;
    const auto r = mvn_rectangle_prob(p, rng);
    out.log_r1_prob = r.log_prob;
    out.error = r.log_error;
    out.degenerate = r.degenerate;
    out.unconverged = r.unconverged;
    out.value = out.closed + out.log_r1_prob;
    return out;
}

ProportionEstimate r2_proportion(const Vector& theta, double sigmaE2, const ConstraintRegion& region, std::size_t burn_in,
                                 std::size_t draws, RandomStream& rng) {
    if (draws == 0) throw ConstraintViolation("r2_proportion: need at least one retained draw");
    const Vector mp = mu_prime(theta);
    const Eigen::Index m = mp.size();
    const double sd = std::sqrt(0.5 * sigmaE2);

    Vector z = mp.cwiseMax(region.box_lo).cwiseMin(region.box_hi);
    double dev = (z - mp).sum();

    const std::size_t per_batch = std::max<std::size_t>(draws / batches, 1);
    std::vector<double> batch_hits;
    std::size_t hits = 0, in_batch = 0, batch_count = 0;
    for (std::size_t sweep = 0; sweep < burn_in + draws; ++sweep) {
        for (Eigen::Index i = 0; i < m; ++i) {
            const double own = z[i] - mp[i];
            const double cm = mp[i] - 0.5 * (dev - own);
            const double zi = sample_truncated_normal(cm, sd, region.box_lo, region.box_hi, rng);
            dev += (zi - mp[i]) - own;
            z[i] = zi;
        }
        if (sweep < burn_in) continue;
        // Recompute the running sum occasionally to stop drift.
        if ((sweep & 63) == 0) dev = (z - mp).sum();
        const double s = z.sum();
        const bool hit = s >= region.sum_lo && s <= region.sum_hi;
        hits += hit;
        in_batch += hit;
        if (++batch_count == per_batch) {
            batch_hits.push_back(static_cast<double>(in_batch) / static_cast<double>(per_batch));
            in_batch = 0;
            batch_count = 0;
        }
    }

    ProportionEstimate out;
    out.draws = draws;
    out.value = static_cast<double>(hits) / static_cast<double>(draws);
    if (batch_hits.size() >= 2) {
        double mean = 0.0;
        for (double b : batch_hits) mean += b;
        mean /= static_cast<double>(batch_hits.size());
        double var = 0.0;
        for (double b : batch_hits) var += (b - mean) * (b - mean);
        var /= static_cast<double>(batch_hits.size() - 1);
        out.error = std::sqrt(var / static_cast<double>(batch_hits.size()));
    }
    return out;
}

ConstantEstimate log_C(const Vector& y, double beta0, double beta1, double sigmaE2, double t, std::size_t n, std::size_t N,
                       const NormConstConfig& cfg, RandomStream& rng) {
    if (!(t > 0.0)) throw ConstraintViolation("log_C: total t must be positive");
    if (!(sigmaE2 > 0.0)) throw DomainError("log_C: sigmaE2 must be positive");
    if (static_cast<std::size_t>(y.size()) != N) throw ConstraintViolation("log_C: y must have length N");
    if (!y.allFinite() || !std::isfinite(beta0) || !std::isfinite(beta1))
        throw DomainError("log_C: non-finite input");

    const double Nd = static_cast<double>(N);
    const Vector theta = (beta1 * y).array() + beta0;

    ConstantEstimate est;
    est.log_prefactor = std::log(Nd) - Nd * (0.5 * log_2pi + 0.5 * std::log(sigmaE2)) -
                        (t * t / Nd - 2.0 * (t / Nd) * theta.sum()) / (2.0 * sigmaE2);

    RandomStream box_rng = rng.substream(1);
    RandomStream gibbs_rng = rng.substream(2);
    const auto c0 = log_c0(theta, sigmaE2, t, n, N, cfg.mvn, box_rng);
    est.log_c0_closed = c0.closed;
    est.log_r1_prob = c0.log_r1_prob;
    est.log_c0 = c0.value;
    est.mvn_unconverged = c0.unconverged;

    const auto r2 = r2_proportion(theta, sigmaE2, ConstraintRegion::from_design(t, n, N), cfg.r2_burn_in, cfg.r2_draws, gibbs_rng);
    est.r2_proportion = r2.value;
    est.inner_draws = r2.draws;

    est.log_c = est.log_prefactor + est.log_c0_closed + est.log_r1_prob + std::log(est.r2_proportion);
    const double rel_r2 = r2.value > 0.0 ? r2.error / r2.value : std::numeric_limits<double>::infinity();
    est.mc_error = std::hypot(c0.error, rel_r2);
    est.flagged = c0.degenerate || est.log_c == neg_inf || std::isnan(est.log_c);
    return est;
}

} // namespace infsamp
