#include "infsamp/gibbs.hpp"

#include "infsamp/distributions.hpp"
#include "infsamp/error.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace infsamp {

namespace {

constexpr double narrow_site = 1e-12;
constexpr std::size_t max_rejection_tries = 10000;

// Response on the scale where it is Gaussian.
Vector gaussian_scale(const Vector& y, ModelVariant v) {
    if (v == ModelVariant::AppendixBLiteral) return y;
    if ((y.array() <= 0.0).any()) throw NumericalFault("lognormal variant: non-positive response in state");
    return y.array().log();
}

std::string dump(const GibbsState& s) {
    std::ostringstream os;
    os << "mu=" << s.mu << " sigma2=" << s.sigma2 << " beta0=" << s.beta0 << " beta1=" << s.beta1
       << " sigmaE2=" << s.sigmaE2;
    return os.str();
}

// Selection factor of the two units whose sizes move with z_i: unit i and unit N.
struct SiteFactor {
    double a, zN, s_other;
    double operator()(double zi) const {
        return (1.0 - a * (zi + zN)) * (1.0 - a * (zN - s_other - zi));
    }
};

} // namespace

ModelVariant parse_variant(const std::string& name) {
    if (name == "appendixB-literal" || name == "literal") return ModelVariant::AppendixBLiteral;
    if (name == "lognormal-Y" || name == "lognormal") return ModelVariant::LognormalY;
    throw ConstraintViolation("unknown model variant '" + name + "'");
}

std::string to_string(ModelVariant v) {
    return v == ModelVariant::AppendixBLiteral ? "appendixB-literal" : "lognormal-Y";
}

void GibbsConfig::validate() const {
    if (keep < 1) throw ConstraintViolation("GibbsConfig: keep must be >= 1");
    if (thin < 1) throw ConstraintViolation("GibbsConfig: thin must be >= 1");
}

Vector GibbsState::nu() const { return z_to_nu(ZVector(z)); }

void cond_draw_y_ns(GibbsState& s, const ObservedData& data, ModelVariant variant, RandomStream& rng, GibbsDiagnostics* diag) {
    const auto N = static_cast<Eigen::Index>(data.N);
    const auto n = static_cast<Eigen::Index>(data.n);
    const double zN = s.z[N - 1];
    const double t1 = -1.0 / (2.0 * s.sigma2) - s.beta1 * s.beta1 / (2.0 * s.sigmaE2);
    if (!(t1 < 0.0) || !std::isfinite(t1)) throw NumericalFault("cond_draw_y_ns: T1 must be negative; " + dump(s));
    const double var = -1.0 / (2.0 * t1);
    const double sd = std::sqrt(var);
    const double sum_z = s.z.head(N - 1).sum();

    if (variant == ModelVariant::AppendixBLiteral) {
        for (Eigen::Index i = n; i < N; ++i) {
            const double nu_i = i < N - 1 ? s.z[i] + zN : zN - sum_z;
            const double ti = s.mu / s.sigma2 + s.beta1 * (nu_i - s.beta0) / s.sigmaE2;
            const double yi = -ti / (2.0 * t1) + sd * rng.normal();
            if (!std::isfinite(yi)) throw NumericalFault("cond_draw_y_ns: non-finite draw; " + dump(s));
            s.y[i] = yi;
        }
        return;
    }

    // Independence Metropolis-Hastings with a normal proposal that matches the lognormal's first two
    // moments; the target is the lognormal density times the size-link likelihood.
    const double m_ln = std::exp(s.mu + 0.5 * s.sigma2);
    const double v_ln = std::expm1(s.sigma2) * m_ln * m_ln;
    const double prec = 1.0 / v_ln + s.beta1 * s.beta1 / s.sigmaE2;
    const double prop_sd = std::sqrt(1.0 / prec);
    auto log_target = [&](double y, double nu_i) {
        if (!(y > 0.0)) return -std::numeric_limits<double>::infinity();
        const double ly = std::log(y);
        const double r = nu_i - s.beta0 - s.beta1 * y;
        return -ly - (ly - s.mu) * (ly - s.mu) / (2.0 * s.sigma2) - r * r / (2.0 * s.sigmaE2);
    };
    for (Eigen::Index i = n; i < N; ++i) {
        const double nu_i = i < N - 1 ? s.z[i] + zN : zN - sum_z;
        const double prop_mean = (m_ln / v_ln + s.beta1 * (nu_i - s.beta0) / s.sigmaE2) / prec;
        auto log_q = [&](double y) {
            const double d = (y - prop_mean) / prop_sd;
            return -0.5 * d * d;
        };
        const double cur = s.y[i];
        const double cand = prop_mean + prop_sd * rng.normal();
        const double log_ratio = log_target(cand, nu_i) - log_target(cur, nu_i) + log_q(cur) - log_q(cand);
        if (diag) ++diag->y_proposals;
        if (std::log(rng.uniform()) < log_ratio) {
            s.y[i] = cand;
            if (diag) ++diag->y_accepts;
        }
    }
}

void cond_draw_z_ns(GibbsState& s, const ObservedData& data, bool selection_factor, RandomStream& rng, GibbsDiagnostics* diag) {
    const auto N = static_cast<Eigen::Index>(data.N);
    const auto n = static_cast<Eigen::Index>(data.n);
    const double t = data.t;
    const auto region = ConstraintRegion::from_design(t, data.n, data.N);
    const double zN = s.z[N - 1];
    const double a = static_cast<double>(data.n) / t;
    const double sd = std::sqrt(0.5 * s.sigmaE2);
    const Vector theta = s.theta();
    const double thetaN = theta[N - 1];

    double total = s.z.head(N - 1).sum();
    for (Eigen::Index i = n; i < N - 1; ++i) {
        const double other = total - s.z[i];
        const double mean = 0.5 * (theta[i] - other - thetaN);
        // Lower bound is the larger of the box and sum limits, upper the smaller.
        const double lo = std::max(region.box_lo, region.sum_lo - other);
        const double hi = std::min(region.box_hi, region.sum_hi - other);
        if (lo > hi) {
            std::ostringstream os;
            os << "cond_draw_z_ns: empty truncation interval at site " << i + 1 << " [" << lo << ", " << hi << "]";
            throw NumericalFault(os.str());
        }
        if (hi - lo < narrow_site) {
            if (diag) ++diag->skipped_sites;
            continue;
        }

        double zi;
        if (!selection_factor) {
            zi = sample_truncated_normal(mean, sd, lo, hi, rng);
        } else {
            const SiteFactor f{a, zN, other};
            // f is a concave quadratic in z_i with its vertex midway between the roots, at -other/2.
            const double f_max = f(std::clamp(-0.5 * other, lo, hi));
            bool accepted = false;
            zi = s.z[i];
            for (std::size_t tries = 0; tries < max_rejection_tries; ++tries) {
                const double cand = sample_truncated_normal(mean, sd, lo, hi, rng);
                if (diag) ++diag->rejection_proposals;
                if (f_max <= 0.0 || rng.uniform() * f_max <= f(cand)) {
                    zi = cand;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                // Independence MH step from the truncated normal; keeps the chain valid when L is tiny.
                if (diag) ++diag->mh_fallbacks;
                const double cand = sample_truncated_normal(mean, sd, lo, hi, rng);
                const double fc = f(cand), fz = f(s.z[i]);
                if (fz <= 0.0 || rng.uniform() * fz <= fc) zi = cand;
            }
        }
        total += zi - s.z[i];
        s.z[i] = zi;
    }
}

void cond_draw_psi(GibbsState& s, ModelVariant variant, RandomStream& rng) {
    const Vector w = gaussian_scale(s.y, variant);
    const double Nd = static_cast<double>(w.size());
    s.mu = w.mean() + std::sqrt(s.sigma2 / Nd) * rng.normal();
    const double ss = (w.array() - s.mu).square().sum();
    if (!(ss > 0.0)) throw NumericalFault("cond_draw_psi: zero sum of squares (degenerate scale)");
    s.sigma2 = sample_inverse_gamma(0.5 * Nd, 0.5 * ss, rng);
}

void cond_draw_eta(GibbsState& s, const ObservedData& data, RandomStream& rng) {
    const Vector nu = s.nu();
    const double Nd = static_cast<double>(data.N);
    const double t4 = (nu - s.theta()).squaredNorm();
    if (!(t4 > 0.0) || !std::isfinite(t4)) throw NumericalFault("cond_draw_eta: T4 must be positive; " + dump(s));
    s.sigmaE2 = sample_inverse_gamma(0.5 * Nd, 0.5 * t4, rng);

    const double sum_y = s.y.sum();
    s.beta0 = (data.t - s.beta1 * sum_y) / Nd + std::sqrt(s.sigmaE2 / Nd) * rng.normal();

    const double syy = s.y.squaredNorm();
    if (!(syy > 0.0)) throw NumericalFault("cond_draw_eta: sum of squared responses is zero");
    const double t5 = -(s.y.array() * (nu.array() - s.beta0)).sum();
    s.beta1 = -t5 / syy + std::sqrt(s.sigmaE2 / syy) * rng.normal();
}

GibbsState initial_state(const ObservedData& data, ModelVariant variant, RandomStream& rng) {
    const auto N = static_cast<Eigen::Index>(data.N);
    const auto n = static_cast<Eigen::Index>(data.n);
    const double t = data.t;
    GibbsState s;
    s.z.resize(N);
    s.z.head(n) = data.z_s_head();
    const double share = (t - data.nu_s.sum()) / static_cast<double>(N - n);
    if (!(share > 0.0)) throw NumericalFault("initial_state: sampled sizes exhaust the total");
    s.z.segment(n, N - 1 - n).setConstant(share - t / static_cast<double>(N));
    s.z[N - 1] = t / static_cast<double>(N);
    if (!in_region_R(s.z_ns(data.n), data.z_s_head(), t, data.n, data.N))
        throw NumericalFault("initial_state: centroid start is outside the feasible region");

    // Ignorable predictive for the non-sampled responses.
    const Vector ws = gaussian_scale(data.y_s, variant);
    const double wbar = ws.mean();
    double wsd = n > 1 ? std::sqrt((ws.array() - wbar).square().sum() / static_cast<double>(n - 1)) : 1.0;
    if (!(wsd > 0.0)) wsd = std::max(1e-3, 1e-3 * std::abs(wbar));
    s.y.resize(N);
    s.y.head(n) = data.y_s;
    for (Eigen::Index i = n; i < N; ++i) {
        double w = wbar + wsd * rng.normal();
        s.y[i] = variant == ModelVariant::LognormalY ? std::exp(w) : w;
    }

    const Vector w = gaussian_scale(s.y, variant);
    s.mu = w.mean();
    s.sigma2 = std::max((w.array() - s.mu).square().sum() / static_cast<double>(N - 1), 1e-8);

    // Least squares of nu on y.
    const Vector nu = s.nu();
    const double ybar = s.y.mean(), nubar = nu.mean();
    const double sxy = ((s.y.array() - ybar) * (nu.array() - nubar)).sum();
    const double sxx = (s.y.array() - ybar).square().sum();
    s.beta1 = sxx > 0.0 ? sxy / sxx : 0.0;
    s.beta0 = nubar - s.beta1 * ybar;
    const double rss = (nu - s.theta()).squaredNorm();
    s.sigmaE2 = std::max(rss / static_cast<double>(N - 2 > 0 ? N - 2 : 1), 1e-8);
    return s;
}

GibbsDraw snapshot(const GibbsState& s, std::size_t n) {
    GibbsDraw d;
    d.y_ns = s.y_ns(n);
    d.z_ns = s.z_ns(n);
    d.mu = s.mu;
    d.sigma2 = s.sigma2;
    d.beta0 = s.beta0;
    d.beta1 = s.beta1;
    d.sigmaE2 = s.sigmaE2;
    return d;
}

GibbsRun run_gibbs(const ObservedData& data, const GibbsConfig& cfg, RandomStream& rng) {
    GibbsState state = initial_state(data, cfg.variant, rng);
    return run_gibbs(data, cfg, state, rng);
}

GibbsRun run_gibbs(const ObservedData& data, const GibbsConfig& cfg, GibbsState& state, RandomStream& rng) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    GibbsRun run;
    run.draws.reserve(cfg.keep);
    std::array<int, 4> order{0, 1, 2, 3};
    const std::size_t total = cfg.burn_in + cfg.keep * cfg.thin;
    for (std::size_t sweep = 1; sweep <= total; ++sweep) {
        if (cfg.random_scan) std::shuffle(order.begin(), order.end(), rng.engine());
        for (int block : order) {
            switch (block) {
            case 0: cond_draw_y_ns(state, data, cfg.variant, rng, &run.diagnostics); break;
            case 1: cond_draw_z_ns(state, data, cfg.selection_factor, rng, &run.diagnostics); break;
            case 2: cond_draw_psi(state, cfg.variant, rng); break;
            default:
                if (!cfg.fix_eta) cond_draw_eta(state, data, rng);
                break;
            }
        }
        ++run.diagnostics.sweeps;
        if (sweep <= cfg.burn_in || (sweep - cfg.burn_in) % cfg.thin != 0) continue;
        if (!in_region_R(state.z_ns(data.n), data.z_s_head(), data.t, data.n, data.N))
            throw NumericalFault("run_gibbs: retained state left the feasible region at sweep " + std::to_string(sweep));
        if (!(state.sigma2 > 0.0) || !(state.sigmaE2 > 0.0))
            throw NumericalFault("run_gibbs: non-positive variance at sweep " + std::to_string(sweep));
        run.draws.push_back(snapshot(state, data.n));
    }
    run.diagnostics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

} // namespace infsamp
