#pragma once

#include "infsamp/model.hpp"
#include "infsamp/random.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace infsamp {

/// How the response enters the superpopulation model.
enum class ModelVariant {
    /// y itself is Gaussian with (mu, sigma2); the exact conjugate sampler.
    AppendixBLiteral,
    /// log y is Gaussian with (mu, sigma2); y_ns is updated by Metropolis-Hastings.
    LognormalY,
};

ModelVariant parse_variant(const std::string& name);
std::string to_string(ModelVariant v);

enum class InitPolicy {
    /// Equal split of the remaining size total, ignorable predictive for y, closed-form fits for the parameters.
    Centroid,
};

struct GibbsConfig {
    std::size_t burn_in = 5000;
    std::size_t keep = 1000;
    std::size_t thin = 1;
    ModelVariant variant = ModelVariant::AppendixBLiteral;
    InitPolicy init = InitPolicy::Centroid;
    /// Visit the four blocks in a fresh random order every sweep.
    bool random_scan = false;
    /// Include the non-sampled selection factor L in the z_ns conditionals.
    bool selection_factor = true;
    /// Hold (beta0, beta1, sigmaE2) at their starting values.
    bool fix_eta = false;

    void validate() const;
};

/** Full state of the chain.  Vectors cover all N units in the relabelled order (sampled units
 * first); the sampled entries never change.
 */
struct GibbsState {
    Vector y;
    /// z_1..z_{N-1} followed by z_N = t/N.
    Vector z;
    double mu = 0.0;
    double sigma2 = 1.0;
    double beta0 = 0.0;
    double beta1 = 1.0;
    double sigmaE2 = 1.0;

    Eigen::Ref<const Vector> y_ns(std::size_t n) const { return y.tail(y.size() - static_cast<Eigen::Index>(n)); }
    Eigen::Ref<const Vector> z_ns(std::size_t n) const {
        return z.segment(static_cast<Eigen::Index>(n), z.size() - 1 - static_cast<Eigen::Index>(n));
    }
    /// theta_i = beta0 + beta1 y_i.
    Vector theta() const { return (beta1 * y).array() + beta0; }
    /// Size measures implied by z.
    Vector nu() const;
};

struct GibbsDraw {
    Vector y_ns;
    Vector z_ns;
    double mu = 0.0;
    double sigma2 = 1.0;
    double beta0 = 0.0;
    double beta1 = 1.0;
    double sigmaE2 = 1.0;
    /// Filled in by the weighting step.
    double log_c = 0.0;
};

struct GibbsDiagnostics {
    std::size_t sweeps = 0;
    /// Sites skipped because their truncation interval was narrower than 1e-12.
    std::size_t skipped_sites = 0;
    std::size_t rejection_proposals = 0;
    std::size_t mh_fallbacks = 0;
    std::size_t y_proposals = 0;
    std::size_t y_accepts = 0;
    double seconds = 0.0;
};

struct GibbsRun {
    std::vector<GibbsDraw> draws;
    GibbsDiagnostics diagnostics;
};

// Individual conditional updates.  Each modifies `state` in place.
void cond_draw_y_ns(GibbsState& state, const ObservedData& data, ModelVariant variant, RandomStream& rng,
                    GibbsDiagnostics* diag = nullptr);
void cond_draw_z_ns(GibbsState& state, const ObservedData& data, bool selection_factor, RandomStream& rng,
                    GibbsDiagnostics* diag = nullptr);
void cond_draw_psi(GibbsState& state, ModelVariant variant, RandomStream& rng);
void cond_draw_eta(GibbsState& state, const ObservedData& data, RandomStream& rng);

/// Feasible starting state.
GibbsState initial_state(const ObservedData& data, ModelVariant variant, RandomStream& rng);

GibbsDraw snapshot(const GibbsState& state, std::size_t n);

GibbsRun run_gibbs(const ObservedData& data, const GibbsConfig& cfg, RandomStream& rng);
/// Same, from a caller-supplied state (which is advanced).
GibbsRun run_gibbs(const ObservedData& data, const GibbsConfig& cfg, GibbsState& state, RandomStream& rng);

} // namespace infsamp
