#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace infsamp {

using Vector = Eigen::VectorXd;

/// Superpopulation parameters: log-scale (mu, sigma2) for the response and the size-link
/// regression nu = beta0 + beta1 * y + e, e ~ N(0, sigmaE2).
struct SuperParams {
    double mu = 0.0;
    double sigma2 = 1.0;
    double beta0 = 0.0;
    double beta1 = 1.0;
    double sigmaE2 = 1.0;

    /// Throws DomainError unless sigma2 > 0 and sigmaE2 > 0.
    void validate() const;
};

/// A realised finite population.  `t` is the (known) total of the size measures.
struct FinitePopulation {
    Vector y;
    Vector nu;
    double t = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(y.size()); }
    double mean_y() const { return y.mean(); }
};

/** The analyst's information set after sampling.
 *
 * Units are relabelled so that the n sampled units occupy positions 0..n-1.  `sample_idx` maps
 * these positions back to the original population labels.  The non-sampled units are positions
 * n..N-1; position N-1 is the unit whose size measure is fixed by the known total.
 */
struct ObservedData {
    std::vector<std::size_t> sample_idx;
    Vector y_s;
    Vector pi_s;
    Vector nu_s;
    /// z_1..z_n followed by z_N = t/N (length n+1).
    Vector z_s;
    double t = 0.0;
    std::size_t n = 0;
    std::size_t N = 0;

    double z_N() const { return t / static_cast<double>(N); }
    /// Sampled z values without the trailing z_N.
    Eigen::Ref<const Vector> z_s_head() const { return z_s.head(static_cast<Eigen::Index>(n)); }

    /// Builds the observed data from responses and first-order inclusion probabilities.
    static ObservedData from_sample(const Vector& y_s, const Vector& pi_s, double t, std::size_t N,
                                    std::vector<std::size_t> sample_idx = {});
};

/// Centred size measures: z_i = nu_i - t/N for i < N and z_N = t/N.
class ZVector {
public:
    ZVector() = default;
    explicit ZVector(Vector z);

    const Vector& values() const { return z_; }
    std::size_t size() const { return static_cast<std::size_t>(z_.size()); }
    double z_N() const { return z_[z_.size() - 1]; }
    double total() const { return z_N() * static_cast<double>(z_.size()); }
    /// The free coordinates z_1..z_{N-1}.
    Eigen::Ref<const Vector> head() const { return z_.head(z_.size() - 1); }

private:
    Vector z_;
};

/// Box and sum bounds of the feasibility region for z_1..z_{N-1}.
struct ConstraintRegion {
    double box_lo;
    double box_hi;
    double sum_lo;
    double sum_hi;

    /// -t/N <= z_i <= t/n - t/N and t/N - t/n <= sum z <= t/N.
    static ConstraintRegion from_design(double t, std::size_t n, std::size_t N);
};

ZVector nu_to_z(const Vector& nu, double t);
Vector z_to_nu(const ZVector& z);

/// pi_i = n nu_i / sum(nu).  Throws InfeasibleDesign if some pi_i >= 1.
Vector inclusion_probs(const Vector& nu, std::size_t n);

bool in_region_R0(const Eigen::Ref<const Vector>& z_head, double t, std::size_t n, std::size_t N);
bool in_region_R(const Eigen::Ref<const Vector>& z_ns, const Eigen::Ref<const Vector>& z_s_head,
                 double t, std::size_t n, std::size_t N);

struct SelectionLogProb {
    /// log Pr(I | z) for the realised indicator (first n units sampled).
    double total;
    /// log of the non-sampled factor L alone.
    double log_L;
};

/// Poisson-sampling log probability.  Infeasible z (some factor <= 0) yields -infinity.
SelectionLogProb selection_log_prob(const ZVector& z, std::size_t n, std::size_t N);

} // namespace infsamp
