#include "infsamp/model.hpp"

#include "infsamp/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace infsamp {

void SuperParams::validate() const {
    if (!(sigma2 > 0.0)) throw DomainError("SuperParams: sigma2 must be positive");
    if (!(sigmaE2 > 0.0)) throw DomainError("SuperParams: sigmaE2 must be positive");
}

ObservedData ObservedData::from_sample(const Vector& y_s, const Vector& pi_s, double t, std::size_t N,
                                       std::vector<std::size_t> sample_idx) {
    const auto n = static_cast<std::size_t>(y_s.size());
    if (n == 0 || pi_s.size() != y_s.size())
        throw ConstraintViolation("ObservedData: y_s and pi_s must be non-empty and of equal length");
    if (n >= N) throw ConstraintViolation("ObservedData: sample size must be smaller than N");
    if (!(t > 0.0)) throw ConstraintViolation("ObservedData: total t must be positive");
    for (Eigen::Index i = 0; i < pi_s.size(); ++i)
        if (!(pi_s[i] > 0.0 && pi_s[i] < 1.0))
            throw ConstraintViolation("ObservedData: pi_s[" + std::to_string(i) + "] outside (0,1)");

    ObservedData d;
    d.n = n;
    d.N = N;
    d.t = t;
    d.y_s = y_s;
    d.pi_s = pi_s;
    d.nu_s = pi_s * (t / static_cast<double>(n));
    d.z_s.resize(static_cast<Eigen::Index>(n + 1));
    d.z_s.head(static_cast<Eigen::Index>(n)) = d.nu_s.array() - t / static_cast<double>(N);
    d.z_s[static_cast<Eigen::Index>(n)] = t / static_cast<double>(N);
    if (sample_idx.empty()) {
        sample_idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) sample_idx[i] = i;
    }
    if (sample_idx.size() != n) throw ConstraintViolation("ObservedData: sample_idx length mismatch");
    d.sample_idx = std::move(sample_idx);
    return d;
}

ZVector::ZVector(Vector z) : z_(std::move(z)) {
    if (z_.size() < 2) throw ConstraintViolation("ZVector: need N >= 2");
}

ConstraintRegion ConstraintRegion::from_design(double t, std::size_t n, std::size_t N) {
    const double tN = t / static_cast<double>(N);
    const double tn = t / static_cast<double>(n);
    return {-tN, tn - tN, tN - tn, tN};
}

ZVector nu_to_z(const Vector& nu, double t) {
    const Eigen::Index N = nu.size();
    if (N < 2) throw ConstraintViolation("nu_to_z: need N >= 2");
    const double total = nu.sum();
    if (std::abs(total - t) > 1e-8 * std::max(std::abs(t), 1.0))
        throw ConstraintViolation("nu_to_z: sum(nu) = " + std::to_string(total) + " does not match t = " +
                                  std::to_string(t));
    const double tN = t / static_cast<double>(N);
    Vector z(N);
    z.head(N - 1) = nu.head(N - 1).array() - tN;
    z[N - 1] = tN;
    return ZVector(std::move(z));
}

Vector z_to_nu(const ZVector& zv) {
    const Vector& z = zv.values();
    const Eigen::Index N = z.size();
    const double zN = z[N - 1];
    Vector nu(N);
    nu.head(N - 1) = z.head(N - 1).array() + zN;
    nu[N - 1] = zN - z.head(N - 1).sum();
    return nu;
}

Vector inclusion_probs(const Vector& nu, std::size_t n) {
    if ((nu.array() <= 0.0).any()) throw ConstraintViolation("inclusion_probs: size measures must be positive");
    Vector pi = nu * (static_cast<double>(n) / nu.sum());
    for (Eigen::Index i = 0; i < pi.size(); ++i)
        if (pi[i] >= 1.0)
            throw InfeasibleDesign("inclusion_probs: unit " + std::to_string(i) + " would be a certainty unit (pi = " +
                                   std::to_string(pi[i]) + ")");
    return pi;
}

bool in_region_R0(const Eigen::Ref<const Vector>& z_head, double t, std::size_t n, std::size_t N) {
    const auto region = ConstraintRegion::from_design(t, n, N);
    for (Eigen::Index i = 0; i < z_head.size(); ++i)
        if (z_head[i] < region.box_lo || z_head[i] > region.box_hi) return false;
    const double s = z_head.sum();
    return s >= region.sum_lo && s <= region.sum_hi;
}

bool in_region_R(const Eigen::Ref<const Vector>& z_ns, const Eigen::Ref<const Vector>& z_s_head, double t,
                 std::size_t n, std::size_t N) {
    const auto region = ConstraintRegion::from_design(t, n, N);
    for (Eigen::Index i = 0; i < z_ns.size(); ++i)
        if (z_ns[i] < region.box_lo || z_ns[i] > region.box_hi) return false;
    const double s_s = z_s_head.sum();
    const double s_ns = z_ns.sum();
    return s_ns >= region.sum_lo - s_s && s_ns <= region.sum_hi - s_s;
}

SelectionLogProb selection_log_prob(const ZVector& zv, std::size_t n, std::size_t N) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    const Vector& z = zv.values();
    if (zv.size() != N) throw ConstraintViolation("selection_log_prob: z has wrong length");
    const double zN = zv.z_N();
    const double a = static_cast<double>(n) / (static_cast<double>(N) * zN);
    const auto ni = static_cast<Eigen::Index>(n);
    const auto Ni = static_cast<Eigen::Index>(N);

    double sampled = static_cast<double>(n) * std::log(a);
    for (Eigen::Index i = 0; i < ni; ++i) {
        const double f = z[i] + zN;
        if (!(f > 0.0)) return {neg_inf, neg_inf};
        sampled += std::log(f);
    }
    double log_L = 0.0;
    for (Eigen::Index i = ni; i < Ni - 1; ++i) {
        const double f = 1.0 - a * (z[i] + zN);
        if (!(f > 0.0)) return {neg_inf, neg_inf};
        log_L += std::log(f);
    }
    const double f_last = 1.0 - a * (zN - z.head(Ni - 1).sum());
    if (!(f_last > 0.0)) return {neg_inf, neg_inf};
    log_L += std::log(f_last);
    return {sampled + log_L, log_L};
}

} // namespace infsamp
