#include <doctest.h>

#include "infsamp/error.hpp"
#include "infsamp/mvn.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>

using namespace infsamp;
using boost::math::quadrature::gauss_kronrod;

namespace {

// Adaptive nested quadrature of the density over a 3-d box.
double quad_box3(const Eigen::Vector3d& mu, const Eigen::Matrix3d& cov, const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
    const Eigen::Matrix3d P = cov.inverse();
    const double norm = 1.0 / std::sqrt(std::pow(2.0 * std::numbers::pi, 3) * cov.determinant());
    auto f3 = [&](double x, double y, double z) {
        Eigen::Vector3d d(x - mu[0], y - mu[1], z - mu[2]);
        return norm * std::exp(-0.5 * d.dot(P * d));
    };
    return gauss_kronrod<double, 31>::integrate(
        [&](double x) {
            return gauss_kronrod<double, 31>::integrate(
                [&](double y) {
                    return gauss_kronrod<double, 31>::integrate([&](double z) { return f3(x, y, z); }, lo[2], hi[2], 8, 1e-12);
                },
                lo[1], hi[1], 8, 1e-11);
        },
        lo[0], hi[0], 8, 1e-10);
}

RectangleProblem problem(Eigen::VectorXd mean, std::variant<StructuredCovariance, Eigen::MatrixXd> cov, Eigen::VectorXd lo,
                         Eigen::VectorXd hi) {
    RectangleProblem p;
    p.mean = std::move(mean);
    p.covariance = std::move(cov);
    p.lo = std::move(lo);
    p.hi = std::move(hi);
    return p;
}

} // namespace

TEST_CASE("one dimension is exact") {
    RandomStream rng(20, 0);
    for (double sd : {0.3, 1.0, 4.0}) {
        auto p = problem(Eigen::VectorXd::Constant(1, 0.4), Eigen::MatrixXd::Constant(1, 1, sd * sd),
                         Eigen::VectorXd::Constant(1, -0.7), Eigen::VectorXd::Constant(1, 1.9));
        const auto r = mvn_rectangle_prob(p, rng);
        const double exact = norm_cdf((1.9 - 0.4) / sd) - norm_cdf((-0.7 - 0.4) / sd);
        CHECK(std::abs(r.prob - exact) < 1e-12);
        CHECK(std::abs(r.log_prob - std::log(exact)) < 1e-10);
    }
}

TEST_CASE("identity covariance cube") {
    RandomStream rng(21, 0);
    auto p = problem(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Constant(3, -1.0),
                     Eigen::VectorXd::Constant(3, 1.0));
    const auto r = mvn_rectangle_prob(p, rng);
    CHECK(r.prob == doctest::Approx(std::pow(0.682689492137086, 3)).epsilon(1e-8));
}

TEST_CASE("structured m=3 against quadrature") {
    RandomStream rng(22, 0);
    for (int rep = 0; rep < 5; ++rep) {
        const double s2 = 0.3 + rng.uniform();
        const StructuredCovariance sc{3, s2};
        Eigen::VectorXd mu(3), lo(3), hi(3);
        for (int i = 0; i < 3; ++i) {
            mu[i] = rng.uniform() - 0.5;
            lo[i] = -1.5 * rng.uniform() - 0.1;
            hi[i] = lo[i] + 0.3 + 1.5 * rng.uniform();
        }
        auto p = problem(mu, sc, lo, hi);
        const auto r = mvn_rectangle_prob(p, rng);
        const Eigen::Matrix3d cov = sc.dense();
        const double q = quad_box3(mu, cov, lo, hi);
        CHECK(std::abs(r.prob - q) < 1e-4);
        // The dense path agrees too.
        auto pd = problem(mu, Eigen::MatrixXd(cov), lo, hi);
        CHECK(std::abs(mvn_rectangle_prob(pd, rng).prob - q) < 1e-4);
    }
}

TEST_CASE("log domain and degenerate boxes") {
    RandomStream rng(23, 0);
    const double inf = std::numeric_limits<double>::infinity();
    // Whole space.
    auto full = problem(Eigen::VectorXd::Zero(20), StructuredCovariance{20, 1.0}, Eigen::VectorXd::Constant(20, -inf),
                        Eigen::VectorXd::Constant(20, inf));
    CHECK(std::abs(mvn_rectangle_prob(full, rng).prob - 1.0) < 1e-10);

    // Far tail, m=2: bracketed by the product of marginals (positive correlation) and the smaller marginal.
    Eigen::MatrixXd cov(2, 2);
    cov << 1.0, 0.5, 0.5, 1.0;
    auto tail = problem(Eigen::VectorXd::Zero(2), cov, Eigen::VectorXd::Constant(2, 20.0), Eigen::VectorXd::Constant(2, inf));
    const auto rt = mvn_rectangle_prob(tail, rng);
    CHECK(rt.log_prob > 2.0 * log_norm_sf(20.0));
    CHECK(rt.log_prob < log_norm_sf(20.0));
    CHECK(std::isfinite(rt.log_prob));

    auto thin = problem(Eigen::VectorXd::Zero(2), cov, Eigen::VectorXd::Constant(2, 0.1), Eigen::VectorXd::Constant(2, 0.1 + 1e-15));
    const auto rd = mvn_rectangle_prob(thin, rng);
    CHECK(rd.degenerate);
    CHECK(rd.log_prob < -60.0);

    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    auto nonpd = problem(Eigen::VectorXd::Zero(2), bad, Eigen::VectorXd::Constant(2, -1), Eigen::VectorXd::Constant(2, 1));
    CHECK_THROWS_AS(mvn_rectangle_prob(nonpd, rng), DecompositionError);
}

TEST_CASE("monotonicity and permutation invariance at harness scale") {
    RandomStream rng(24, 0);
    const std::size_t m = 99;
    Eigen::VectorXd mu(m), lo = Eigen::VectorXd::Constant(m, -1.0), hi = Eigen::VectorXd::Constant(m, 9.0);
    for (auto& v : mu) v = 0.6 * (rng.uniform() - 0.5);
    auto p = problem(mu, StructuredCovariance{m, 1.0}, lo, hi);
    p.options.target_error = 1e-3;
    const auto a = mvn_rectangle_prob(p, rng);
    auto wider = p;
    wider.lo.array() -= 0.1;
    const auto b = mvn_rectangle_prob(wider, rng);
    CHECK(b.prob >= a.prob - 3.0 * std::hypot(a.error, b.error));

    auto perm = p;
    perm.mean = mu.reverse();
    perm.options.reorder = false;
    p.options.reorder = false;
    const auto c = mvn_rectangle_prob(perm, rng);
    const auto d = mvn_rectangle_prob(p, rng);
    CHECK(std::abs(c.prob - d.prob) <= 3.0 * std::hypot(c.error, d.error) + 1e-15);
}
