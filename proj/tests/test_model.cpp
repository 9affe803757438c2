#include <doctest.h>

#include "infsamp/error.hpp"
#include "infsamp/model.hpp"
#include "infsamp/random.hpp"

#include <cmath>

using namespace infsamp;

namespace {

Vector random_nu(std::size_t N, double t, RandomStream& rng) {
    Vector nu(static_cast<Eigen::Index>(N));
    for (auto& v : nu) v = 0.5 + rng.uniform();
    return nu * (t / nu.sum());
}

} // namespace

TEST_CASE("nu_to_z / z_to_nu") {
    const Vector nu = Vector::Constant(5, 2.0);
    const auto z = nu_to_z(nu, 10.0);
    CHECK(z.head().cwiseAbs().maxCoeff() == 0.0);
    CHECK(z.z_N() == doctest::Approx(2.0));

    Vector zz(3);
    zz << 0.5, -0.2, 1.0;
    const Vector back = z_to_nu(ZVector(zz));
    CHECK(back[0] == doctest::Approx(1.5));
    CHECK(back[1] == doctest::Approx(0.8));
    CHECK(back[2] == doctest::Approx(0.7));

    RandomStream rng(1, 0);
    const Vector r5 = random_nu(5, 10.0, rng);
    const auto z5 = nu_to_z(r5, 10.0);
    CHECK(z5.z_N() == doctest::Approx(2.0));
    CHECK(z5.head().sum() == doctest::Approx(10.0 - r5[4] - 4.0 * 2.0).epsilon(1e-12));

    for (std::size_t N : {2u, 17u, 10000u}) {
        const Vector nu_r = random_nu(N, 123.0, rng);
        const Vector rt = z_to_nu(nu_to_z(nu_r, nu_r.sum()));
        CHECK((rt - nu_r).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(nu_to_z(nu, 11.0), ConstraintViolation);
}

TEST_CASE("inclusion_probs") {
    const auto p = inclusion_probs(Vector::Constant(10, 3.0), 2);
    CHECK(p.cwiseAbs().maxCoeff() == doctest::Approx(0.2));
    Vector nu(4);
    nu << 1, 2, 3, 4;
    const auto q = inclusion_probs(nu, 2);
    CHECK(q[0] == doctest::Approx(0.2));
    CHECK(q[3] == doctest::Approx(0.8));
    RandomStream rng(2, 0);
    const Vector r = random_nu(40, 7.0, rng);
    CHECK(std::abs(inclusion_probs(r, 5).sum() - 5.0) < 1e-10 * 5);
    nu << 1, 1, 1, 10;
    CHECK_THROWS_AS(inclusion_probs(nu, 2), InfeasibleDesign);
}

TEST_CASE("region predicates") {
    // N=4, n=2, t=4: box [-1, 1], sum bounds [-1, 1].
    Vector zh = Vector::Zero(3);
    CHECK(in_region_R0(zh, 4.0, 2, 4));
    zh << 1, 1, -0.9;
    CHECK_FALSE(in_region_R0(zh, 4.0, 2, 4));
    zh << -1.0 - 1e-9, 0, 0;
    CHECK_FALSE(in_region_R0(zh, 4.0, 2, 4));
    zh << -1.0, 0, 0;
    CHECK(in_region_R0(zh, 4.0, 2, 4));

    // R is the slice of R0 at fixed sampled coordinates.
    RandomStream rng(3, 0);
    const std::size_t N = 7, n = 3;
    const double t = 7.0;
    int agree = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        Vector head(static_cast<Eigen::Index>(N - 1));
        for (auto& v : head) v = -1.0 + (7.0 / 3.0) * rng.uniform() * 0.9;
        const auto zs = head.head(static_cast<Eigen::Index>(n));
        const auto zns = head.tail(static_cast<Eigen::Index>(N - 1 - n));
        if (in_region_R(zns, zs, t, n, N) == in_region_R0(head, t, n, N)) ++agree;
    }
    CHECK(agree == 2000);
}

TEST_CASE("selection_log_prob") {
    const auto z = nu_to_z(Vector::Constant(4, 1.0), 4.0);
    const auto s = selection_log_prob(z, 2, 4);
    CHECK(s.total == doctest::Approx(4.0 * std::log(0.5)));
    CHECK(s.log_L == doctest::Approx(2.0 * std::log(0.5)));

    RandomStream rng(4, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const Vector nu = random_nu(6, 6.0, rng);
        const auto zz = nu_to_z(nu, 6.0);
        const Vector pi = inclusion_probs(nu, 2);
        double brute = 0.0;
        for (int i = 0; i < 6; ++i) brute += i < 2 ? std::log(pi[i]) : std::log1p(-pi[i]);
        CHECK(selection_log_prob(zz, 2, 6).total == doctest::Approx(brute).epsilon(1e-10));
    }
    // Push a non-sampled unit to pi = 1.
    Vector nu(4);
    nu << 0.5, 0.5, 2.0, 1.0;
    CHECK(std::isinf(selection_log_prob(nu_to_z(nu, 4.0), 2, 4).total));
}
