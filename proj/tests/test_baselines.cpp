#include "infsamp/baselines.hpp"
#include "infsamp/error.hpp"
#include "infsamp/model.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <algorithm>
#include <numeric>
#include <set>

using namespace infsamp;

TEST_CASE("systematic pps hits each unit with probability n nu / t") {
    Vector nu(7);
    nu << 1.0, 3.0, 2.0, 0.5, 4.0, 2.5, 1.0;
    const std::size_t n = 3;
    const Vector pi = inclusion_probs(nu, n);
    RandomStream rng(1, 1);
    std::vector<int> hits(7, 0);
    const int reps = 100000;
    for (int k = 0; k < reps; ++k) {
        const auto s = systematic_pps(nu, n, rng);
        REQUIRE(s.size() == n);
        REQUIRE(std::set<std::size_t>(s.begin(), s.end()).size() == n);
        for (auto i : s) ++hits[i];
    }
    for (int i = 0; i < 7; ++i) {
        const double p = pi[i];
        CHECK(std::abs(hits[i] / double(reps) - p) < 4.0 * std::sqrt(p * (1 - p) / reps));
    }
}

TEST_CASE("systematic pps edge cases") {
    RandomStream rng(2, 1);
    Vector nu(3);
    nu << 1.0, 1.0, 5.0;
    CHECK_THROWS_AS(systematic_pps(nu, 2, rng), InfeasibleDesign);
    CHECK(systematic_pps(nu, 3, rng).size() == 3);
    CHECK_THROWS(systematic_pps(nu, 0, rng));
}

TEST_CASE("HT worked example") {
    Vector y(2), nu(2);
    y << 1.0, 2.0;
    nu << 1.0, 1.0;
    const auto r = ht_estimate(y, nu, 4.0, 4, 0.95, HtInterval::Rooted);
    CHECK(r.total_hat == doctest::Approx(6.0));
    CHECK(r.var_hat == doctest::Approx(4.0));
    CHECK(r.ci.hi - r.ci.lo == doctest::Approx(2.0 * 1.959964 * 2.0).epsilon(1e-6));
    CHECK(r.mean_hat == doctest::Approx(1.5));
    const auto lit = ht_estimate(y, nu, 4.0, 4, 0.95, HtInterval::Literal);
    CHECK(lit.ci.hi - lit.ci.lo == doctest::Approx(2.0 * 1.959964 * 4.0).epsilon(1e-6));
}

TEST_CASE("HT mean is design unbiased under systematic pps with random order") {
    Vector y(8), nu(8);
    y << 1.2, 0.7, 3.1, 2.2, 0.4, 1.9, 2.8, 1.1;
    nu << 1.0, 0.6, 2.5, 1.7, 0.9, 1.5, 2.0, 1.3;
    const double t = nu.sum();
    RandomStream rng(3, 1);
    double sum = 0.0, sum2 = 0.0;
    const int reps = 100000;
    std::vector<std::size_t> order(8);
    for (int k = 0; k < reps; ++k) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng.engine());
        Vector nf(8);
        for (int i = 0; i < 8; ++i) nf[i] = nu[order[i]];
        const auto s = systematic_pps(nf, 3, rng);
        Vector ys(3), ns(3);
        for (int j = 0; j < 3; ++j) {
            ys[j] = y[order[s[j]]];
            ns[j] = nu[order[s[j]]];
        }
        const double m = ht_estimate(ys, ns, t, 8).mean_hat;
        sum += m;
        sum2 += m * m;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
    CHECK(std::abs(mean - y.mean()) < 4.0 * se);
}

TEST_CASE("IG posterior predictive, literal variant") {
    Vector y(5);
    y << 1.0, 2.0, 3.0, 4.0, 5.0;
    RandomStream rng(4, 1);
    const auto r = ig_infer(y, 20, 100000, 0.95, ModelVariant::AppendixBLiteral, rng);
    // E[Ybar] = (sum y_s + (N - n) ybar_s) / N = 3; E[mu] = 3.
    CHECK(r.ybar.equal_tail.point == doctest::Approx(3.0).epsilon(0.01));
    CHECK(r.ey.equal_tail.point == doctest::Approx(3.0).epsilon(0.01));
    // mu - wbar is scaled t with n - 1 df: sd = sqrt(ss / (n (n - 3))) = sqrt(10 / 10) = 1.
    double var = 0.0;
    for (double v : r.ey_draws) var += (v - 3.0) * (v - 3.0);
    CHECK(std::sqrt(var / r.ey_draws.size()) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(r.ybar.equal_tail.width() > r.ey.equal_tail.width() * 0.5);
}

TEST_CASE("IG lognormal variant works on the log scale") {
    Vector y(4);
    y << 1.0, 2.0, 4.0, 8.0;
    RandomStream rng(5, 1);
    const auto r = ig_infer(y, 10, 2000, 0.95, ModelVariant::LognormalY, rng);
    for (double v : r.ey_draws) CHECK(v > 0.0);
    Vector bad(3);
    bad << 1.0, -1.0, 2.0;
    CHECK_THROWS(ig_infer(bad, 10, 10, 0.95, ModelVariant::LognormalY, rng));
}

TEST_CASE("systematic pps equal sizes and full sample") {
    RandomStream rng(6, 1);
    const Vector nu = Vector::Constant(10, 2.0);
    std::vector<int> hits(10, 0);
    const int reps = 100000;
    for (int k = 0; k < reps; ++k)
        for (auto i : systematic_pps(nu, 4, rng)) ++hits[i];
    for (int h : hits) CHECK(std::abs(h / double(reps) - 0.4) < 3.0 * std::sqrt(0.4 * 0.6 / reps));
    const auto all = systematic_pps(nu, 10, rng);
    CHECK(all.size() == 10);
}

TEST_CASE("HT exact cases") {
    // Responses proportional to size are estimated without error.
    Vector nu(4), y(4);
    nu << 1.0, 2.5, 0.7, 3.0;
    y = 1.7 * nu;
    const auto r = ht_estimate(y, nu, 20.0, 30);
    CHECK(r.total_hat == doctest::Approx(1.7 * 20.0));
    CHECK(std::abs(r.var_hat) < 1e-12);
    CHECK(r.ci.width() < 1e-6);

    // y / p = (10, 14) with t = 10.
    Vector y2(2), nu2(2);
    y2 << 5.0, 7.0;
    nu2 << 5.0, 5.0;
    const auto r2 = ht_estimate(y2, nu2, 10.0, 8);
    CHECK(r2.total_hat == doctest::Approx(12.0));
    CHECK(r2.var_hat == doctest::Approx(4.0));
    CHECK(r2.ci.hi - r2.total_hat == doctest::Approx(1.959964 * 2.0).epsilon(1e-6));

    CHECK_THROWS(ht_estimate(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0), 4.0, 4));
}

TEST_CASE("HT is unbiased under pps with replacement by enumeration") {
    Vector y(4), nu(4);
    y << 0.8, 2.3, 1.1, 4.0;
    nu << 1.0, 2.0, 1.5, 3.5;
    const double t = nu.sum();
    double mean = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Vector ys(2), ns(2);
            ys << y[i], y[j];
            ns << nu[i], nu[j];
            mean += (nu[i] / t) * (nu[j] / t) * ht_estimate(ys, ns, t, 4).total_hat;
        }
    CHECK(mean == doctest::Approx(y.sum()).epsilon(1e-12));
}

TEST_CASE("IG faults and invariances") {
    RandomStream rng(7, 1);
    CHECK_THROWS(ig_infer(Vector::Constant(5, 2.0), 20, 100, 0.95, ModelVariant::AppendixBLiteral, rng));

    Vector y(5), yp(5);
    y << 1.3, 0.4, 2.2, 1.9, 0.8;
    yp << 2.2, 0.8, 1.3, 0.4, 1.9;
    RandomStream a(8, 1), b(8, 1);
    const auto ra = ig_infer(y, 30, 2000, 0.95, ModelVariant::LognormalY, a);
    const auto rb = ig_infer(yp, 30, 2000, 0.95, ModelVariant::LognormalY, b);
    CHECK(ra.ybar.equal_tail.lo == doctest::Approx(rb.ybar.equal_tail.lo).epsilon(1e-9));
    CHECK(ra.ybar.equal_tail.hi == doctest::Approx(rb.ybar.equal_tail.hi).epsilon(1e-9));

    // Posterior mean of mu is the mean of the logs.
    RandomStream c(9, 1);
    const auto lit = ig_infer(y.array().log().matrix(), 30, 200000, 0.95, ModelVariant::AppendixBLiteral, c);
    CHECK(lit.ey.equal_tail.point == doctest::Approx(y.array().log().mean()).epsilon(0.02));
}

TEST_CASE("IG predictive spread of the finite mean shrinks with n") {
    RandomStream pop(10, 1);
    Vector y(100);
    for (auto& v : y) v = std::exp(0.5 + 0.4 * pop.normal());
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : {10, 20, 50}) {
        RandomStream rng(11, n);
        const auto r = ig_infer(y.head(n), 100, 20000, 0.95, ModelVariant::LognormalY, rng);
        const double w = r.ybar.equal_tail.width();
        CHECK(w < prev);
        prev = w;
    }
}
