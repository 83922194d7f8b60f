#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "banditlab/potential.hpp"

using namespace banditlab;
using namespace banditlab::potential;

namespace {

std::vector<double> random_unit(int d, RngStream& rng) {
    std::vector<double> a(static_cast<size_t>(d));
    double n2 = 0.0;
    for (double& x : a) {
        x = rng.next_gauss();
        n2 += x * x;
    }
    double inv = 1.0 / std::sqrt(n2);
    for (double& x : a) x *= inv;
    return a;
}

}  // namespace

TEST_CASE("potential_mab closed sums") {
    std::vector<MabRound> all{{0, true}, {0, true}, {0, true}};
    PotentialTrace t = potential_mab(all, 1.0, 1.0);
    REQUIRE(t.terms.size() == 3);
    CHECK(t.terms[0] == doctest::Approx(1.0));
    CHECK(t.terms[1] == doctest::Approx(0.5));
    CHECK(t.terms[2] == doctest::Approx(1.0 / 3.0));
    CHECK(t.total == doctest::Approx(11.0 / 6.0).epsilon(1e-12));

    std::vector<MabRound> none{{0, false}, {1, false}, {0, false}, {1, false}};
    CHECK(potential_mab(none, 0.7, 2.0).total ==
          doctest::Approx(4.0 * std::pow(2.0, -0.7)).epsilon(1e-12));

    std::vector<MabRound> half{{0, true}, {0, true}};
    CHECK(potential_mab(half, 0.5, 1.0).total ==
          doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(potential_mab(all, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(potential_mab(all, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("potential_mab equals the harmonic-type sum on a full single-arm run") {
    const long long T = 400;
    const double lambda = 0.37, alpha = 0.62;
    std::vector<MabRound> history(static_cast<size_t>(T), MabRound{0, true});
    double expected = 0.0;
    for (long long n = 0; n < T; ++n)
        expected += std::pow(static_cast<double>(n) + lambda, -alpha);
    PotentialTrace t = potential_mab(history, alpha, lambda);
    CHECK(t.total == doctest::Approx(expected).epsilon(1e-12));
    double sum = std::accumulate(t.terms.begin(), t.terms.end(), 0.0);
    CHECK(std::abs(t.total - sum) <= 1e-9 * std::abs(sum));
    for (double term : t.terms) CHECK(term > 0.0);
}

TEST_CASE("potential_lcb reductions") {
    // orthogonal e_1..e_d, all realized, lambda = 1: every term is 1/lambda
    const int d = 4;
    std::vector<LcbRound> basis;
    for (int i = 0; i < d; ++i) {
        std::vector<double> e(static_cast<size_t>(d), 0.0);
        e[static_cast<size_t>(i)] = 1.0;
        basis.push_back({e, true});
    }
    CHECK(potential_lcb(basis, 1.0, 1.0).total == doctest::Approx(d).epsilon(1e-12));

    // repeated e_1 reduces to the scalar case 1 + 1/2 + 1/3
    std::vector<LcbRound> rep(3, LcbRound{{1.0, 0.0}, true});
    CHECK(potential_lcb(rep, 1.0, 1.0).total == doctest::Approx(11.0 / 6.0).epsilon(1e-12));

    // all censored: W^C stays lambda*I
    std::vector<LcbRound> cens(5, LcbRound{{0.0, 1.0}, false});
    CHECK(potential_lcb(cens, 0.8, 2.0).total ==
          doctest::Approx(5.0 * std::pow(2.0, -0.8)).epsilon(1e-12));
}

TEST_CASE("continuous_trace_integral scalar closed forms") {
    // d=1, a=1, p=1, lambda=1, duration 1, alpha=1 -> log 2
    std::vector<PathSegment> one{{std::vector<double>{1.0}, 1.0, 1.0}};
    CHECK(continuous_trace_integral(one, 1.0, 1.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // scalar alpha != 1 against the primitive
    const double lambda = 0.6, p = 0.45, L = 3.0;
    std::vector<PathSegment> seg{{std::vector<double>{1.0}, p, L}};
    for (double alpha : {0.5, 2.0}) {
        double expected = (psi_alpha(lambda + p * L, alpha) - psi_alpha(lambda, alpha)) / p;
        CHECK(continuous_trace_integral(seg, alpha, lambda) ==
              doctest::Approx(expected).epsilon(1e-7));
    }

    CHECK_THROWS_AS(continuous_trace_integral({}, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(continuous_trace_integral(one, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("continuous alpha=1 integral telescopes into log-det increments") {
    const int d = 3;
    RngStream rng(21, 0);
    std::vector<PathSegment> path;
    for (int i = 0; i < 12; ++i)
        path.push_back({random_unit(d, rng), 0.3 + 0.7 * rng.next_u01(), 0.2 + rng.next_u01()});
    double value = continuous_trace_integral(path, 1.0, 1.0);

    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(d, d);
    double sum = 0.0;
    for (const auto& seg : path) {
        Eigen::Map<const Eigen::VectorXd> a(seg.action.data(), d);
        Eigen::MatrixXd w2 = w + seg.duration * seg.p * a * a.transpose();
        sum += (std::log(w2.determinant()) - std::log(w.determinant())) / seg.p;
        w = w2;
    }
    CHECK(value == doctest::Approx(sum).epsilon(1e-10));
}

TEST_CASE("continuous alpha=2 quadrature matches the Sherman-Morrison integral") {
    const int d = 4;
    RngStream rng(33, 1);
    std::vector<PathSegment> path;
    for (int i = 0; i < 10; ++i)
        path.push_back({random_unit(d, rng), 0.4 + 0.6 * rng.next_u01(), 0.5 + rng.next_u01()});
    double value = continuous_trace_integral(path, 2.0, 1.3);

    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(d, d) * 1.3;
    double sum = 0.0;
    for (const auto& seg : path) {
        Eigen::Map<const Eigen::VectorXd> a(seg.action.data(), d);
        double q = a.dot(w.ldlt().solve(a));
        double r2 = w.ldlt().solve(a).squaredNorm();
        double lpq = seg.duration * seg.p * q;
        sum += r2 / (seg.p * q) * (1.0 - 1.0 / (1.0 + lpq));
        w += seg.duration * seg.p * a * a.transpose();
    }
    CHECK(value == doctest::Approx(sum).epsilon(1e-7));
}

TEST_CASE("discrete potential dominated by the continuous integral") {
    // On every sample path: sum ||a_t||^2_{W_{t-1}^{-alpha}} <=
    // ((lambda+1)/lambda)^alpha * integral with p == 1.
    const int d = 4;
    const long long T = 250;
    const double lambda = 1.0;
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        RngStream rng(900 + seed, 0);
        std::vector<LcbRound> rounds;
        std::vector<PathSegment> path;
        for (long long t = 0; t < T; ++t) {
            auto a = random_unit(d, rng);
            rounds.push_back({a, true});
            path.push_back({a, 1.0, 1.0});
        }
        for (double alpha : {0.5, 1.0, 2.0}) {
            double discrete = potential_lcb(rounds, alpha, lambda).total;
            double cont = continuous_trace_integral(path, alpha, lambda);
            double factor = std::pow((lambda + 1.0) / lambda, alpha);
            CHECK(discrete <= factor * cont + 1e-8);
            CHECK(discrete <=
                  worst_case_linear_bound(d, lambda, static_cast<double>(T), alpha) + 1e-8);
        }
    }
}

TEST_CASE("worst_case_linear_bound closed forms") {
    CHECK(worst_case_linear_bound(1, 1.0, 1.0, 1.0) ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    double b2 = worst_case_linear_bound(3, 1.0, 10.0, 2.0);
    CHECK(b2 == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(worst_case_linear_bound(3, 1.0, 1e9, 2.0) == doctest::Approx(b2));  // T-independent
    for (double alpha : {0.9, 0.99, 1.0, 1.01, 1.1})
        CHECK(std::isfinite(worst_case_linear_bound(5, 0.5, 1e4, alpha)));
}

TEST_CASE("finite_potential_bound matches the explicit alpha=1 delta=1/2 form") {
    const double d_eff = 7.5, lambda = 1.0;
    const int d = 5;
    for (double T : {100.0, 1000.0, 50000.0}) {
        double expected = 2.0 * d_eff * std::log(T / (2.0 * lambda) + 1.0) +
                          (24.0 * d_eff * std::log(T) + d) / lambda +
                          16.0 * d_eff / (lambda * T * T);
        CHECK(finite_potential_bound(d_eff, d, T, lambda, 1.0, 0.5) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("finite_potential_bound is increasing in T and rejects invalid delta") {
    double prev = 0.0;
    for (double T : {10.0, 100.0, 1000.0, 10000.0, 100000.0}) {
        double b = finite_potential_bound(4.0, 4, T, 0.5, 0.5, 0.5);
        CHECK(b > prev);
        prev = b;
        CHECK(std::isfinite(b));
        double shifted = 0.5 / 0.5;
        double main = 4.0 / std::pow(0.5, 0.5) *
                      (psi_alpha(T / 4.0 + shifted, 0.5) - psi_alpha(shifted, 0.5));
        CHECK(b >= main);
    }
    CHECK_THROWS_AS(finite_potential_bound(4.0, 4, 100.0, 0.5, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(finite_potential_bound(4.0, 4, 100.0, 0.5, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("check_bound slack rule") {
    CHECK(check_bound(1.0, 2.0).satisfied);
    CHECK(!check_bound(2.0, 1.0).satisfied);
    CHECK(check_bound(1.0, 1.0).satisfied);
    BoundReport r = check_bound(3.0, 5.0, "demo");
    CHECK(r.slack == doctest::Approx(2.0));
    CHECK(r.bound_name == "demo");
}
