#include <doctest.h>

#include <cmath>

#include "banditlab/env.hpp"
#include "banditlab/policy.hpp"

using namespace banditlab;
using namespace banditlab::policy;

TEST_CASE("mab_index fresh-arm value matches the estimator formula") {
    // N=0, S=0, lambda=1, sigma=1, T=e (log T = 1), bound=1 -> 0 + sqrt(6) + 1
    MabUcbState state(2, 1.0, 1.0, std::exp(1.0), 1.0);
    CHECK(mab_index(state, 0) == doctest::Approx(3.449489742783178).epsilon(1e-12));
}

TEST_CASE("mab_index width vanishes as realizations grow") {
    MabUcbState state(1, 1.0, 1.0, 1000, 1.0);
    state.n[0] = 1000000;
    state.s[0] = 0.5 * (1000000.0 + 1.0);  // theta_hat = 0.5
    CHECK(mab_index(state, 0) == doctest::Approx(0.5).epsilon(1e-2));
    // monotone decreasing in N for fixed theta_hat
    double prev = 1e300;
    for (long long n : {0LL, 1LL, 5LL, 50LL, 500LL}) {
        MabUcbState s(1, 1.0, 1.0, 1000, 1.0);
        s.n[0] = n;
        s.s[0] = 0.25 * (static_cast<double>(n) + 1.0);
        double idx = mab_index(s, 0);
        CHECK(idx < prev);
        prev = idx;
    }
}

TEST_CASE("mab_index heteroskedastic zero-variance arm") {
    MabUcbState state(2, 1.0, 1.0, 100, 2.0);
    state.per_arm_sigma = std::vector<double>{0.0, 1.0};
    state.n[0] = 3;
    state.s[0] = 2.0;
    double expected = 2.0 / 4.0 + 1.0 * 2.0 / 4.0;  // theta_hat + lambda*bound/(lambda+N)
    CHECK(mab_index(state, 0) == doctest::Approx(expected));
}

TEST_CASE("mab_select ties break to the lowest index") {
    MabUcbState state(4, 1.0, 1.0, 100, 1.0);
    CHECK(mab_select(state, {0, 1, 2, 3}) == 0);
    CHECK(mab_select(state, {2, 3}) == 2);
    CHECK(mab_select(state, {3}) == 3);
    CHECK_THROWS_AS(mab_select(state, {}), std::invalid_argument);
}

TEST_CASE("mab_select fresh arm beats a resolved arm when width exceeds the gap") {
    MabUcbState state(2, 1.0, 1.0, 3, 1.0);  // log T ~ 1.1, fresh width ~ sqrt(6.6)+1 > 3.4
    state.n[0] = 1000;
    state.s[0] = 3.0 * 1001.0;  // theta_hat ~ 3, width tiny
    CHECK(mab_select(state, {0, 1}) == 1);
}

TEST_CASE("mab_update censored rounds only advance the pull count") {
    MabUcbState state(2, 1.0, 1.0, 100, 1.0);
    mab_update(state, 0, 123.0, false);
    CHECK(state.tau[0] == 1);
    CHECK(state.n[0] == 0);
    CHECK(state.s[0] == 0.0);

    mab_update(state, 0, 2.5, true);
    CHECK(state.theta_hat(0) == doctest::Approx(2.5 / 2.0));

    MabUcbState st2(1, 0.5, 1.0, 100, 1.0);
    mab_update(st2, 0, 1.0, true);
    mab_update(st2, 0, 3.0, true);
    CHECK(st2.theta_hat(0) == doctest::Approx(4.0 / 2.5));
}

TEST_CASE("lcb_beta closed forms") {
    // t = 0: det ratio 1 -> beta = sqrt(2 sigma^2 log(1/delta)) + sqrt(lambda)*S
    LcbUcbState state(3, 2.0, 0.5, 0.1, 1.5);
    double expected = std::sqrt(2.0 * 0.25 * std::log(10.0)) + std::sqrt(2.0) * 1.5;
    CHECK(lcb_beta(state) == doctest::Approx(expected).epsilon(1e-12));

    // sigma = 0 -> beta = sqrt(lambda) * S for all t
    LcbUcbState s0(2, 4.0, 0.0, 0.5, 0.7);
    CHECK(lcb_beta(s0) == doctest::Approx(2.0 * 0.7));
    lcb_update(s0, {1.0, 0.0}, 1.0, true);
    CHECK(lcb_beta(s0) == doctest::Approx(2.0 * 0.7));

    // d=1, lambda=1, one realized action a=1, sigma=1, delta=1:
    // beta = sqrt(log 2) + ||theta*||_2
    LcbUcbState s1(1, 1.0, 1.0, 1.0, 0.3);
    lcb_update(s1, {1.0}, 0.0, true);
    CHECK(lcb_beta(s1) == doctest::Approx(std::sqrt(std::log(2.0)) + 0.3).epsilon(1e-12));
}

TEST_CASE("lcb_select tie and width behavior") {
    LcbUcbState state(2, 1.0, 1.0, 0.1, 1.0);
    std::vector<std::vector<double>> basis{{1.0, 0.0}, {0.0, 1.0}};
    CHECK(lcb_select(state, basis) == 0);  // equal widths, first occurrence

    // after many realized pulls of e_1 the e_2 width dominates
    for (int i = 0; i < 100; ++i) lcb_update(state, basis[0], 0.5, true);
    CHECK(lcb_select(state, basis) == 1);

    // beta = 0 (sigma = 0, zero norm bound) -> pure greedy on theta_hat
    LcbUcbState greedy(2, 1.0, 0.0, 0.5, 0.0);
    for (int i = 0; i < 5; ++i) greedy.b += Eigen::Vector2d(1.0, 0.0);  // theta_hat along e_1
    CHECK(lcb_select(greedy, basis) == 0);
    CHECK_THROWS_AS(lcb_select(state, {}), std::invalid_argument);
}

TEST_CASE("lcb_update accumulates realized rank-one terms only") {
    LcbUcbState state(2, 1.0, 1.0, 0.1, 1.0);
    Eigen::MatrixXd before = state.wc;
    lcb_update(state, {1.0, 0.0}, 5.0, false);
    CHECK((state.wc - before).norm() == 0.0);
    CHECK(state.b.norm() == 0.0);

    lcb_update(state, {1.0, 0.0}, 1.0, true);
    Eigen::VectorXd theta = state.theta_hat();
    CHECK(theta(0) == doctest::Approx(0.5));
    CHECK(theta(1) == doctest::Approx(0.0));

    CHECK_THROWS(lcb_update(state, {2.0, 0.0}, 1.0, true));  // outside the unit ball
}

TEST_CASE("orthogonal realized updates commute") {
    LcbUcbState a(2, 1.0, 1.0, 0.1, 1.0), b(2, 1.0, 1.0, 0.1, 1.0);
    std::vector<double> e1{1.0, 0.0}, e2{0.0, 1.0};
    lcb_update(a, e1, 1.0, true);
    lcb_update(a, e2, -0.5, true);
    lcb_update(b, e2, -0.5, true);
    lcb_update(b, e1, 1.0, true);
    CHECK((a.wc - b.wc).norm() == 0.0);
    CHECK((a.b - b.b).norm() == 0.0);
}

TEST_CASE("near-zero regularization reproduces the pull-each-arm-once start") {
    const int d = 6;
    MabUcbState state(d, 1e-8, 1.0, 1000, 1.0);
    std::vector<int> all(d);
    for (int a = 0; a < d; ++a) all[static_cast<size_t>(a)] = a;
    std::vector<bool> seen(d, false);
    RngStream rng(17, 0);
    for (int t = 0; t < d; ++t) {
        int arm = mab_select(state, all);
        CHECK(!seen[static_cast<size_t>(arm)]);
        seen[static_cast<size_t>(arm)] = true;
        mab_update(state, arm, rng.next_gauss(), true);  // p == 1
    }
}

TEST_CASE("high-probability optimism at desk scale") {
    // Frequency of any (t, a) with |theta_hat - theta*| above the width is
    // <= 2d/T^2 plus binomial slack.
    const int d = 3;
    const long long T = 200;
    const int reps = 2000;
    const double sigma = 0.5, lambda = 1.0;
    std::vector<double> theta{0.4, 0.2, 0.0};
    env::MabInstance inst;
    inst.theta_star = theta;
    inst.noise.sigma = sigma;
    inst.censorship.model = core::UniformCensorship{0.6};
    int violations = 0;
    for (int r = 0; r < reps; ++r) {
        RngStream rng(555, static_cast<std::uint64_t>(r));
        MabUcbState state(d, lambda, sigma, T, 0.4);
        bool bad = false;
        for (long long t = 1; t <= T && !bad; ++t) {
            int arm = mab_select(state, {0, 1, 2});
            env::RunRecord rec = env::step(inst, t, arm, rng);
            mab_update(state, arm, rec.reward.value_or(0.0), rec.realized);
            for (int a = 0; a < d; ++a) {
                double denom = lambda + static_cast<double>(state.n[static_cast<size_t>(a)]);
                double width = std::sqrt(6.0 * sigma * sigma * std::log(static_cast<double>(T)) /
                                         denom) +
                               lambda * 0.4 / denom;
                if (std::abs(state.theta_hat(a) - theta[static_cast<size_t>(a)]) > width)
                    bad = true;
            }
        }
        violations += bad ? 1 : 0;
    }
    double freq = static_cast<double>(violations) / reps;
    double bound = 2.0 * d / (static_cast<double>(T) * static_cast<double>(T));
    CHECK(freq <= bound + 3.0 * std::sqrt(0.25 / reps));
}

TEST_CASE("self-normalized confidence for the censored least squares") {
    const int d = 2;
    const long long T = 150;
    const int reps = 1500;
    const double sigma = 0.3, lambda = 1.0, delta = 0.1;
    env::LcbInstance inst;
    inst.theta_star = {0.6, -0.2};
    inst.s_bound = 1.0;
    inst.noise.sigma = sigma;
    inst.censorship.model = core::UniformCensorship{0.7};
    inst.actions_per_round = 4;
    Eigen::Vector2d truth(0.6, -0.2);
    int violations = 0;
    for (int r = 0; r < reps; ++r) {
        RngStream rng(808, static_cast<std::uint64_t>(r));
        auto sets = env::generate_action_sets(mix64(3, static_cast<std::uint64_t>(r)), T, d, 4);
        LcbUcbState state(d, lambda, sigma, delta, 1.0);
        bool bad = false;
        for (long long t = 1; t <= T && !bad; ++t) {
            const auto& set = sets[static_cast<size_t>(t - 1)];
            int pick = lcb_select(state, set);
            env::RunRecord rec = env::step(inst, t, set[static_cast<size_t>(pick)], set, rng);
            lcb_update(state, set[static_cast<size_t>(pick)], rec.reward.value_or(0.0),
                       rec.realized);
            Eigen::VectorXd diff = state.theta_hat() - truth;
            double norm = std::sqrt(diff.dot(state.wc * diff));
            if (norm > lcb_beta(state)) bad = true;
        }
        violations += bad ? 1 : 0;
    }
    double freq = static_cast<double>(violations) / reps;
    CHECK(freq <= delta + 3.0 * std::sqrt(delta * (1 - delta) / reps));
}
