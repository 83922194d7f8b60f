#include <doctest.h>

#include <cmath>

#include "banditlab/env.hpp"

using namespace banditlab;
using namespace banditlab::env;

namespace {

MabInstance simple_mab(std::vector<double> means, double sigma, double pbar) {
    MabInstance inst;
    inst.theta_star = std::move(means);
    inst.noise.sigma = sigma;
    inst.censorship.model = core::UniformCensorship{pbar};
    return inst;
}

}  // namespace

TEST_CASE("generate_action_sets is deterministic in the seed") {
    auto a = generate_action_sets(7, 2, 3, 4);
    auto b = generate_action_sets(7, 2, 3, 4);
    CHECK(a == b);
    auto c = generate_action_sets(8, 2, 3, 4);
    CHECK(a != c);
}

TEST_CASE("generate_action_sets emits unit vectors") {
    auto sets = generate_action_sets(3, 50, 4, 6);
    for (const auto& set : sets) {
        CHECK(set.size() == 6);
        for (const auto& v : set) {
            double n2 = 0.0;
            for (double x : v) n2 += x * x;
            CHECK(std::abs(std::sqrt(n2) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("generate_action_sets sphere symmetry") {
    auto sets = generate_action_sets(12, 20000, 3, 5);
    double mean = 0.0;
    long long n = 0;
    for (const auto& set : sets)
        for (const auto& v : set) {
            mean += v[0];
            ++n;
        }
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean) < 0.02);
}

TEST_CASE("mab step noiseless uncensored") {
    MabInstance inst = simple_mab({1.0, 0.0}, 0.0, 1.0);
    RngStream rng(1, 0);
    RunRecord rec = step(inst, 1, 0, rng);
    CHECK(rec.realized);
    REQUIRE(rec.reward.has_value());
    CHECK(*rec.reward == doctest::Approx(1.0));
    CHECK(rec.gap == doctest::Approx(0.0));
    RunRecord rec2 = step(inst, 2, 1, rng);
    CHECK(rec2.gap == doctest::Approx(1.0));
}

TEST_CASE("mab step realization frequency") {
    MabInstance inst = simple_mab({0.0}, 1.0, 0.5);
    RngStream rng(77, 0);
    int realized = 0;
    const int n = 10000;
    for (int t = 1; t <= n; ++t) realized += step(inst, t, 0, rng).realized ? 1 : 0;
    CHECK(std::abs(static_cast<double>(realized) / n - 0.5) < 0.02);
}

TEST_CASE("mab reward present iff realized") {
    MabInstance inst = simple_mab({0.3, 0.1}, 0.5, 0.4);
    RngStream rng(5, 2);
    for (int t = 1; t <= 200; ++t) {
        RunRecord rec = step(inst, t, t % 2, rng);
        CHECK(rec.reward.has_value() == rec.realized);
        CHECK(rec.gap >= 0.0);
    }
}

TEST_CASE("lcb step noiseless inner product") {
    LcbInstance inst;
    inst.theta_star = {1.0, 0.0};
    inst.s_bound = 1.0;
    inst.noise.sigma = 0.0;
    inst.censorship.model = core::UniformCensorship{1.0};
    inst.actions_per_round = 2;
    std::vector<std::vector<double>> set{{1.0, 0.0}, {0.0, 1.0}};
    RngStream rng(9, 0);
    RunRecord rec = step(inst, 1, set[0], set, rng);
    REQUIRE(rec.reward.has_value());
    CHECK(*rec.reward == doctest::Approx(1.0));
    CHECK(rec.gap == doctest::Approx(0.0));
    RunRecord rec2 = step(inst, 2, set[1], set, rng);
    CHECK(rec2.gap == doctest::Approx(1.0));
}

TEST_CASE("clairvoyant policy accumulates zero pseudo-regret") {
    MabInstance inst = simple_mab({0.9, 0.5, 0.1}, 0.3, 0.8);
    RngStream rng(4, 0);
    double regret = 0.0;
    for (int t = 1; t <= 500; ++t) regret += step(inst, t, 0, rng).gap;
    CHECK(regret == 0.0);
}

TEST_CASE("noise residuals are uncorrelated across rounds") {
    MabInstance inst = simple_mab({0.0}, 1.0, 1.0);
    RngStream rng(31, 0);
    const int n = 20000;
    std::vector<double> res;
    res.reserve(n);
    for (int t = 1; t <= n; ++t) res.push_back(*step(inst, t, 0, rng).reward);
    double mean = 0.0;
    for (double r : res) mean += r;
    mean /= n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        num += (res[i] - mean) * (res[i + 1] - mean);
        den += (res[i] - mean) * (res[i] - mean);
    }
    CHECK(std::abs(num / den) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sleeping schedule is deterministic and never empty") {
    MabInstance inst = simple_mab({0.1, 0.2, 0.3}, 0.0, 1.0);
    inst.sleeping = {true, 0.5, 99};
    for (int t = 1; t <= 100; ++t) {
        auto arms = inst.available_arms(t);
        CHECK(!arms.empty());
        CHECK(inst.available_arms(t) == arms);
        double best = inst.best_available(t);
        for (int a : arms) CHECK(best >= inst.theta_star[static_cast<size_t>(a)]);
    }
}

TEST_CASE("instance validation") {
    MabInstance bad = simple_mab({0.1}, -1.0, 0.5);
    CHECK_THROWS(bad.validate());
    MabInstance mismatch = simple_mab({0.1, 0.2}, 0.5, 0.5);
    mismatch.censorship.model = core::PerArmCensorship{{0.5}};
    CHECK_THROWS(mismatch.validate());

    LcbInstance lcb;
    lcb.theta_star = {2.0, 0.0};
    lcb.s_bound = 1.0;  // norm exceeds bound
    lcb.censorship.model = core::UniformCensorship{1.0};
    CHECK_THROWS(lcb.validate());
}
