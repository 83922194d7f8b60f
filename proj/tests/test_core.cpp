#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "banditlab/core.hpp"

using namespace banditlab;
using namespace banditlab::core;

namespace {

constexpr double kPi = 3.14159265358979323846;

MtModel single_threshold(double phi1, double p0, double p1, int d) {
    std::vector<double> u(static_cast<size_t>(d), 0.0);
    u.back() = 1.0;
    return make_mt_model({-kPi / 2, phi1, kPi / 2}, {p0, p1}, u);
}

std::vector<double> action_with_dot(int d, double dot) {
    // unit vector with <a, e_d> = dot
    std::vector<double> a(static_cast<size_t>(d), 0.0);
    a.back() = dot;
    a.front() += std::sqrt(1.0 - dot * dot);
    return a;
}

}  // namespace

TEST_CASE("censorship_probability uniform is constant") {
    CensorshipSpec spec{UniformCensorship{0.7}};
    CHECK(censorship_probability(spec, action_with_dot(3, 0.3)) == 0.7);
    CHECK(censorship_probability(spec, action_with_dot(3, -0.9)) == 0.7);
    CHECK(censorship_probability(spec, 2) == 0.7);
}

TEST_CASE("censorship_probability multi-threshold interval membership") {
    // k=1, phi_1 = pi/6, p = (0.9, 0.3): boundary at sin(pi/6) = 0.5
    MtModel m = single_threshold(kPi / 6, 0.9, 0.3, 3);
    CensorshipSpec spec{m};
    CHECK(censorship_probability(spec, action_with_dot(3, 0.8)) == doctest::Approx(0.3));
    CHECK(censorship_probability(spec, action_with_dot(3, 0.2)) == doctest::Approx(0.9));
    // boundary <a,u> = +1 belongs to the last region
    CHECK(censorship_probability(spec, action_with_dot(3, 1.0)) == doctest::Approx(0.3));
    CHECK(censorship_probability(spec, action_with_dot(3, 0.5)) == doctest::Approx(0.3));
}

TEST_CASE("censorship_probability errors") {
    CensorshipSpec per_arm{PerArmCensorship{{0.5, 0.9}}};
    CHECK_THROWS_AS(censorship_probability(per_arm, 2), std::invalid_argument);
    CHECK_THROWS_AS(censorship_probability(per_arm, -1), std::invalid_argument);

    MtModel m = single_threshold(kPi / 6, 0.9, 0.3, 3);
    CensorshipSpec spec{m};
    CHECK_THROWS_AS(censorship_probability(spec, std::vector<double>{1.0, 0.0}),
                    std::invalid_argument);  // dimension mismatch
    CHECK_THROWS_AS(censorship_probability(spec, std::vector<double>{1.0, 1.0, 1.0}),
                    std::invalid_argument);  // outside the unit ball
}

TEST_CASE("multi-threshold monotone non-increasing in <a,u>") {
    MtModel m = make_mt_model({-kPi / 2, -0.4, 0.3, kPi / 2}, {0.95, 0.5, 0.2},
                              {0.0, 0.0, 1.0});
    CensorshipSpec spec{m};
    RngStream rng(11, 0);
    for (int trial = 0; trial < 200; ++trial) {
        double d1 = 2.0 * rng.next_u01() - 1.0;
        double d2 = 2.0 * rng.next_u01() - 1.0;
        if (d1 > d2) std::swap(d1, d2);
        double p1 = censorship_probability(spec, action_with_dot(3, d1));
        double p2 = censorship_probability(spec, action_with_dot(3, d2));
        CHECK(p1 >= p2);
    }
}

TEST_CASE("uniform equals single-region multi-threshold") {
    MtModel m = make_mt_model({-kPi / 2, kPi / 2}, {0.45}, {0.0, 1.0});
    CensorshipSpec mt{m};
    CensorshipSpec uni{UniformCensorship{0.45}};
    RngStream rng(5, 1);
    for (int trial = 0; trial < 100; ++trial) {
        double dot = 2.0 * rng.next_u01() - 1.0;
        auto a = action_with_dot(2, dot);
        CHECK(censorship_probability(mt, a) == censorship_probability(uni, a));
    }
}

TEST_CASE("multi-threshold model validation") {
    std::vector<double> u{0.0, 1.0};
    CHECK_THROWS(make_mt_model({-kPi / 2, 0.2, kPi / 2}, {0.5, 0.5}, u));  // not monotone
    CHECK_THROWS(make_mt_model({-kPi / 2, 0.2, kPi / 2}, {0.5, 1.2}, u));  // out of range
    CHECK_THROWS(make_mt_model({0.0, 0.2, kPi / 2}, {0.9, 0.5}, u));       // phi_0 wrong
    CHECK_THROWS(make_mt_model({-kPi / 2, 0.2, kPi / 2}, {0.9, 0.5}, {0.0, 2.0}));  // not unit

    // Increasing probabilities canonicalize by reflection.
    MtModel m = make_mt_model({-kPi / 2, kPi / 6, kPi / 2}, {0.4, 0.8}, u);
    CHECK(m.reflected);
    CHECK(m.probs[0] == 0.8);
    CHECK(m.probs[1] == 0.4);
    CHECK(m.angles[1] == doctest::Approx(-kPi / 6));
    CHECK(m.u[1] == -1.0);
    // p(a) is preserved under the reflection: the original top slab kept 0.8
    CensorshipSpec spec{m};
    CHECK(censorship_probability(spec, action_with_dot(2, 0.8)) == doctest::Approx(0.8));
    CHECK(censorship_probability(spec, action_with_dot(2, 0.0)) == doctest::Approx(0.4));
}

TEST_CASE("sample_realization degenerate and validation") {
    RngStream rng(99, 0);
    for (int i = 0; i < 1000; ++i) CHECK(sample_realization(1.0, rng));
    CHECK_THROWS_AS(sample_realization(0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_realization(1.5, rng), std::invalid_argument);
}

TEST_CASE("sample_realization replays exactly under identical streams") {
    RngStream a(1234, 7), b(1234, 7);
    for (int i = 0; i < 500; ++i) CHECK(sample_realization(0.5, a) == sample_realization(0.5, b));
}

TEST_CASE("sample_realization empirical mean") {
    RngStream rng(2024, 3);
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) hits += sample_realization(0.3, rng) ? 1 : 0;
    CHECK(std::abs(static_cast<double>(hits) / n - 0.3) < 0.01);
}

TEST_CASE("realization_fate is a pure function of its indices") {
    CHECK(realization_fate(0.5, 1, 2, 3, 4) == realization_fate(0.5, 1, 2, 3, 4));
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) hits += realization_fate(0.3, 42, 0, 1, i) ? 1 : 0;
    CHECK(std::abs(static_cast<double>(hits) / n - 0.3) < 0.01);
}

TEST_CASE("censorship and noise JSON round trip") {
    MtModel m = make_mt_model({-kPi / 2, 0.5, kPi / 2}, {0.9, 0.4}, {0.0, 0.0, 1.0});
    CensorshipSpec spec{m};
    CensorshipSpec back = censorship_from_json(to_json(spec));
    CHECK(back.is_multi_threshold());
    CHECK(back.mt().angles == m.angles);
    CHECK(back.mt().probs == m.probs);

    CensorshipSpec uni{UniformCensorship{0.25}};
    CHECK(censorship_from_json(to_json(uni)).uniform().pbar == 0.25);

    NoiseSpec noise;
    noise.sigma = 0.1;
    noise.per_arm_sigma = std::vector<double>{0.1, 0.2};
    NoiseSpec nback = noise_from_json(to_json(noise));
    CHECK(nback.sigma == 0.1);
    CHECK(nback.per_arm_sigma.has_value());
    CHECK(nback.sigma_for_arm(1) == 0.2);

    CHECK_THROWS(censorship_from_json(nlohmann::json{{"kind", "mystery"}}));
}

TEST_CASE("mt region probability via general direction u") {
    // Same model expressed along a rotated axis gives the same probabilities.
    double inv = 1.0 / std::sqrt(2.0);
    MtModel m = make_mt_model({-kPi / 2, kPi / 6, kPi / 2}, {0.9, 0.3}, {inv, inv});
    CensorshipSpec spec{m};
    // a = 0.8*u + 0.6*u_perp with u_perp = (-inv, inv)
    std::vector<double> a{0.8 * inv - 0.6 * inv, 0.8 * inv + 0.6 * inv};
    CHECK(censorship_probability(spec, a) == doctest::Approx(0.3));
}
