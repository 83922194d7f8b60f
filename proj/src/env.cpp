#include "banditlab/env.hpp"

#include <algorithm>
#include <cmath>

namespace banditlab::env {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::vector<int> MabInstance::available_arms(long long t) const {
    std::vector<int> arms;
    const int n = d();
    if (!sleeping.enabled) {
        arms.resize(static_cast<size_t>(n));
        for (int a = 0; a < n; ++a) arms[static_cast<size_t>(a)] = a;
        return arms;
    }
    int forced = static_cast<int>(mix64(sleeping.seed, static_cast<std::uint64_t>(t)) %
                                  static_cast<std::uint64_t>(n));
    for (int a = 0; a < n; ++a) {
        double u = u01_from_bits(mix64(sleeping.seed, static_cast<std::uint64_t>(t),
                                       static_cast<std::uint64_t>(a) + 1));
        if (a == forced || u < sleeping.awake_prob) arms.push_back(a);
    }
    return arms;
}

double MabInstance::best_available(long long t) const {
    double best = -std::numeric_limits<double>::infinity();
    for (int a : available_arms(t)) best = std::max(best, theta_star[static_cast<size_t>(a)]);
    return best;
}

void MabInstance::validate() const {
    require(d() >= 1, "MabInstance: at least one arm required");
    censorship.validate();
    require(!censorship.is_multi_threshold(),
            "MabInstance: censorship must be per-arm or uniform");
    if (censorship.is_per_arm())
        require(static_cast<int>(censorship.per_arm().probabilities.size()) == d(),
                "MabInstance: per-arm censorship length must equal arm count");
    noise.validate(d());
    for (double v : theta_star) require(std::isfinite(v), "MabInstance: non-finite mean");
    if (sleeping.enabled)
        require(sleeping.awake_prob > 0.0 && sleeping.awake_prob <= 1.0,
                "MabInstance: awake_prob must lie in (0,1]");
}

void LcbInstance::validate() const {
    require(d() >= 1, "LcbInstance: dimension must be >= 1");
    require(actions_per_round >= 2, "LcbInstance: actions_per_round must be >= 2");
    double n2 = 0.0;
    for (double v : theta_star) n2 += v * v;
    require(std::sqrt(n2) <= s_bound + 1e-12, "LcbInstance: ||theta*|| exceeds s_bound");
    censorship.validate();
    require(!censorship.is_per_arm(), "LcbInstance: censorship must be uniform or multi-threshold");
    if (censorship.is_multi_threshold())
        require(censorship.mt().dim() == d(), "LcbInstance: censorship dimension mismatch");
    noise.validate(d());
}

std::vector<std::vector<std::vector<double>>> generate_action_sets(std::uint64_t seed,
                                                                   long long T, int d, int m) {
    require(T >= 1 && d >= 1 && m >= 1, "generate_action_sets: T, d, m must be >= 1");
    RngStream rng(seed, 0x4143544e53ULL);
    std::vector<std::vector<std::vector<double>>> sets(static_cast<size_t>(T));
    for (auto& set : sets) {
        set.resize(static_cast<size_t>(m));
        for (auto& a : set) {
            a.resize(static_cast<size_t>(d));
            double n2 = 0.0;
            do {
                n2 = 0.0;
                for (double& x : a) {
                    x = rng.next_gauss();
                    n2 += x * x;
                }
            } while (n2 < 1e-24);
            double inv = 1.0 / std::sqrt(n2);
            for (double& x : a) x *= inv;
        }
    }
    return sets;
}

RunRecord step(const MabInstance& instance, long long t, int arm, RngStream& rng) {
    require(arm >= 0 && arm < instance.d(), "step: invalid arm");
    RunRecord rec;
    rec.t = t;
    rec.arm = arm;
    double mean = instance.theta_star[static_cast<size_t>(arm)];
    double sigma = instance.noise.sigma_for_arm(arm);
    double reward = mean + (sigma > 0.0 ? sigma * rng.next_gauss() : 0.0);
    double p = instance.arm_probability(arm);
    rec.realized = core::sample_realization(p, rng);
    if (rec.realized) rec.reward = reward;
    rec.gap = instance.best_available(t) - mean;
    return rec;
}

RunRecord step(const LcbInstance& instance, long long t, const std::vector<double>& action,
               const std::vector<std::vector<double>>& action_set, RngStream& rng) {
    require(static_cast<int>(action.size()) == instance.d(), "step: action dimension mismatch");
    RunRecord rec;
    rec.t = t;
    rec.action = action;
    double mean = 0.0;
    for (int i = 0; i < instance.d(); ++i)
        mean += action[static_cast<size_t>(i)] * instance.theta_star[static_cast<size_t>(i)];
    double sigma = instance.noise.sigma;
    double reward = mean + (sigma > 0.0 ? sigma * rng.next_gauss() : 0.0);
    double p = instance.censorship.is_uniform()
                   ? instance.censorship.uniform().pbar
                   : core::censorship_probability(instance.censorship, action);
    rec.realized = core::sample_realization(p, rng);
    if (rec.realized) rec.reward = reward;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& a : action_set) {
        double r = 0.0;
        for (int i = 0; i < instance.d(); ++i)
            r += a[static_cast<size_t>(i)] * instance.theta_star[static_cast<size_t>(i)];
        best = std::max(best, r);
    }
    rec.gap = best - mean;
    return rec;
}

}  // namespace banditlab::env
