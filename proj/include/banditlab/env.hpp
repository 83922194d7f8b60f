#pragma once

#include <optional>
#include <vector>

#include "banditlab/core.hpp"

namespace banditlab::env {

struct RunRecord {
    long long t = 0;
    int arm = -1;                       // MAB arm, -1 for LCB
    std::vector<double> action;         // LCB action, empty for MAB
    bool realized = false;
    std::optional<double> reward;       // present iff realized
    double gap = 0.0;
};

// Optional sleeping-arms schedule: arm a is awake at round t with probability
// awake_prob, deterministically in the seed; at least one arm (the one hashed
// first) is forced awake each round.
struct SleepingSchedule {
    bool enabled = false;
    double awake_prob = 1.0;
    std::uint64_t seed = 0;
};

struct MabInstance {
    std::vector<double> theta_star;
    core::NoiseSpec noise;
    core::CensorshipSpec censorship;  // PerArm or Uniform
    SleepingSchedule sleeping;

    int d() const { return static_cast<int>(theta_star.size()); }
    double arm_probability(int arm) const { return core::censorship_probability(censorship, arm); }
    std::vector<int> available_arms(long long t) const;
    double best_available(long long t) const;
    void validate() const;
};

struct LcbInstance {
    std::vector<double> theta_star;
    double s_bound = 1.0;  // ||theta*||_2 <= s_bound
    core::NoiseSpec noise;
    core::CensorshipSpec censorship;  // Uniform or MultiThreshold
    std::uint64_t action_set_seed = 0;
    int actions_per_round = 2;

    int d() const { return static_cast<int>(theta_star.size()); }
    void validate() const;
};

// T rounds of m unit vectors each, uniform on the sphere, fixed by the seed
// before any policy interaction.
std::vector<std::vector<std::vector<double>>> generate_action_sets(std::uint64_t seed,
                                                                   long long T, int d, int m);

// One environment transition. The reward is drawn regardless of realization;
// policies must only be shown it when realized.
RunRecord step(const MabInstance& instance, long long t, int arm, RngStream& rng);
RunRecord step(const LcbInstance& instance, long long t, const std::vector<double>& action,
               const std::vector<std::vector<double>>& action_set, RngStream& rng);

}  // namespace banditlab::env
