#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "banditlab/common.hpp"

namespace banditlab::adaptivity {

enum class PolicyKind { AdaptiveGreedy, Offline, SingleMonitoring };

struct DecayConfig {
    int d = 1;
    std::vector<double> p;
    double lambda = 1.0;
    double alpha = 1.0;   // in (0,1]
    long long T = 1;
    PolicyKind policy = PolicyKind::Offline;
    double beta = 0.5;    // SingleMonitoring split, in (0,1)

    void validate() const;
};

struct GainEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;
    long long replications = 0;
    double scaled = 0.0;  // T^alpha * mean
    long long clamped_count = 0;
};

// One V_alpha realization of the censored decaying process under the given
// policy. Censorship fates are indexed by (arm, pull-count) so paired policy
// evaluations under the same (master_seed, stream) share them.
double simulate_decaying(const DecayConfig& config, std::uint64_t master_seed,
                         std::uint64_t stream_id, long long* clamped = nullptr);

// Paired-mean difference of V_alpha between two policies under common random
// numbers, with scaled = T^alpha * mean.
GainEstimate estimate_gain(const DecayConfig& adaptive, const DecayConfig& baseline,
                           long long replications, std::uint64_t master_seed, int jobs = 1);

// Largest-remainder rounding of the offline allocation T/(p_a d_eff); sums to T.
std::vector<long long> offline_allocation(const std::vector<double>& p, long long T);

}  // namespace banditlab::adaptivity
