#pragma once

#include <optional>
#include <string>
#include <vector>

#include "banditlab/env.hpp"
#include "banditlab/policy.hpp"
#include "banditlab/potential.hpp"

namespace banditlab::regret {

struct RegretCurve {
    std::vector<long long> horizons;   // ascending geometric checkpoints ending at T
    std::vector<double> mean_regret;
    std::vector<double> stderr_mean;
    long long replications = 0;
    std::string config_digest;
};

struct MabPolicyParams {
    double lambda = 1.0;
    double theta_inf_bound = 1.0;
    bool heteroskedastic = false;  // use the instance's per-arm sigmas in the index
};

struct LcbPolicyParams {
    double lambda = 1.0;
    std::optional<double> delta;  // defaults to d/T^2
    double theta_l2_bound = 1.0;
};

// Cumulative pseudo-regret of censored UCB at geometric checkpoints; one
// RngStream per replication. mean_v1, when requested, receives the mean over
// replications of the cumulative censored potential V_1.
RegretCurve run_mab_regret(const env::MabInstance& instance, const MabPolicyParams& params,
                           long long T, long long replications, std::uint64_t master_seed,
                           double* mean_v1 = nullptr,
                           std::vector<double>* mean_pulls = nullptr, int jobs = 1);

RegretCurve run_lcb_regret(const env::LcbInstance& instance, const LcbPolicyParams& params,
                           long long T, long long replications, std::uint64_t master_seed,
                           double* mean_v1 = nullptr, int jobs = 1);

struct InstanceCheckResult {
    potential::BoundReport report;       // mean regret vs. the assembled bound
    std::vector<double> mean_pulls;      // per-arm mean pull counts at T
    double mean_regret = 0.0;
};

// Instance-dependent regret check against the explicit constant assembled
// from the regularized-UCB analysis. Rejects degenerate gaps on suboptimal arms.
InstanceCheckResult instance_dependent_check(const env::MabInstance& instance,
                                             const MabPolicyParams& params, long long T,
                                             long long replications,
                                             std::uint64_t master_seed, int jobs = 1);

std::vector<long long> geometric_checkpoints(long long T);

}  // namespace banditlab::regret
