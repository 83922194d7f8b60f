#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "banditlab/common.hpp"

namespace banditlab::policy {

// Regularized UCB state for MAB with censored statistics. Realized rewards
// feed theta_hat; censored rounds only advance the pull count.
struct MabUcbState {
    std::vector<long long> tau;  // pulls
    std::vector<long long> n;    // realizations
    std::vector<double> s;       // sum of realized rewards
    double lambda = 1.0;
    double sigma = 1.0;
    std::optional<std::vector<double>> per_arm_sigma;
    double horizon = 2.0;  // enters the index through log(horizon)
    double theta_inf_bound = 1.0;

    MabUcbState(int d, double lambda, double sigma, double horizon, double theta_inf_bound);

    int d() const { return static_cast<int>(tau.size()); }
    double theta_hat(int a) const {
        return s[static_cast<size_t>(a)] /
               (static_cast<double>(n[static_cast<size_t>(a)]) + lambda);
    }
    void validate() const;
};

double mab_index(const MabUcbState& state, int a);
int mab_select(const MabUcbState& state, const std::vector<int>& available);
void mab_update(MabUcbState& state, int a, double reward, bool realized);

// OFUL-style UCB state for LCB: W^C = lambda*I + sum of realized a a^T,
// b = sum of realized y*a. (W^C)^{-1}-quantities go through factorizations,
// never an explicit inverse.
struct LcbUcbState {
    Eigen::MatrixXd wc;
    Eigen::VectorXd b;
    double lambda = 1.0;
    double sigma = 1.0;
    double delta = 0.1;
    double theta_l2_bound = 1.0;

    LcbUcbState(int d, double lambda, double sigma, double delta, double theta_l2_bound);

    int d() const { return static_cast<int>(b.size()); }
    Eigen::VectorXd theta_hat() const;
    void validate() const;
};

double lcb_beta(const LcbUcbState& state);
int lcb_select(const LcbUcbState& state, const std::vector<std::vector<double>>& action_set);
void lcb_update(LcbUcbState& state, const std::vector<double>& a, double reward, bool realized);

}  // namespace banditlab::policy
