#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "banditlab/core.hpp"

namespace banditlab::deff {

struct WaterFillingSolution {
    std::vector<double> tau_star;
    double water_level = 0.0;  // C
    double value = 0.0;
};

// Water-filling allocation: tau*_a = (1/p_a) * max(C - lambda_a, 0), with the
// level C solved exactly on the active piece of the breakpoint-sorted budget
// equation. Value = sum (1/p_a) (psi_alpha(p_a tau_a + lambda_a) - psi_alpha(lambda_a)).
WaterFillingSolution water_filling(const std::vector<double>& p,
                                   const std::vector<double>& lambdas, double T, double alpha);

// MAB effective dimension: sum 1/p_a, or sum sigma_a^2/p_a when sigmas given.
double d_eff_mab(const std::vector<double>& p,
                 const std::optional<std::vector<double>>& per_arm_sigma = std::nullopt);

// Adaptivity gain constant gamma_alpha(p).
double gamma_alpha(const std::vector<double>& p, double alpha);

// Canonical region geometry of a multi-threshold model. Regions are labeled
// 0..k with strictly decreasing realization probability; each region carries
// a representative design angle (the in-region angle of minimal sin^2) and
// the attainable range of E[sin^2] for in-region mixture designs.
struct RegionGeometry {
    int d = 2;
    int k = 0;
    std::vector<double> sin2;      // representative sin^2 per region
    std::vector<double> cos2;
    std::vector<double> sin2_max;  // upper end of attainable E[sin^2]
    std::vector<double> p;
    std::vector<int> user_region;  // canonical index -> user-facing region
    bool reflected = false;
    bool oracle_only = false;      // canonical phi_1 < 0
};

RegionGeometry region_geometry(const core::MtModel& model);

// Reachability threshold r*(i,j) = ((d-1)u + l)/d = Tr(W_j^{-1} W_i)/d and the
// dual threshold r^+(i,j) = 1/r*(j,i), on canonical region indices i <= j.
double r_star(const core::MtModel& model, int i, int j);
double r_dagger(const core::MtModel& model, int i, int j);

// Budget mu* to reach region i from base region j starting at
// W = diag(lambda_a I_{d-1}, lambda_b). Throws if the region is not reachable
// from that state.
double transient_budget(const core::MtModel& model, int i, int j, double lambda_a,
                        double lambda_b);

struct DiagState {
    double first = 0.0;  // shared value of the first d-1 diagonal entries
    double last = 0.0;
};

struct TrajectoryReport {
    int d = 2;
    double lambda = 1.0;
    RegionGeometry geometry;

    // Transient: strictly decreasing canonical region sequence starting at k,
    // switch times t_0 = 0 < t_1 < ..., and W(t_n) at each time.
    std::vector<int> region_sequence;
    std::vector<int> user_region_sequence;
    std::vector<double> switch_times;
    std::vector<DiagState> states;

    enum class Terminal { SingleRegion, BiRegion };
    Terminal terminal = Terminal::SingleRegion;
    int terminal_region = 0;       // single-region index, or bi-region base j
    int terminal_pair_i = -1;      // bi-region arrived region i
    double lambda_star = 0.0;      // bi-region only
    double scale = 0.0;            // bi-region proportionality factor
    double terminal_sin2 = 0.0;    // single-region terminal design E[sin^2]

    double d_eff = 0.0;

    // Closed-form sign diagnostics per transient leg: "minus", "plus",
    // "neither" or "not-evaluated".
    std::vector<std::string> path_formula_sign;
};

// Alg.-2 dynamics of W(t): transient region switches by smallest reach
// budget, simultaneous arrivals tie-broken to the most censored region,
// terminating in a single-region or bi-region steady state.
TrajectoryReport compute_trajectory(const core::MtModel& model, double lambda, int d);

// Relative first-order-optimality residuals |v_i - v_j| / max(v_i, v_j) at
// each switch time, for the arriving pair (v_x = (1/p_x) Tr(W^{-1} W_x)).
std::vector<double> switch_optimality_residuals(const TrajectoryReport& report);

// Exact value of the design maximization at horizon T along the trajectory.
// If T falls inside the transient, the value is truncated mid-leg and
// *truncated is set.
double optimization_value(const TrajectoryReport& report, double T, bool* truncated = nullptr);

// Greedy discretized maximization over per-step choices among the region
// representative designs and coarse convex combinations; a feasible-policy
// lower bound the analytic value must meet.
double numeric_oracle(const core::MtModel& model, double lambda, int d, double T,
                      long long steps);

// (lower, upper) envelope for the design maximization value.
std::pair<double, double> log_scaling_bounds(double p_min, double p_max, int d, double lambda,
                                             double T);

}  // namespace banditlab::deff
