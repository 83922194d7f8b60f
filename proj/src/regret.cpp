#include "banditlab/regret.hpp"

#include <algorithm>
#include <cmath>

namespace banditlab::regret {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::vector<long long> geometric_checkpoints(long long T) {
    std::vector<long long> cp;
    for (long long h = T; h >= 8; h /= 2) cp.push_back(h);
    if (cp.empty()) cp.push_back(T);
    std::reverse(cp.begin(), cp.end());
    return cp;
}

RegretCurve run_mab_regret(const env::MabInstance& instance, const MabPolicyParams& params,
                           long long T, long long replications, std::uint64_t master_seed,
                           double* mean_v1, std::vector<double>* mean_pulls, int jobs) {
    instance.validate();
    require(T >= 2 && replications >= 1, "run_mab_regret: need T >= 2 and replications >= 1");
    require(params.lambda > 0.0, "run_mab_regret: lambda must be positive");
    const int d = instance.d();
    std::vector<long long> cp = geometric_checkpoints(T);

    struct RepResult {
        std::vector<double> cum_at_cp;
        double v1 = 0.0;
        std::vector<double> pulls;
    };
    std::vector<RepResult> results(static_cast<size_t>(replications));

    parallel_for_ordered(replications, jobs, [&](long long r) {
        RngStream rng(master_seed, static_cast<std::uint64_t>(r));
        policy::MabUcbState state(d, params.lambda, instance.noise.sigma, T,
                                  params.theta_inf_bound);
        if (params.heteroskedastic && instance.noise.per_arm_sigma)
            state.per_arm_sigma = instance.noise.per_arm_sigma;
        RepResult& out = results[static_cast<size_t>(r)];
        out.cum_at_cp.resize(cp.size(), 0.0);
        double cum = 0.0, v1 = 0.0;
        size_t next_cp = 0;
        for (long long t = 1; t <= T; ++t) {
            std::vector<int> available = instance.available_arms(t);
            int arm = policy::mab_select(state, available);
            v1 += 1.0 / (params.lambda + static_cast<double>(state.n[static_cast<size_t>(arm)]));
            env::RunRecord rec = env::step(instance, t, arm, rng);
            policy::mab_update(state, arm, rec.reward.value_or(0.0), rec.realized);
            cum += rec.gap;
            while (next_cp < cp.size() && cp[next_cp] == t) {
                out.cum_at_cp[next_cp] = cum;
                ++next_cp;
            }
        }
        out.v1 = v1;
        out.pulls.resize(static_cast<size_t>(d));
        for (int a = 0; a < d; ++a)
            out.pulls[static_cast<size_t>(a)] =
                static_cast<double>(state.tau[static_cast<size_t>(a)]);
    });

    std::vector<RunningStat> stats(cp.size());
    RunningStat v1_stat;
    std::vector<double> pull_acc(static_cast<size_t>(d), 0.0);
    for (const RepResult& res : results) {
        for (size_t i = 0; i < cp.size(); ++i) stats[i].add(res.cum_at_cp[i]);
        v1_stat.add(res.v1);
        for (int a = 0; a < d; ++a) pull_acc[static_cast<size_t>(a)] += res.pulls[static_cast<size_t>(a)];
    }

    RegretCurve curve;
    curve.horizons = cp;
    curve.replications = replications;
    for (const auto& s : stats) {
        curve.mean_regret.push_back(s.mean);
        curve.stderr_mean.push_back(s.stderr_mean());
    }
    if (mean_v1) *mean_v1 = v1_stat.mean;
    if (mean_pulls) {
        mean_pulls->assign(static_cast<size_t>(d), 0.0);
        for (int a = 0; a < d; ++a)
            (*mean_pulls)[static_cast<size_t>(a)] =
                pull_acc[static_cast<size_t>(a)] / static_cast<double>(replications);
    }
    return curve;
}

RegretCurve run_lcb_regret(const env::LcbInstance& instance, const LcbPolicyParams& params,
                           long long T, long long replications, std::uint64_t master_seed,
                           double* mean_v1, int jobs) {
    instance.validate();
    require(T >= 2 && replications >= 1, "run_lcb_regret: need T >= 2 and replications >= 1");
    require(params.lambda > 0.0, "run_lcb_regret: lambda must be positive");
    const int d = instance.d();
    double delta = params.delta.value_or(static_cast<double>(d) /
                                         (static_cast<double>(T) * static_cast<double>(T)));
    std::vector<long long> cp = geometric_checkpoints(T);

    struct RepResult {
        std::vector<double> cum_at_cp;
        double v1 = 0.0;
    };
    std::vector<RepResult> results(static_cast<size_t>(replications));

    parallel_for_ordered(replications, jobs, [&](long long r) {
        RngStream rng(master_seed, static_cast<std::uint64_t>(r));
        auto action_sets = env::generate_action_sets(
            mix64(instance.action_set_seed, static_cast<std::uint64_t>(r)), T, d,
            instance.actions_per_round);
        policy::LcbUcbState state(d, params.lambda, instance.noise.sigma, delta,
                                  params.theta_l2_bound);
        RepResult& out = results[static_cast<size_t>(r)];
        out.cum_at_cp.resize(cp.size(), 0.0);
        double cum = 0.0, v1 = 0.0;
        size_t next_cp = 0;
        for (long long t = 1; t <= T; ++t) {
            const auto& set = action_sets[static_cast<size_t>(t - 1)];
            int pick = policy::lcb_select(state, set);
            const std::vector<double>& a = set[static_cast<size_t>(pick)];
            {
                Eigen::Map<const Eigen::VectorXd> av(a.data(), d);
                double w2 = av.dot(state.wc.ldlt().solve(av));
                v1 += std::max(w2, 0.0);
            }
            env::RunRecord rec = env::step(instance, t, a, set, rng);
            policy::lcb_update(state, a, rec.reward.value_or(0.0), rec.realized);
            cum += rec.gap;
            while (next_cp < cp.size() && cp[next_cp] == t) {
                out.cum_at_cp[next_cp] = cum;
                ++next_cp;
            }
        }
        out.v1 = v1;
    });

    std::vector<RunningStat> stats(cp.size());
    RunningStat v1_stat;
    for (const RepResult& res : results) {
        for (size_t i = 0; i < cp.size(); ++i) stats[i].add(res.cum_at_cp[i]);
        v1_stat.add(res.v1);
    }

    RegretCurve curve;
    curve.horizons = cp;
    curve.replications = replications;
    for (const auto& s : stats) {
        curve.mean_regret.push_back(s.mean);
        curve.stderr_mean.push_back(s.stderr_mean());
    }
    if (mean_v1) *mean_v1 = v1_stat.mean;
    return curve;
}

InstanceCheckResult instance_dependent_check(const env::MabInstance& instance,
                                             const MabPolicyParams& params, long long T,
                                             long long replications, std::uint64_t master_seed,
                                             int jobs) {
    instance.validate();
    require(!instance.sleeping.enabled, "instance_dependent_check: fixed action set required");
    const int d = instance.d();
    double best = *std::max_element(instance.theta_star.begin(), instance.theta_star.end());
    double delta_max = 0.0;
    for (int a = 0; a < d; ++a) {
        double gap = best - instance.theta_star[static_cast<size_t>(a)];
        delta_max = std::max(delta_max, gap);
        if (gap > 0.0)
            require(gap > 1e-12, "instance_dependent_check: degenerate gap on a suboptimal arm");
    }
    require(delta_max > 0.0, "instance_dependent_check: no suboptimal arm");

    InstanceCheckResult result;
    RegretCurve curve = run_mab_regret(instance, params, T, replications, master_seed, nullptr,
                                       &result.mean_pulls, jobs);
    result.mean_regret = curve.mean_regret.back();

    // Bound assembled from the regularized-UCB analysis: per suboptimal arm,
    // pulls are capped by max(T_0(a), (2/p_a) Theta_a(T)) with
    // Theta_a(T) = (4 lambda B / (sqrt(24 sigma^2 log T + 8 Delta_a lambda B)
    //              - sqrt(24 sigma^2 log T)))^2 - lambda.
    double logT = std::log(static_cast<double>(T));
    double sigma2 = instance.noise.sigma * instance.noise.sigma;
    double lb = params.lambda * params.theta_inf_bound;
    double bound = 0.0;
    double d_eff = 0.0;
    for (int a = 0; a < d; ++a) {
        double pa = instance.arm_probability(a);
        d_eff += 1.0 / pa;
        double gap = best - instance.theta_star[static_cast<size_t>(a)];
        if (gap <= 0.0) continue;
        double root = std::sqrt(24.0 * sigma2 * logT + 8.0 * gap * lb) -
                      std::sqrt(24.0 * sigma2 * logT);
        double theta_t = root > 0.0 ? std::pow(4.0 * lb / root, 2.0) - params.lambda : 0.0;
        bound += 2.0 * gap / pa * std::max(12.0 * logT + 0.5 * pa, theta_t);
    }
    bound += d * delta_max / static_cast<double>(T) +
             16.0 * d_eff * delta_max / (static_cast<double>(T) * static_cast<double>(T));
    result.report = potential::check_bound(result.mean_regret, bound, "instance_dependent_regret");
    return result;
}

}  // namespace banditlab::regret
