#include "banditlab/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "banditlab/core.hpp"
#include "banditlab/deff.hpp"

namespace banditlab::adaptivity {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double pow_neg_alpha(double x, double alpha) {
    if (alpha == 1.0) return 1.0 / x;
    if (alpha == 0.5) return 1.0 / std::sqrt(x);
    return std::pow(x, -alpha);
}

// Largest-remainder rounding of nonnegative targets to integers summing to
// `budget`; remainder ties go to the lowest index.
std::vector<long long> round_allocation(const std::vector<double>& target, long long budget) {
    const size_t d = target.size();
    std::vector<long long> out(d);
    std::vector<std::pair<double, size_t>> rem(d);
    long long used = 0;
    for (size_t a = 0; a < d; ++a) {
        double t = std::max(target[a], 0.0);
        out[a] = static_cast<long long>(std::floor(t + 1e-12));
        used += out[a];
        rem[a] = {t - static_cast<double>(out[a]), a};
    }
    std::sort(rem.begin(), rem.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
    });
    long long left = budget - used;
    require(left >= 0, "round_allocation: targets exceed budget");
    for (long long i = 0; i < left; ++i) out[rem[static_cast<size_t>(i % static_cast<long long>(d))].second] += 1;
    return out;
}

// V_alpha contribution of pulling arm `a` for pulls [from, from+count), with
// realization fates indexed by the arm's global pull counter.
double arm_block_value(const DecayConfig& cfg, std::uint64_t master, std::uint64_t stream,
                       int a, long long from, long long count, long long& n_realized) {
    double acc = 0.0;
    double pa = cfg.p[static_cast<size_t>(a)];
    for (long long n = 0; n < count; ++n) {
        acc += pow_neg_alpha(static_cast<double>(n_realized) + cfg.lambda, cfg.alpha);
        if (core::realization_fate(pa, master, stream, a, from + n)) ++n_realized;
    }
    return acc;
}

}  // namespace

void DecayConfig::validate() const {
    require(d >= 1, "DecayConfig: d must be >= 1");
    require(static_cast<int>(p.size()) == d, "DecayConfig: p length must equal d");
    for (double pa : p) require(pa > 0.0 && pa <= 1.0, "DecayConfig: p must lie in (0,1]");
    require(lambda > 0.0, "DecayConfig: lambda must be positive");
    require(alpha > 0.0 && alpha <= 1.0, "DecayConfig: alpha must lie in (0,1]");
    require(T >= 1, "DecayConfig: T must be >= 1");
    if (policy == PolicyKind::SingleMonitoring) {
        require(beta > 0.0 && beta < 1.0, "DecayConfig: beta must lie in (0,1)");
        require(static_cast<long long>(std::floor(beta * static_cast<double>(T))) >= 1,
                "DecayConfig: floor(beta*T) must be >= 1");
    }
}

std::vector<long long> offline_allocation(const std::vector<double>& p, long long T) {
    double deff = deff::d_eff_mab(p);
    std::vector<double> target(p.size());
    for (size_t a = 0; a < p.size(); ++a) target[a] = static_cast<double>(T) / (p[a] * deff);
    return round_allocation(target, T);
}

double simulate_decaying(const DecayConfig& cfg, std::uint64_t master, std::uint64_t stream,
                         long long* clamped) {
    cfg.validate();
    const size_t d = static_cast<size_t>(cfg.d);
    std::vector<double> per_arm(d, 0.0);
    std::vector<long long> realized(d, 0);
    std::vector<long long> pulls(d, 0);

    if (cfg.policy == PolicyKind::AdaptiveGreedy) {
        // Greedy picks argmax (N_a + lambda)^{-alpha} = argmin N_a, lowest
        // index on ties. Terms accumulate per arm so that runs with equal
        // final allocations produce bitwise-equal totals.
        for (long long t = 0; t < cfg.T; ++t) {
            size_t a = 0;
            for (size_t b = 1; b < d; ++b)
                if (realized[b] < realized[a]) a = b;
            per_arm[a] += pow_neg_alpha(static_cast<double>(realized[a]) + cfg.lambda, cfg.alpha);
            if (core::realization_fate(cfg.p[a], master, stream, static_cast<int>(a), pulls[a]))
                ++realized[a];
            ++pulls[a];
        }
    } else if (cfg.policy == PolicyKind::Offline) {
        std::vector<long long> alloc = offline_allocation(cfg.p, cfg.T);
        for (size_t a = 0; a < d; ++a) {
            per_arm[a] = arm_block_value(cfg, master, stream, static_cast<int>(a), 0, alloc[a],
                                         realized[a]);
            pulls[a] = alloc[a];
        }
    } else {
        const long long t0 = static_cast<long long>(std::floor(cfg.beta * static_cast<double>(cfg.T)));
        std::vector<long long> commit = offline_allocation(cfg.p, t0);
        for (size_t a = 0; a < d; ++a) {
            per_arm[a] = arm_block_value(cfg, master, stream, static_cast<int>(a), 0, commit[a],
                                         realized[a]);
            pulls[a] = commit[a];
        }
        // Reallocate the remainder by water-filling against the observed
        // realization counts.
        std::vector<double> offsets(d);
        for (size_t a = 0; a < d; ++a) offsets[a] = static_cast<double>(realized[a]) + cfg.lambda;
        deff::WaterFillingSolution wf =
            deff::water_filling(cfg.p, offsets, static_cast<double>(cfg.T - t0), cfg.alpha);
        bool was_clamped = false;
        for (double tau : wf.tau_star)
            if (tau <= 0.0) was_clamped = true;
        if (was_clamped && clamped) ++(*clamped);
        std::vector<long long> rest = round_allocation(wf.tau_star, cfg.T - t0);
        for (size_t a = 0; a < d; ++a)
            per_arm[a] += arm_block_value(cfg, master, stream, static_cast<int>(a), pulls[a],
                                          rest[a], realized[a]);
    }

    double total = 0.0;
    for (size_t a = 0; a < d; ++a) total += per_arm[a];
    return total;
}

GainEstimate estimate_gain(const DecayConfig& adaptive, const DecayConfig& baseline,
                           long long replications, std::uint64_t master_seed, int jobs) {
    adaptive.validate();
    baseline.validate();
    require(replications >= 100, "estimate_gain: need at least 100 replications");
    require(adaptive.d == baseline.d && adaptive.p == baseline.p &&
                adaptive.lambda == baseline.lambda && adaptive.alpha == baseline.alpha &&
                adaptive.T == baseline.T,
            "estimate_gain: configs must agree on (d, p, lambda, alpha, T)");
    std::vector<double> diffs(static_cast<size_t>(replications));
    std::vector<long long> clamps(static_cast<size_t>(replications), 0);
    parallel_for_ordered(replications, jobs, [&](long long r) {
        long long c = 0;
        double va = simulate_decaying(adaptive, master_seed, static_cast<std::uint64_t>(r), &c);
        double vb = simulate_decaying(baseline, master_seed, static_cast<std::uint64_t>(r), &c);
        diffs[static_cast<size_t>(r)] = va - vb;
        clamps[static_cast<size_t>(r)] = c;
    });
    RunningStat stat;
    GainEstimate est;
    for (size_t r = 0; r < diffs.size(); ++r) {
        stat.add(diffs[r]);
        est.clamped_count += clamps[r];
    }
    est.mean = stat.mean;
    est.stderr_mean = stat.stderr_mean();
    est.replications = replications;
    est.scaled = std::pow(static_cast<double>(adaptive.T), adaptive.alpha) * est.mean;
    return est;
}

}  // namespace banditlab::adaptivity
