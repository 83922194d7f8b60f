#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "banditlab/common.hpp"

namespace banditlab::core {

// Multi-threshold censorship model: p(a) = p_j on the slab
// sin(phi_j) <= <a,u> < sin(phi_{j+1}), with phi_0 = -pi/2, phi_{k+1} = pi/2.
// Region probabilities are strictly monotone in the region index; inputs
// given with increasing probabilities are canonicalized by the reflection
// u -> -u (which reverses the slab order), so stored models always have
// p_0 > p_1 > ... > p_k.
struct MtModel {
    std::vector<double> angles;  // size k+2, radians, strictly increasing
    std::vector<double> probs;   // size k+1, strictly decreasing after canonicalization
    std::vector<double> u;       // unit vector, ||u|| = 1 within 1e-12
    bool reflected = false;      // true when canonicalization flipped the input

    int k() const { return static_cast<int>(probs.size()) - 1; }
    int dim() const { return static_cast<int>(u.size()); }

    // Region of a canonical direction component <a,u>; boundary +1 is
    // assigned to the last region.
    int region_of(double dot) const;

    void validate() const;
};

MtModel make_mt_model(std::vector<double> angles, std::vector<double> probs,
                      std::vector<double> u);

struct PerArmCensorship {
    std::vector<double> probabilities;
};

struct UniformCensorship {
    double pbar = 1.0;
};

struct CensorshipSpec {
    std::variant<PerArmCensorship, UniformCensorship, MtModel> model;

    bool is_per_arm() const { return std::holds_alternative<PerArmCensorship>(model); }
    bool is_uniform() const { return std::holds_alternative<UniformCensorship>(model); }
    bool is_multi_threshold() const { return std::holds_alternative<MtModel>(model); }

    const PerArmCensorship& per_arm() const { return std::get<PerArmCensorship>(model); }
    const UniformCensorship& uniform() const { return std::get<UniformCensorship>(model); }
    const MtModel& mt() const { return std::get<MtModel>(model); }

    void validate() const;
};

struct NoiseSpec {
    double sigma = 1.0;  // pseudo-variance sigma^2; Gaussian instantiation
    std::optional<std::vector<double>> per_arm_sigma;

    double sigma_for_arm(int arm) const {
        if (per_arm_sigma) return (*per_arm_sigma)[static_cast<size_t>(arm)];
        return sigma;
    }
    void validate(int d) const;
};

// Realization probability of an arm index (PerArm / Uniform models).
double censorship_probability(const CensorshipSpec& spec, int arm);

// Realization probability of a unit-ball action (Uniform / MultiThreshold).
double censorship_probability(const CensorshipSpec& spec, const std::vector<double>& action);

// Bernoulli realization flag; consumes exactly one uniform draw.
bool sample_realization(double p, RngStream& rng);

// Counter-indexed realization fate: deterministic function of
// (master_seed, stream, arm, pull_count). Lets paired policies see the same
// censorship fate for the n-th pull of an arm (common random numbers).
bool realization_fate(double p, std::uint64_t master_seed, std::uint64_t stream_id,
                      int arm, long long pull_count);

// JSON with a "kind" discriminator; angles in radians, probabilities as decimals.
nlohmann::json to_json(const CensorshipSpec& spec);
CensorshipSpec censorship_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NoiseSpec& spec);
NoiseSpec noise_from_json(const nlohmann::json& j);

}  // namespace banditlab::core
