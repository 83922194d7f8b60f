#include "banditlab/core.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace banditlab::core {

namespace {

constexpr double kHalfPi = 1.5707963267948966192;
constexpr double kUnitNormTol = 1e-12;
constexpr double kUnitBallSlack = 1e-9;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

int MtModel::region_of(double d) const {
    const int kk = k();
    if (d >= std::sin(angles[static_cast<size_t>(kk)])) return kk;  // last region closed at +1
    for (int j = kk - 1; j >= 0; --j) {
        if (d >= std::sin(angles[static_cast<size_t>(j)])) return j;
    }
    return 0;  // d >= -1 = sin(phi_0) always
}

void MtModel::validate() const {
    require(probs.size() >= 1, "MtModel: at least one region required");
    require(angles.size() == probs.size() + 1, "MtModel: angles must have k+2 entries");
    require(std::abs(angles.front() + kHalfPi) <= 1e-12, "MtModel: phi_0 must be -pi/2");
    require(std::abs(angles.back() - kHalfPi) <= 1e-12, "MtModel: phi_{k+1} must be pi/2");
    for (size_t j = 0; j + 1 < angles.size(); ++j)
        require(angles[j] < angles[j + 1], "MtModel: angles must be strictly increasing");
    for (size_t j = 0; j < probs.size(); ++j) {
        require(probs[j] > 0.0 && probs[j] <= 1.0, "MtModel: probabilities must lie in (0,1]");
        if (j > 0) require(probs[j] < probs[j - 1], "MtModel: probabilities must be strictly decreasing");
    }
    require(!u.empty(), "MtModel: direction u required");
    double n2 = dot(u, u);
    require(std::abs(std::sqrt(n2) - 1.0) <= kUnitNormTol, "MtModel: u must be a unit vector");
}

MtModel make_mt_model(std::vector<double> angles, std::vector<double> probs,
                      std::vector<double> u) {
    require(probs.size() >= 1, "MtModel: at least one region required");
    require(angles.size() == probs.size() + 1, "MtModel: angles must have k+2 entries");
    bool increasing = probs.size() >= 2 && probs[1] > probs[0];
    if (increasing) {
        // Reflect u -> -u: slab order reverses, probabilities become decreasing.
        std::reverse(probs.begin(), probs.end());
        std::vector<double> refl(angles.size());
        for (size_t j = 0; j < angles.size(); ++j)
            refl[j] = -angles[angles.size() - 1 - j];
        angles = std::move(refl);
        for (double& x : u) x = -x;
    }
    MtModel m{std::move(angles), std::move(probs), std::move(u), increasing};
    m.validate();
    return m;
}

void CensorshipSpec::validate() const {
    if (is_per_arm()) {
        const auto& pa = per_arm();
        require(!pa.probabilities.empty(), "PerArm: probabilities must be non-empty");
        for (double p : pa.probabilities)
            require(p > 0.0 && p <= 1.0, "PerArm: probabilities must lie in (0,1]");
    } else if (is_uniform()) {
        double p = uniform().pbar;
        require(p > 0.0 && p <= 1.0, "Uniform: pbar must lie in (0,1]");
    } else {
        mt().validate();
    }
}

void NoiseSpec::validate(int d) const {
    require(sigma >= 0.0, "NoiseSpec: sigma must be nonnegative");
    if (per_arm_sigma) {
        require(static_cast<int>(per_arm_sigma->size()) == d,
                "NoiseSpec: per_arm_sigma length must equal arm count");
        for (double s : *per_arm_sigma)
            require(s >= 0.0, "NoiseSpec: per-arm sigma must be nonnegative");
    }
}

double censorship_probability(const CensorshipSpec& spec, int arm) {
    if (spec.is_per_arm()) {
        const auto& p = spec.per_arm().probabilities;
        require(arm >= 0 && arm < static_cast<int>(p.size()),
                "censorship_probability: arm index out of range");
        return p[static_cast<size_t>(arm)];
    }
    if (spec.is_uniform()) return spec.uniform().pbar;
    throw std::invalid_argument("censorship_probability: arm index invalid for multi-threshold model");
}

double censorship_probability(const CensorshipSpec& spec, const std::vector<double>& action) {
    if (spec.is_uniform()) return spec.uniform().pbar;
    if (spec.is_multi_threshold()) {
        const MtModel& m = spec.mt();
        require(static_cast<int>(action.size()) == m.dim(),
                "censorship_probability: action dimension mismatch");
        double n2 = dot(action, action);
        require(n2 <= (1.0 + kUnitBallSlack) * (1.0 + kUnitBallSlack),
                "censorship_probability: action outside the unit ball");
        int j = m.region_of(dot(action, m.u));
        return m.probs[static_cast<size_t>(j)];
    }
    throw std::invalid_argument("censorship_probability: vector action invalid for per-arm model");
}

bool sample_realization(double p, RngStream& rng) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("sample_realization: p must lie in (0,1]");
    return rng.next_u01() < p;
}

bool realization_fate(double p, std::uint64_t master_seed, std::uint64_t stream_id,
                      int arm, long long pull_count) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("realization_fate: p must lie in (0,1]");
    std::uint64_t bits = mix64(mix64(master_seed, stream_id),
                               static_cast<std::uint64_t>(arm) + 1,
                               static_cast<std::uint64_t>(pull_count) + 1);
    return u01_from_bits(bits) < p;
}

nlohmann::json to_json(const CensorshipSpec& spec) {
    nlohmann::json j;
    if (spec.is_per_arm()) {
        j["kind"] = "per_arm";
        j["probabilities"] = spec.per_arm().probabilities;
    } else if (spec.is_uniform()) {
        j["kind"] = "uniform";
        j["pbar"] = spec.uniform().pbar;
    } else {
        const MtModel& m = spec.mt();
        j["kind"] = "multi_threshold";
        j["angles"] = m.angles;
        j["probs"] = m.probs;
        j["u"] = m.u;
    }
    return j;
}

CensorshipSpec censorship_from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("kind"), "censorship: missing \"kind\"");
    std::string kind = j.at("kind").get<std::string>();
    CensorshipSpec spec;
    if (kind == "per_arm") {
        spec.model = PerArmCensorship{j.at("probabilities").get<std::vector<double>>()};
    } else if (kind == "uniform") {
        spec.model = UniformCensorship{j.at("pbar").get<double>()};
    } else if (kind == "multi_threshold") {
        spec.model = make_mt_model(j.at("angles").get<std::vector<double>>(),
                                   j.at("probs").get<std::vector<double>>(),
                                   j.at("u").get<std::vector<double>>());
    } else {
        throw std::invalid_argument("censorship: unknown kind \"" + kind + "\"");
    }
    spec.validate();
    return spec;
}

nlohmann::json to_json(const NoiseSpec& spec) {
    nlohmann::json j;
    j["kind"] = "gaussian";
    j["sigma"] = spec.sigma;
    if (spec.per_arm_sigma) j["per_arm_sigma"] = *spec.per_arm_sigma;
    return j;
}

NoiseSpec noise_from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("kind"), "noise: missing \"kind\"");
    require(j.at("kind").get<std::string>() == "gaussian", "noise: only gaussian supported");
    NoiseSpec spec;
    spec.sigma = j.at("sigma").get<double>();
    if (j.contains("per_arm_sigma"))
        spec.per_arm_sigma = j.at("per_arm_sigma").get<std::vector<double>>();
    return spec;
}

}  // namespace banditlab::core
