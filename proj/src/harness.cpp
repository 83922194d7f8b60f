#include "banditlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "banditlab/adaptivity.hpp"
#include "banditlab/core.hpp"
#include "banditlab/deff.hpp"
#include "banditlab/env.hpp"
#include "banditlab/potential.hpp"
#include "banditlab/regret.hpp"

namespace banditlab::harness {

namespace {

using nlohmann::json;

const std::set<std::string> kKinds = {"mab-regret",      "lcb-regret", "deff",
                                      "trajectory",      "adaptivity", "potential-check",
                                      "instance-check"};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void err(ValidationReport& rep, const std::string& path, const std::string& msg) {
    rep.errors.push_back({path, msg});
}

bool need_object(const json& j, const std::string& key, const std::string& path,
                 ValidationReport& rep) {
    if (!j.contains(key) || !j.at(key).is_object()) {
        err(rep, path, "required object field missing or not an object");
        return false;
    }
    return true;
}

bool check_number(const json& j, const std::string& key, const std::string& path,
                  ValidationReport& rep, bool required, double lo, double hi,
                  bool lo_strict = false) {
    if (!j.contains(key)) {
        if (required) err(rep, path, "required numeric field missing");
        return false;
    }
    if (!j.at(key).is_number()) {
        err(rep, path, "must be a number");
        return false;
    }
    double v = j.at(key).get<double>();
    bool lo_ok = lo_strict ? v > lo : v >= lo;
    if (!lo_ok || v > hi) {
        err(rep, path, "value out of range");
        return false;
    }
    return true;
}

bool check_integer(const json& j, const std::string& key, const std::string& path,
                   ValidationReport& rep, bool required, long long lo) {
    if (!j.contains(key)) {
        if (required) err(rep, path, "required integer field missing");
        return false;
    }
    if (!j.at(key).is_number_integer()) {
        err(rep, path, "must be an integer");
        return false;
    }
    if (j.at(key).get<long long>() < lo) {
        err(rep, path, "value below minimum");
        return false;
    }
    return true;
}

bool check_prob_array(const json& j, const std::string& key, const std::string& path,
                      ValidationReport& rep, size_t expect_len) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        err(rep, path, "required probability array missing");
        return false;
    }
    const auto& arr = j.at(key);
    if (expect_len && arr.size() != expect_len) {
        err(rep, path, "wrong length");
        return false;
    }
    bool ok = true;
    for (size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number() || !(arr[i].get<double>() > 0.0) ||
            arr[i].get<double>() > 1.0) {
            err(rep, path + "/" + std::to_string(i), "probability must lie in (0,1]");
            ok = false;
        }
    }
    return ok;
}

void validate_noise(const json& j, const std::string& path, ValidationReport& rep, size_t d) {
    if (!j.contains("kind") || j.at("kind") != "gaussian") {
        err(rep, path + "/kind", "noise kind must be \"gaussian\"");
        return;
    }
    check_number(j, "sigma", path + "/sigma", rep, true, 0.0, 1e12);
    if (j.contains("per_arm_sigma")) {
        if (!j.at("per_arm_sigma").is_array() || (d && j.at("per_arm_sigma").size() != d))
            err(rep, path + "/per_arm_sigma", "must be an array of length d");
    }
}

void validate_censorship(const json& j, const std::string& path, ValidationReport& rep,
                         size_t d, bool allow_per_arm, bool allow_mt) {
    if (!j.contains("kind") || !j.at("kind").is_string()) {
        err(rep, path + "/kind", "censorship kind missing");
        return;
    }
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "per_arm") {
        if (!allow_per_arm) {
            err(rep, path + "/kind", "per-arm censorship not valid here");
            return;
        }
        check_prob_array(j, "probabilities", path + "/probabilities", rep, d);
    } else if (kind == "uniform") {
        check_number(j, "pbar", path + "/pbar", rep, true, 0.0, 1.0, /*lo_strict=*/true);
    } else if (kind == "multi_threshold") {
        if (!allow_mt) {
            err(rep, path + "/kind", "multi-threshold censorship not valid here");
            return;
        }
        try {
            core::censorship_from_json(j);
        } catch (const std::exception& e) {
            err(rep, path, e.what());
        }
    } else {
        err(rep, path + "/kind", "unknown censorship kind \"" + kind + "\"");
    }
}

void validate_mab_instance(const json& j, const std::string& path, ValidationReport& rep) {
    if (j.value("type", "") != "mab") {
        err(rep, path + "/type", "instance type must be \"mab\"");
        return;
    }
    if (!j.contains("theta_star") || !j.at("theta_star").is_array() || j.at("theta_star").empty()) {
        err(rep, path + "/theta_star", "non-empty numeric array required");
        return;
    }
    size_t d = j.at("theta_star").size();
    if (need_object(j, "noise", path + "/noise", rep))
        validate_noise(j.at("noise"), path + "/noise", rep, d);
    if (need_object(j, "censorship", path + "/censorship", rep))
        validate_censorship(j.at("censorship"), path + "/censorship", rep, d, true, false);
    if (j.contains("sleeping") && j.at("sleeping").is_object()) {
        const auto& s = j.at("sleeping");
        if (s.value("enabled", false))
            check_number(s, "awake_prob", path + "/sleeping/awake_prob", rep, true, 0.0, 1.0,
                         true);
    }
}

void validate_lcb_instance(const json& j, const std::string& path, ValidationReport& rep) {
    if (j.value("type", "") != "lcb") {
        err(rep, path + "/type", "instance type must be \"lcb\"");
        return;
    }
    if (!j.contains("theta_star") || !j.at("theta_star").is_array() || j.at("theta_star").empty()) {
        err(rep, path + "/theta_star", "non-empty numeric array required");
        return;
    }
    size_t d = j.at("theta_star").size();
    check_number(j, "s_bound", path + "/s_bound", rep, true, 0.0, 1e12, true);
    if (j.contains("s_bound") && j.at("s_bound").is_number()) {
        double n2 = 0.0;
        for (const auto& v : j.at("theta_star")) n2 += v.get<double>() * v.get<double>();
        if (std::sqrt(n2) > j.at("s_bound").get<double>() + 1e-12)
            err(rep, path + "/theta_star", "||theta*|| exceeds s_bound");
    }
    check_integer(j, "action_set_seed", path + "/action_set_seed", rep, true, 0);
    check_integer(j, "actions_per_round", path + "/actions_per_round", rep, true, 2);
    if (need_object(j, "noise", path + "/noise", rep))
        validate_noise(j.at("noise"), path + "/noise", rep, 0);
    if (need_object(j, "censorship", path + "/censorship", rep))
        validate_censorship(j.at("censorship"), path + "/censorship", rep, d, false, true);
}

env::MabInstance parse_mab_instance(const json& j) {
    env::MabInstance inst;
    inst.theta_star = j.at("theta_star").get<std::vector<double>>();
    inst.noise = core::noise_from_json(j.at("noise"));
    inst.censorship = core::censorship_from_json(j.at("censorship"));
    if (j.contains("sleeping")) {
        const auto& s = j.at("sleeping");
        inst.sleeping.enabled = s.value("enabled", false);
        inst.sleeping.awake_prob = s.value("awake_prob", 1.0);
        inst.sleeping.seed = s.value("seed", 0ULL);
    }
    inst.validate();
    return inst;
}

env::LcbInstance parse_lcb_instance(const json& j) {
    env::LcbInstance inst;
    inst.theta_star = j.at("theta_star").get<std::vector<double>>();
    inst.s_bound = j.at("s_bound").get<double>();
    inst.noise = core::noise_from_json(j.at("noise"));
    inst.censorship = core::censorship_from_json(j.at("censorship"));
    inst.action_set_seed = j.at("action_set_seed").get<std::uint64_t>();
    inst.actions_per_round = j.at("actions_per_round").get<int>();
    inst.validate();
    return inst;
}

regret::MabPolicyParams parse_mab_policy(const json& j, const env::MabInstance& inst) {
    regret::MabPolicyParams p;
    p.lambda = j.value("lambda", 1.0);
    double binf = 0.0;
    for (double v : inst.theta_star) binf = std::max(binf, std::abs(v));
    p.theta_inf_bound = j.value("theta_inf_bound", binf);
    p.heteroskedastic = j.value("heteroskedastic", false);
    return p;
}

regret::LcbPolicyParams parse_lcb_policy(const json& j, const env::LcbInstance& inst) {
    regret::LcbPolicyParams p;
    p.lambda = j.value("lambda", 1.0);
    if (j.contains("delta")) p.delta = j.at("delta").get<double>();
    p.theta_l2_bound = j.value("theta_l2_bound", inst.s_bound);
    return p;
}

double mab_d_eff(const env::MabInstance& inst) {
    double out = 0.0;
    for (int a = 0; a < inst.d(); ++a) out += 1.0 / inst.arm_probability(a);
    return out;
}

json bound_report_json(const potential::BoundReport& r) {
    return json{{"bound_name", r.bound_name},
                {"bound_value", r.bound_value},
                {"observed", r.observed},
                {"satisfied", r.satisfied},
                {"slack", r.slack}};
}

json trajectory_json(const deff::TrajectoryReport& rep) {
    json out;
    out["d"] = rep.d;
    out["lambda"] = rep.lambda;
    out["d_eff"] = rep.d_eff;
    out["oracle_only"] = rep.geometry.oracle_only;
    out["reflected"] = rep.geometry.reflected;
    out["region_sequence"] = rep.region_sequence;
    out["user_region_sequence"] = rep.user_region_sequence;
    out["switch_times"] = rep.switch_times;
    json states = json::array();
    for (const auto& s : rep.states) states.push_back(json::array({s.first, s.last}));
    out["states"] = states;
    out["path_formula_sign"] = rep.path_formula_sign;
    if (rep.terminal == deff::TrajectoryReport::Terminal::SingleRegion) {
        out["terminal"] = json{{"type", "single_region"},
                               {"region", rep.terminal_region},
                               {"user_region",
                                rep.geometry.user_region[static_cast<size_t>(rep.terminal_region)]},
                               {"design_sin2", rep.terminal_sin2}};
    } else {
        out["terminal"] =
            json{{"type", "bi_region"},
                 {"i", rep.terminal_pair_i},
                 {"j", rep.terminal_region},
                 {"user_i", rep.geometry.user_region[static_cast<size_t>(rep.terminal_pair_i)]},
                 {"user_j", rep.geometry.user_region[static_cast<size_t>(rep.terminal_region)]},
                 {"lambda_star", rep.lambda_star},
                 {"scale", rep.scale}};
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path.string());
    f << content;
}

std::string regret_csv(const regret::RegretCurve& curve) {
    std::string csv = "T,mean_regret,stderr,replications,config_digest\n";
    for (size_t i = 0; i < curve.horizons.size(); ++i) {
        csv += std::to_string(curve.horizons[i]) + "," + fmt_double(curve.mean_regret[i]) + "," +
               fmt_double(curve.stderr_mean[i]) + "," + std::to_string(curve.replications) +
               "," + curve.config_digest + "\n";
    }
    return csv;
}

struct KindOutputs {
    json summary;
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    std::vector<potential::BoundReport> checks;
};

KindOutputs run_mab_regret_kind(const json& cfg, std::uint64_t seed, int jobs,
                                const std::string& digest) {
    env::MabInstance inst = parse_mab_instance(cfg.at("instance"));
    regret::MabPolicyParams pol = parse_mab_policy(cfg.value("policy", json::object()), inst);
    long long T = cfg.at("T").get<long long>();
    long long reps = cfg.at("replications").get<long long>();
    double v1 = 0.0;
    std::vector<double> pulls;
    regret::RegretCurve curve =
        regret::run_mab_regret(inst, pol, T, reps, seed, &v1, &pulls, jobs);
    curve.config_digest = digest;

    double deff = mab_d_eff(inst);
    double delta_max = 0.0;
    double best = *std::max_element(inst.theta_star.begin(), inst.theta_star.end());
    for (double th : inst.theta_star) delta_max = std::max(delta_max, best - th);

    KindOutputs out;
    out.checks.push_back(potential::check_bound(
        curve.mean_regret.back(), static_cast<double>(T) * std::max(delta_max, 0.0),
        "regret_le_T_delta_max"));
    out.checks.push_back(potential::check_bound(
        v1, potential::finite_potential_bound(deff, inst.d(), static_cast<double>(T), pol.lambda,
                                              1.0, 0.5),
        "mean_v1_le_potential_bound"));
    out.summary["kind"] = "mab-regret";
    out.summary["d"] = inst.d();
    out.summary["d_eff"] = deff;
    out.summary["T"] = T;
    out.summary["replications"] = reps;
    out.summary["final_mean_regret"] = curve.mean_regret.back();
    out.summary["final_stderr"] = curve.stderr_mean.back();
    out.summary["mean_v1"] = v1;
    out.summary["mean_pulls"] = pulls;
    out.files.emplace_back("regret.csv", regret_csv(curve));
    return out;
}

KindOutputs run_lcb_regret_kind(const json& cfg, std::uint64_t seed, int jobs,
                                const std::string& digest) {
    env::LcbInstance inst = parse_lcb_instance(cfg.at("instance"));
    regret::LcbPolicyParams pol = parse_lcb_policy(cfg.value("policy", json::object()), inst);
    long long T = cfg.at("T").get<long long>();
    long long reps = cfg.at("replications").get<long long>();
    double v1 = 0.0;
    regret::RegretCurve curve = regret::run_lcb_regret(inst, pol, T, reps, seed, &v1, jobs);
    curve.config_digest = digest;

    KindOutputs out;
    out.checks.push_back(potential::check_bound(curve.mean_regret.back(),
                                                static_cast<double>(T) * 2.0 * inst.s_bound,
                                                "regret_le_T_delta_max"));
    out.summary["kind"] = "lcb-regret";
    out.summary["d"] = inst.d();
    out.summary["T"] = T;
    out.summary["replications"] = reps;
    out.summary["final_mean_regret"] = curve.mean_regret.back();
    out.summary["final_stderr"] = curve.stderr_mean.back();
    out.summary["mean_v1"] = v1;
    out.files.emplace_back("regret.csv", regret_csv(curve));
    return out;
}

KindOutputs run_deff_kind(const json& cfg) {
    const json& model = cfg.at("model");
    std::string kind = model.at("kind").get<std::string>();
    KindOutputs out;
    out.summary["kind"] = "deff";
    out.summary["model_kind"] = kind;
    if (kind == "per_arm") {
        std::vector<double> p = model.at("probabilities").get<std::vector<double>>();
        std::optional<std::vector<double>> sig;
        if (cfg.contains("per_arm_sigma"))
            sig = cfg.at("per_arm_sigma").get<std::vector<double>>();
        double deff = deff::d_eff_mab(p, sig);
        out.summary["d_eff"] = deff;
        out.checks.push_back(potential::check_bound(
            sig ? 0.0 : static_cast<double>(p.size()), deff, "d_eff_ge_d"));
    } else if (kind == "uniform") {
        int d = cfg.at("d").get<int>();
        double pbar = model.at("pbar").get<double>();
        out.summary["d"] = d;
        out.summary["d_eff"] = d / pbar;
        out.checks.push_back(potential::check_bound(d, d / pbar, "d_eff_ge_d"));
    } else {
        core::CensorshipSpec spec = core::censorship_from_json(model);
        double lambda = cfg.value("lambda", 1.0);
        int d = spec.mt().dim();
        deff::TrajectoryReport rep = deff::compute_trajectory(spec.mt(), lambda, d);
        out.summary["d"] = d;
        out.summary["lambda"] = lambda;
        out.summary["d_eff"] = rep.d_eff;
        out.summary["trajectory"] = trajectory_json(rep);
        double pmin = spec.mt().probs.back(), pmax = spec.mt().probs.front();
        out.checks.push_back(
            potential::check_bound(rep.d_eff, d / pmin, "d_eff_le_d_over_pmin"));
        out.checks.push_back(
            potential::check_bound(d / pmax, rep.d_eff, "d_eff_ge_d_over_pmax"));
    }
    return out;
}

KindOutputs run_trajectory_kind(const json& cfg) {
    core::CensorshipSpec spec = core::censorship_from_json(cfg.at("model"));
    double lambda = cfg.value("lambda", 1.0);
    const core::MtModel& model = spec.mt();
    int d = model.dim();
    deff::TrajectoryReport rep = deff::compute_trajectory(model, lambda, d);

    KindOutputs out;
    out.summary["kind"] = "trajectory";
    out.summary["d_eff"] = rep.d_eff;
    json traj = trajectory_json(rep);

    double max_resid = 0.0;
    for (double r : deff::switch_optimality_residuals(rep)) max_resid = std::max(max_resid, r);
    out.checks.push_back(
        potential::check_bound(max_resid, 1e-8, "first_order_optimality_at_switches"));

    double pmin = model.probs.back(), pmax = model.probs.front();
    out.checks.push_back(potential::check_bound(rep.d_eff, d / pmin, "d_eff_le_d_over_pmin"));
    out.checks.push_back(potential::check_bound(d / pmax, rep.d_eff, "d_eff_ge_d_over_pmax"));

    if (rep.terminal == deff::TrajectoryReport::Terminal::BiRegion) {
        int i = rep.terminal_pair_i, j = rep.terminal_region;
        double rho = rep.geometry.p[static_cast<size_t>(i)] / rep.geometry.p[static_cast<size_t>(j)];
        double rd = deff::r_dagger(model, i, j);
        double rs = deff::r_star(model, i, j);
        bool window = rho > std::max(1.0, rd) && rho < rs;
        out.checks.push_back(potential::check_bound(window ? 0.0 : 1.0, 0.0, "bi_region_window"));
    }

    if (cfg.contains("oracle")) {
        const json& oc = cfg.at("oracle");
        double T = oc.at("T").get<double>();
        long long steps = oc.at("steps").get<long long>();
        double rel_tol = oc.value("rel_tol", 0.02);
        double analytic = deff::optimization_value(rep, T);
        double oracle = deff::numeric_oracle(model, lambda, d, T, steps);
        double rel = std::abs(analytic - oracle) / std::max(std::abs(oracle), 1e-12);
        out.summary["analytic_value"] = analytic;
        out.summary["oracle_value"] = oracle;
        out.summary["oracle_rel_diff"] = rel;
        out.checks.push_back(potential::check_bound(rel, rel_tol, "analytic_matches_oracle"));
    }
    out.summary["trajectory"] = traj;
    out.files.emplace_back("trajectory.json", canonical_dump(traj));
    return out;
}

KindOutputs run_adaptivity_kind(const json& cfg, std::uint64_t seed, int jobs) {
    adaptivity::DecayConfig base;
    base.d = cfg.at("d").get<int>();
    base.p = cfg.at("p").get<std::vector<double>>();
    base.lambda = cfg.value("lambda", 1.0);
    base.alpha = cfg.at("alpha").get<double>();
    base.T = cfg.at("T").get<long long>();
    base.beta = cfg.value("beta", 0.5);
    long long reps = cfg.at("replications").get<long long>();

    adaptivity::DecayConfig off = base;
    off.policy = adaptivity::PolicyKind::Offline;
    adaptivity::DecayConfig adapt = base;
    adapt.policy = adaptivity::PolicyKind::AdaptiveGreedy;
    adaptivity::DecayConfig single = base;
    single.policy = adaptivity::PolicyKind::SingleMonitoring;

    adaptivity::GainEstimate ga = adaptivity::estimate_gain(adapt, off, reps, seed, jobs);
    adaptivity::GainEstimate gs = adaptivity::estimate_gain(single, off, reps, seed, jobs);
    double gamma = deff::gamma_alpha(base.p, base.alpha);

    KindOutputs out;
    out.summary["kind"] = "adaptivity";
    out.summary["gamma_closed_form"] = gamma;
    out.summary["scaled_gain"] = ga.scaled;
    out.summary["stderr"] = ga.stderr_mean * std::pow(static_cast<double>(base.T), base.alpha);
    out.summary["replications"] = reps;
    out.summary["clamped_count"] = gs.clamped_count;
    out.summary["single_scaled_gain"] = gs.scaled;
    out.summary["single_stderr"] =
        gs.stderr_mean * std::pow(static_cast<double>(base.T), base.alpha);
    out.summary["adaptive_label"] = "greedy (conjectured-max)";
    out.checks.push_back(
        potential::check_bound(-ga.mean, 2.0 * ga.stderr_mean, "adaptive_gain_nonnegative"));
    return out;
}

KindOutputs run_potential_check_kind(const json& cfg, std::uint64_t seed, int jobs,
                                     const std::string& digest) {
    (void)digest;
    env::MabInstance inst = parse_mab_instance(cfg.at("instance"));
    regret::MabPolicyParams pol = parse_mab_policy(cfg.value("policy", json::object()), inst);
    long long T = cfg.at("T").get<long long>();
    long long reps = cfg.at("replications").get<long long>();
    double alpha = cfg.value("alpha", 1.0);

    std::vector<double> totals(static_cast<size_t>(reps), 0.0);
    std::vector<potential::MabRound> first_history;
    parallel_for_ordered(reps, jobs, [&](long long r) {
        RngStream rng(seed, static_cast<std::uint64_t>(r));
        policy::MabUcbState state(inst.d(), pol.lambda, inst.noise.sigma, T,
                                  pol.theta_inf_bound);
        std::vector<potential::MabRound> history;
        history.reserve(static_cast<size_t>(T));
        for (long long t = 1; t <= T; ++t) {
            std::vector<int> available = inst.available_arms(t);
            int arm = policy::mab_select(state, available);
            env::RunRecord rec = env::step(inst, t, arm, rng);
            policy::mab_update(state, arm, rec.reward.value_or(0.0), rec.realized);
            history.push_back({arm, rec.realized});
        }
        totals[static_cast<size_t>(r)] =
            potential::potential_mab(history, alpha, pol.lambda).total;
        if (r == 0) first_history = history;
    });
    RunningStat stat;
    for (double v : totals) stat.add(v);

    double deff = mab_d_eff(inst);
    double bound = potential::finite_potential_bound(deff, inst.d(), static_cast<double>(T),
                                                     pol.lambda, alpha, 0.5);
    potential::BoundReport report =
        potential::check_bound(stat.mean, bound, "mean_v_alpha_le_potential_bound");

    potential::PotentialTrace trace = potential::potential_mab(first_history, alpha, pol.lambda);
    std::string csv = "t,term,cumulative\n";
    double cum = 0.0;
    for (size_t t = 0; t < trace.terms.size(); ++t) {
        cum += trace.terms[t];
        csv += std::to_string(t + 1) + "," + fmt_double(trace.terms[t]) + "," + fmt_double(cum) +
               "\n";
    }

    KindOutputs out;
    out.checks.push_back(report);
    out.summary["kind"] = "potential-check";
    out.summary["alpha"] = alpha;
    out.summary["d_eff"] = deff;
    out.summary["mean_v_alpha"] = stat.mean;
    out.summary["stderr"] = stat.stderr_mean();
    out.summary["bound"] = bound;
    out.files.emplace_back("potential.csv", csv);
    out.files.emplace_back("bounds.jsonl", canonical_dump(bound_report_json(report)));
    return out;
}

KindOutputs run_instance_check_kind(const json& cfg, std::uint64_t seed, int jobs) {
    env::MabInstance inst = parse_mab_instance(cfg.at("instance"));
    regret::MabPolicyParams pol = parse_mab_policy(cfg.value("policy", json::object()), inst);
    long long T = cfg.at("T").get<long long>();
    long long reps = cfg.at("replications").get<long long>();
    regret::InstanceCheckResult res =
        regret::instance_dependent_check(inst, pol, T, reps, seed, jobs);

    KindOutputs out;
    out.checks.push_back(res.report);
    out.summary["kind"] = "instance-check";
    out.summary["mean_regret"] = res.mean_regret;
    out.summary["bound"] = res.report.bound_value;
    out.summary["mean_pulls"] = res.mean_pulls;
    out.files.emplace_back("bounds.jsonl", canonical_dump(bound_report_json(res.report)));
    return out;
}

}  // namespace

nlohmann::json ValidationReport::to_json() const {
    json j;
    j["valid"] = valid;
    json errs = json::array();
    for (const auto& e : errors) errs.push_back(json{{"path", e.path}, {"message", e.message}});
    j["errors"] = errs;
    return j;
}

std::string canonical_dump(const json& j) {
    return j.dump(2) + "\n";
}

std::string config_digest(const json& config) {
    return hex64(fnv1a64(config.dump()));
}

ValidationReport validate(const json& config) {
    ValidationReport rep;
    if (!config.is_object()) {
        err(rep, "/", "config must be a JSON object");
        return rep;
    }
    check_integer(config, "schema_version", "/schema_version", rep, true, 1);
    if (config.contains("schema_version") && config.at("schema_version").is_number_integer() &&
        config.at("schema_version").get<long long>() != 1)
        err(rep, "/schema_version", "unsupported schema version");

    std::string kind = config.value("kind", "");
    if (!kKinds.count(kind)) {
        err(rep, "/kind", "unknown experiment kind \"" + kind + "\"");
        rep.valid = rep.errors.empty();
        return rep;
    }
    check_integer(config, "master_seed", "/master_seed", rep, true, 0);
    if (config.contains("jobs")) check_integer(config, "jobs", "/jobs", rep, false, 1);

    auto check_instance_policy = [&](bool mab) {
        if (need_object(config, "instance", "/instance", rep)) {
            if (mab)
                validate_mab_instance(config.at("instance"), "/instance", rep);
            else
                validate_lcb_instance(config.at("instance"), "/instance", rep);
        }
        if (config.contains("policy") && config.at("policy").is_object()) {
            const json& p = config.at("policy");
            if (p.contains("lambda"))
                check_number(p, "lambda", "/policy/lambda", rep, false, 0.0, 1e12, true);
            if (p.contains("delta"))
                check_number(p, "delta", "/policy/delta", rep, false, 0.0, 1.0, true);
        }
        check_integer(config, "T", "/T", rep, true, 2);
        check_integer(config, "replications", "/replications", rep, true, 1);
    };

    if (kind == "mab-regret" || kind == "potential-check" || kind == "instance-check") {
        check_instance_policy(true);
    } else if (kind == "lcb-regret") {
        check_instance_policy(false);
    } else if (kind == "deff") {
        if (need_object(config, "model", "/model", rep)) {
            const json& m = config.at("model");
            std::string mk = m.value("kind", "");
            if (mk == "per_arm") {
                check_prob_array(m, "probabilities", "/model/probabilities", rep, 0);
            } else if (mk == "uniform") {
                check_number(m, "pbar", "/model/pbar", rep, true, 0.0, 1.0, true);
                check_integer(config, "d", "/d", rep, true, 1);
            } else if (mk == "multi_threshold") {
                validate_censorship(m, "/model", rep, 0, false, true);
                if (config.contains("lambda"))
                    check_number(config, "lambda", "/lambda", rep, false, 0.0, 1e12, true);
            } else {
                err(rep, "/model/kind", "unknown model kind \"" + mk + "\"");
            }
        }
    } else if (kind == "trajectory") {
        if (need_object(config, "model", "/model", rep)) {
            validate_censorship(config.at("model"), "/model", rep, 0, false, true);
            if (config.at("model").value("kind", "") != "multi_threshold")
                err(rep, "/model/kind", "trajectory requires a multi-threshold model");
        }
        if (config.contains("lambda"))
            check_number(config, "lambda", "/lambda", rep, false, 0.0, 1e12, true);
        if (config.contains("oracle") && config.at("oracle").is_object()) {
            const json& oc = config.at("oracle");
            check_number(oc, "T", "/oracle/T", rep, true, 0.0, 1e18, true);
            check_integer(oc, "steps", "/oracle/steps", rep, true, 100);
        }
    } else if (kind == "adaptivity") {
        check_integer(config, "d", "/d", rep, true, 1);
        long long d = config.value("d", 0LL);
        check_prob_array(config, "p", "/p", rep, d > 0 ? static_cast<size_t>(d) : 0);
        check_number(config, "alpha", "/alpha", rep, true, 0.0, 1.0, true);
        check_integer(config, "T", "/T", rep, true, 1);
        check_integer(config, "replications", "/replications", rep, true, 100);
        if (config.contains("beta")) {
            check_number(config, "beta", "/beta", rep, false, 0.0, 1.0, true);
            if (config.at("beta").is_number() && config.at("beta").get<double>() >= 1.0)
                err(rep, "/beta", "beta must be strictly below 1");
        }
        if (config.contains("lambda"))
            check_number(config, "lambda", "/lambda", rep, false, 0.0, 1e12, true);
    }

    rep.valid = rep.errors.empty();
    return rep;
}

RunResult run(const json& config, const RunOverrides& overrides) {
    RunResult result;

    // Effective semantic config: seed/kind overrides baked in; execution
    // details (out, jobs) stripped before the digest.
    json effective = config.is_object() ? config : json::object();
    if (overrides.master_seed) effective["master_seed"] = *overrides.master_seed;
    if (overrides.kind) {
        if (effective.contains("kind") && effective.at("kind") != *overrides.kind) {
            result.status = kStatusInvalidConfig;
            ValidationReport rep;
            rep.errors.push_back({"/kind", "config kind does not match the requested subcommand"});
            result.summary = rep.to_json();
            return result;
        }
        effective["kind"] = *overrides.kind;
    }

    ValidationReport vrep = validate(effective);
    if (!vrep.valid) {
        result.status = kStatusInvalidConfig;
        result.summary = vrep.to_json();
        return result;
    }

    json semantic = effective;
    semantic.erase("out");
    semantic.erase("jobs");
    std::string digest = config_digest(semantic);

    std::string kind = effective.at("kind").get<std::string>();
    std::uint64_t seed = effective.at("master_seed").get<std::uint64_t>();
    int jobs = overrides.jobs.value_or(effective.value("jobs", 1));
    std::string out_dir = overrides.out_dir.value_or(
        effective.value("out", std::string("results/") + kind + "-" + digest));

    auto start = std::chrono::steady_clock::now();
    KindOutputs outputs;
    try {
        if (kind == "mab-regret")
            outputs = run_mab_regret_kind(effective, seed, jobs, digest);
        else if (kind == "lcb-regret")
            outputs = run_lcb_regret_kind(effective, seed, jobs, digest);
        else if (kind == "deff")
            outputs = run_deff_kind(effective);
        else if (kind == "trajectory")
            outputs = run_trajectory_kind(effective);
        else if (kind == "adaptivity")
            outputs = run_adaptivity_kind(effective, seed, jobs);
        else if (kind == "potential-check")
            outputs = run_potential_check_kind(effective, seed, jobs, digest);
        else
            outputs = run_instance_check_kind(effective, seed, jobs);
    } catch (const std::invalid_argument& e) {
        result.status = kStatusInvalidConfig;
        ValidationReport rep;
        rep.errors.push_back({"/", e.what()});
        result.summary = rep.to_json();
        return result;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool all_ok = true;
    json checks = json::array();
    for (const auto& c : outputs.checks) {
        checks.push_back(bound_report_json(c));
        all_ok = all_ok && c.satisfied;
    }
    outputs.summary["checks"] = checks;
    outputs.summary["config_digest"] = digest;
    outputs.summary["status"] = all_ok ? kStatusOk : kStatusBoundViolation;

    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / "config.json", canonical_dump(semantic));
    for (const auto& [name, content] : outputs.files)
        write_file(std::filesystem::path(out_dir) / name, content);
    write_file(std::filesystem::path(out_dir) / "summary.json",
               canonical_dump(outputs.summary));
    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["config_digest"] = digest;
    manifest["wall_clock_seconds"] = wall;
    manifest["jobs"] = jobs;
    write_file(std::filesystem::path(out_dir) / "manifest.json", canonical_dump(manifest));

    result.status = all_ok ? kStatusOk : kStatusBoundViolation;
    result.summary = outputs.summary;
    result.out_dir = out_dir;
    return result;
}

}  // namespace banditlab::harness
