#include "banditlab.h"

#include <cstring>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "banditlab/deff.hpp"
#include "banditlab/harness.hpp"
#include "banditlab/policy.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const char* what) { g_last_error = what ? what : "unknown error"; }

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F>
int guarded(F&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return BL_E_INVALID;
    } catch (const std::domain_error& e) {
        set_error(e.what());
        return BL_E_INVALID;
    } catch (const std::exception& e) {
        set_error(e.what());
        return BL_E_INTERNAL;
    } catch (...) {
        set_error("unknown exception");
        return BL_E_INTERNAL;
    }
}

banditlab::core::MtModel model_from_json_text(const char* model_json) {
    nlohmann::json j = nlohmann::json::parse(model_json);
    if (!j.contains("kind")) j["kind"] = "multi_threshold";
    return banditlab::core::censorship_from_json(j).mt();
}

}  // namespace

struct bl_mab_ucb {
    banditlab::policy::MabUcbState state;
};

struct bl_lcb_ucb {
    banditlab::policy::LcbUcbState state;
};

extern "C" {

const char* bl_version(void) { return banditlab::harness::kToolVersion; }

const char* bl_last_error(void) { return g_last_error.c_str(); }

void bl_string_free(char* s) { delete[] s; }

int bl_validate(const char* config_json, char** out_report_json) {
    return guarded([&]() {
        if (!config_json) {
            set_error("config_json is null");
            return BL_E_INVALID;
        }
        nlohmann::json config;
        banditlab::harness::ValidationReport rep;
        try {
            config = nlohmann::json::parse(config_json);
            rep = banditlab::harness::validate(config);
        } catch (const nlohmann::json::parse_error& e) {
            rep.valid = false;
            rep.errors.push_back({"/", e.what()});
        }
        if (out_report_json) *out_report_json = dup_string(rep.to_json().dump(2) + "\n");
        return rep.valid ? BL_OK : BL_E_CONFIG;
    });
}

int bl_run(const char* config_json, const char* kind, const char* out_dir,
           int has_seed_override, uint64_t seed_override, int jobs,
           char** out_summary_json) {
    return guarded([&]() {
        if (!config_json) {
            set_error("config_json is null");
            return BL_E_INVALID;
        }
        nlohmann::json config;
        try {
            config = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::parse_error& e) {
            banditlab::harness::ValidationReport rep;
            rep.errors.push_back({"/", e.what()});
            if (out_summary_json) *out_summary_json = dup_string(rep.to_json().dump(2) + "\n");
            set_error(e.what());
            return BL_E_CONFIG;
        }
        banditlab::harness::RunOverrides ov;
        if (kind) ov.kind = std::string(kind);
        if (out_dir) ov.out_dir = std::string(out_dir);
        if (has_seed_override) ov.master_seed = seed_override;
        if (jobs > 0) ov.jobs = jobs;
        banditlab::harness::RunResult res = banditlab::harness::run(config, ov);
        if (out_summary_json) *out_summary_json = dup_string(res.summary.dump(2) + "\n");
        if (res.status != banditlab::harness::kStatusOk)
            set_error(res.status == banditlab::harness::kStatusInvalidConfig
                          ? "invalid configuration"
                          : "bound check violated");
        return res.status;
    });
}

int bl_deff_mab(const double* p, int d, const double* per_arm_sigma_or_null, double* out) {
    return guarded([&]() {
        if (!p || !out || d < 1) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        std::vector<double> pv(p, p + d);
        std::optional<std::vector<double>> sig;
        if (per_arm_sigma_or_null)
            sig = std::vector<double>(per_arm_sigma_or_null, per_arm_sigma_or_null + d);
        *out = banditlab::deff::d_eff_mab(pv, sig);
        return BL_OK;
    });
}

int bl_gamma_alpha(const double* p, int d, double alpha, double* out) {
    return guarded([&]() {
        if (!p || !out || d < 1) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        *out = banditlab::deff::gamma_alpha(std::vector<double>(p, p + d), alpha);
        return BL_OK;
    });
}

int bl_water_filling(const double* p, const double* lambdas, int d, double budget,
                     double alpha, double* out_tau, double* out_level, double* out_value) {
    return guarded([&]() {
        if (!p || !lambdas || d < 1) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        auto sol = banditlab::deff::water_filling(std::vector<double>(p, p + d),
                                                  std::vector<double>(lambdas, lambdas + d),
                                                  budget, alpha);
        if (out_tau)
            for (int a = 0; a < d; ++a) out_tau[a] = sol.tau_star[static_cast<size_t>(a)];
        if (out_level) *out_level = sol.water_level;
        if (out_value) *out_value = sol.value;
        return BL_OK;
    });
}

int bl_mt_trajectory(const char* model_json, double lambda, char** out_json) {
    return guarded([&]() {
        if (!model_json || !out_json) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        banditlab::core::MtModel model = model_from_json_text(model_json);
        auto rep = banditlab::deff::compute_trajectory(model, lambda, model.dim());
        nlohmann::json traj;
        {
            traj["d"] = rep.d;
            traj["lambda"] = rep.lambda;
            traj["d_eff"] = rep.d_eff;
            traj["oracle_only"] = rep.geometry.oracle_only;
            traj["reflected"] = rep.geometry.reflected;
            traj["region_sequence"] = rep.region_sequence;
            traj["user_region_sequence"] = rep.user_region_sequence;
            traj["switch_times"] = rep.switch_times;
            nlohmann::json states = nlohmann::json::array();
            for (const auto& s : rep.states)
                states.push_back(nlohmann::json::array({s.first, s.last}));
            traj["states"] = states;
            traj["path_formula_sign"] = rep.path_formula_sign;
            if (rep.terminal == banditlab::deff::TrajectoryReport::Terminal::SingleRegion) {
                traj["terminal"] = {{"type", "single_region"},
                                    {"region", rep.terminal_region},
                                    {"design_sin2", rep.terminal_sin2}};
            } else {
                traj["terminal"] = {{"type", "bi_region"},
                                    {"i", rep.terminal_pair_i},
                                    {"j", rep.terminal_region},
                                    {"lambda_star", rep.lambda_star},
                                    {"scale", rep.scale}};
            }
        }
        *out_json = dup_string(traj.dump(2) + "\n");
        return BL_OK;
    });
}

bl_mab_ucb* bl_mab_ucb_create(int d, double lambda, double sigma, long long horizon,
                              double theta_inf_bound) {
    try {
        return new bl_mab_ucb{
            banditlab::policy::MabUcbState(d, lambda, sigma, horizon, theta_inf_bound)};
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void bl_mab_ucb_free(bl_mab_ucb* h) { delete h; }

int bl_mab_ucb_index(const bl_mab_ucb* h, int arm, double* out) {
    return guarded([&]() {
        if (!h || !out) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        *out = banditlab::policy::mab_index(h->state, arm);
        return BL_OK;
    });
}

int bl_mab_ucb_select(const bl_mab_ucb* h, const int32_t* available, int n_available,
                      int32_t* out_arm) {
    return guarded([&]() {
        if (!h || !available || !out_arm || n_available < 1) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        std::vector<int> arms(available, available + n_available);
        *out_arm = banditlab::policy::mab_select(h->state, arms);
        return BL_OK;
    });
}

int bl_mab_ucb_update(bl_mab_ucb* h, int arm, double reward, int realized) {
    return guarded([&]() {
        if (!h) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        banditlab::policy::mab_update(h->state, arm, reward, realized != 0);
        return BL_OK;
    });
}

bl_lcb_ucb* bl_lcb_ucb_create(int d, double lambda, double sigma, double delta,
                              double theta_l2_bound) {
    try {
        return new bl_lcb_ucb{
            banditlab::policy::LcbUcbState(d, lambda, sigma, delta, theta_l2_bound)};
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void bl_lcb_ucb_free(bl_lcb_ucb* h) { delete h; }

int bl_lcb_ucb_beta(const bl_lcb_ucb* h, double* out) {
    return guarded([&]() {
        if (!h || !out) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        *out = banditlab::policy::lcb_beta(h->state);
        return BL_OK;
    });
}

int bl_lcb_ucb_select(const bl_lcb_ucb* h, const double* actions, int m, int d,
                      int32_t* out_index) {
    return guarded([&]() {
        if (!h || !actions || !out_index || m < 1 || d != h->state.d()) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        std::vector<std::vector<double>> set(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i)
            set[static_cast<size_t>(i)].assign(actions + static_cast<size_t>(i) * d,
                                               actions + static_cast<size_t>(i + 1) * d);
        *out_index = banditlab::policy::lcb_select(h->state, set);
        return BL_OK;
    });
}

int bl_lcb_ucb_update(bl_lcb_ucb* h, const double* action, int d, double reward,
                      int realized) {
    return guarded([&]() {
        if (!h || !action || d != h->state.d()) {
            set_error("bad arguments");
            return BL_E_INVALID;
        }
        std::vector<double> a(action, action + d);
        banditlab::policy::lcb_update(h->state, a, reward, realized != 0);
        return BL_OK;
    });
}

}  // extern "C"
