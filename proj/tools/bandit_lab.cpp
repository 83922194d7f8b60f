// bandit-lab: config-driven experiment runner on top of the banditlab C API.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "banditlab.h"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int jobs = 0;
    bool print_json = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Path to the experiment config JSON")
        ->required();
    cmd->add_option("--out", args.out_dir, "Output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "Master seed override")
        ->each([&args](const std::string&) { args.has_seed = true; });
    cmd->add_option("--jobs", args.jobs, "Worker threads for replications");
}

int resolve_jobs(int flag_jobs) {
    if (flag_jobs > 0) return flag_jobs;
    if (const char* env = std::getenv("BANDIT_LAB_JOBS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // let the config / default decide
}

std::string read_file(const std::string& path, bool& ok) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        ok = false;
        return {};
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    ok = true;
    return ss.str();
}

void print_deff_table(const std::string& summary_json) {
    auto j = nlohmann::json::parse(summary_json, nullptr, false);
    if (j.is_discarded()) return;
    std::cout << "effective dimension\n";
    std::cout << "  model kind : " << j.value("model_kind", std::string("?")) << "\n";
    if (j.contains("d")) std::cout << "  d          : " << j["d"] << "\n";
    std::cout << "  d_eff      : " << j.value("d_eff", 0.0) << "\n";
    if (j.contains("trajectory")) {
        const auto& t = j["trajectory"];
        std::cout << "  terminal   : " << t["terminal"]["type"].get<std::string>() << "\n";
        std::cout << "  regions    : ";
        for (const auto& r : t["user_region_sequence"]) std::cout << r << " ";
        std::cout << "\n  switches   : ";
        for (const auto& s : t["switch_times"]) std::cout << s << " ";
        std::cout << "\n";
        if (t["terminal"].contains("lambda_star"))
            std::cout << "  lambda*    : " << t["terminal"]["lambda_star"] << "\n";
        if (t.value("oracle_only", false))
            std::cout << "  note       : oracle-verified only (first threshold below 0)\n";
    }
}

int run_subcommand(const std::string& kind, const CommonArgs& args) {
    bool ok = false;
    std::string config = read_file(args.config_path, ok);
    if (!ok) {
        std::cerr << "error: cannot read config file " << args.config_path << "\n";
        return BL_E_CONFIG;
    }
    char* summary = nullptr;
    int status = bl_run(config.c_str(), kind.c_str(),
                        args.out_dir.empty() ? nullptr : args.out_dir.c_str(),
                        args.has_seed ? 1 : 0, args.seed, resolve_jobs(args.jobs), &summary);
    if (summary) {
        if (kind == "deff" && status == BL_OK && !args.print_json) {
            print_deff_table(summary);
        } else {
            std::cout << summary;
        }
        bl_string_free(summary);
    }
    if (status != BL_OK) std::cerr << "bandit-lab: " << bl_last_error() << "\n";
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bandit-lab: censored-bandit experiments and effective-dimension analytics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(bl_version()));

    const char* kinds[] = {"mab-regret",      "lcb-regret", "deff",
                           "trajectory",      "adaptivity", "potential-check",
                           "instance-check"};
    CommonArgs args[8];
    int idx = 0;
    std::string chosen;
    for (const char* kind : kinds) {
        CLI::App* cmd = app.add_subcommand(kind, std::string("Run a ") + kind + " experiment");
        add_common(cmd, args[idx]);
        if (std::string(kind) == "deff" || std::string(kind) == "trajectory")
            cmd->add_flag("--json", args[idx].print_json, "Print the full JSON summary");
        cmd->callback([kind, &chosen]() { chosen = kind; });
        ++idx;
    }
    CommonArgs vargs;
    CLI::App* vcmd = app.add_subcommand("validate", "Validate a config without running it");
    vcmd->add_option("--config", vargs.config_path, "Path to the experiment config JSON")
        ->required();
    vcmd->callback([&chosen]() { chosen = "validate"; });

    CLI11_PARSE(app, argc, argv);

    if (chosen == "validate") {
        bool ok = false;
        std::string config = read_file(vargs.config_path, ok);
        if (!ok) {
            std::cerr << "error: cannot read config file " << vargs.config_path << "\n";
            return BL_E_CONFIG;
        }
        char* report = nullptr;
        int status = bl_validate(config.c_str(), &report);
        if (report) {
            std::cout << report;
            bl_string_free(report);
        }
        return status;
    }

    for (int i = 0; i < idx; ++i) {
        if (chosen == kinds[i]) return run_subcommand(chosen, args[i]);
    }
    std::cerr << "error: no subcommand selected\n";
    return BL_E_INVALID;
}
