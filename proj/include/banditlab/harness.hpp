#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace banditlab::harness {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit statuses shared by run() and the CLI.
inline constexpr int kStatusOk = 0;
inline constexpr int kStatusBoundViolation = 1;
inline constexpr int kStatusInvalidConfig = 2;

struct ValidationError {
    std::string path;  // JSON pointer-style field path
    std::string message;
};

struct ValidationReport {
    bool valid = false;
    std::vector<ValidationError> errors;

    nlohmann::json to_json() const;
};

struct RunOverrides {
    std::optional<std::string> kind;     // subcommand; must match config when both given
    std::optional<std::string> out_dir;  // overrides config "out"
    std::optional<std::uint64_t> master_seed;
    std::optional<int> jobs;
};

struct RunResult {
    int status = kStatusOk;
    nlohmann::json summary;
    std::string out_dir;
};

// Pure validation; no side effects.
ValidationReport validate(const nlohmann::json& config);

// Validates, runs the experiment, writes config echo / CSV data / summary /
// manifest under the output directory, and reports the exit status:
// 0 on success, 1 when an internal bound check fails, 2 on invalid config.
RunResult run(const nlohmann::json& config, const RunOverrides& overrides = {});

// Canonical serialization (sorted keys, two-space indent, trailing newline)
// and its FNV-1a digest.
std::string canonical_dump(const nlohmann::json& j);
std::string config_digest(const nlohmann::json& config);

}  // namespace banditlab::harness
