#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/gateway/config.hpp"

namespace attackqa::cli {

using gateway::ConfigError;

inline constexpr const char* kRoles[] = {"generator", "grader", "judge", "embedder"};

struct Params {
    std::size_t k = 5;
    double qc_threshold = 0.7;
    std::uint64_t split_seed = 0;
    double eval_fraction = 0.1;
    std::size_t n_neg = 7;
    double refusal_ratio = 0.125;
    std::vector<std::size_t> recall_ks{1, 5, 10};
    std::size_t workers = 4;
    std::string tokenizer = "wordpunct-approx";
};

struct ServeConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string bearer_token_env;  // variable name; empty disables auth
    bool log_interactions = false;
    std::size_t max_k = 50;
};

struct PipelineConfig {
    std::optional<std::filesystem::path> bundle;  // STIX bundle
    std::optional<std::filesystem::path> tables;  // tabular export directory
    std::filesystem::path workdir;
    Params params;
    std::map<std::string, gateway::EndpointConfig> endpoints;  // by role
    bool embedder_oracle_from_dataset = false;
    ServeConfig serve;

    /// The endpoint for `role`; throws ConfigError("<role>.base_url") when absent.
    const gateway::EndpointConfig& endpoint(const std::string& role) const;
};

/// Command-line values that take precedence over env and file.
struct Overrides {
    std::optional<std::string> k;  // integer, or comma list for eval
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> workdir;
    std::map<std::string, std::string> base_url;  // by role
    std::map<std::string, std::string> model;
    std::optional<int> port;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// "1,5,10" -> {1, 5, 10}. Every element must be an integer >= 1.
std::vector<std::size_t> parse_k_list(const std::string& text, const std::string& field);

/// Parses the TOML text, then layers FORGE_* environment values and flags on
/// top: flag > env > file. Relative paths resolve against `base_dir`.
/// Throws ConfigError with the dotted field path of the first problem.
PipelineConfig parse_config(const std::string& toml_text, const std::filesystem::path& base_dir,
                            const Overrides& overrides = {}, const EnvLookup& env = process_env);

PipelineConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {},
                           const EnvLookup& env = process_env);

/// Effective configuration with credentials shown by variable name only.
ordered_json describe(const PipelineConfig& cfg);

}  // namespace attackqa::cli
