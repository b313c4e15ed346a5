#include "attackqa/cli/config.hpp"

#include <cstdlib>
#include <set>

#include <toml.hpp>

#include "attackqa/common/text.hpp"

namespace attackqa::cli {

namespace fs = std::filesystem;

namespace {

std::string field(const std::string& section, const std::string& key) {
    return section + "." + key;
}

void reject_unknown(const toml::table& t, const std::string& section,
                    const std::set<std::string>& known) {
    for (const auto& [key, node] : t) {
        const std::string k(key.str());
        if (!known.count(k)) throw ConfigError(field(section, k), "unknown key");
    }
}

std::optional<std::string> get_string(const toml::table& t, const std::string& section,
                                      const std::string& key) {
    const auto* node = t.get(key);
    if (!node) return std::nullopt;
    if (!node->is_string()) throw ConfigError(field(section, key), "must be a string");
    return node->value<std::string>();
}

std::optional<std::int64_t> get_int(const toml::table& t, const std::string& section,
                                    const std::string& key) {
    const auto* node = t.get(key);
    if (!node) return std::nullopt;
    if (!node->is_integer()) throw ConfigError(field(section, key), "must be an integer");
    return node->value<std::int64_t>();
}

std::optional<double> get_number(const toml::table& t, const std::string& section,
                                 const std::string& key) {
    const auto* node = t.get(key);
    if (!node) return std::nullopt;
    if (!node->is_number()) throw ConfigError(field(section, key), "must be a number");
    return node->value<double>();
}

std::optional<bool> get_bool(const toml::table& t, const std::string& section,
                             const std::string& key) {
    const auto* node = t.get(key);
    if (!node) return std::nullopt;
    if (!node->is_boolean()) throw ConfigError(field(section, key), "must be true or false");
    return node->value<bool>();
}

std::size_t positive(std::int64_t v, const std::string& path) {
    if (v < 1) throw ConfigError(path, "must be >= 1");
    return static_cast<std::size_t>(v);
}

const toml::table* section(const toml::table& root, const std::string& name) {
    const auto* node = root.get(name);
    if (!node) return nullptr;
    if (!node->is_table()) throw ConfigError(name, "must be a table");
    return node->as_table();
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal();
}

void read_paths(const toml::table& root, const fs::path& base, PipelineConfig& cfg) {
    const auto* t = section(root, "paths");
    if (!t) return;
    reject_unknown(*t, "paths", {"bundle", "tables", "workdir"});
    if (auto v = get_string(*t, "paths", "bundle")) cfg.bundle = resolve(base, *v);
    if (auto v = get_string(*t, "paths", "tables")) cfg.tables = resolve(base, *v);
    if (auto v = get_string(*t, "paths", "workdir")) cfg.workdir = resolve(base, *v);
}

void read_params(const toml::table& root, Params& p) {
    const auto* t = section(root, "params");
    if (!t) return;
    const std::string s = "params";
    reject_unknown(*t, s,
                   {"k", "qc_threshold", "split_seed", "eval_fraction", "n_neg", "refusal_ratio",
                    "recall_ks", "workers", "tokenizer"});
    if (auto v = get_int(*t, s, "k")) p.k = positive(*v, "params.k");
    if (auto v = get_number(*t, s, "qc_threshold")) p.qc_threshold = *v;
    if (auto v = get_int(*t, s, "split_seed")) {
        if (*v < 0) throw ConfigError("params.split_seed", "must be >= 0");
        p.split_seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = get_number(*t, s, "eval_fraction")) p.eval_fraction = *v;
    if (auto v = get_int(*t, s, "n_neg")) p.n_neg = positive(*v, "params.n_neg");
    if (auto v = get_number(*t, s, "refusal_ratio")) p.refusal_ratio = *v;
    if (auto v = get_int(*t, s, "workers")) p.workers = positive(*v, "params.workers");
    if (auto v = get_string(*t, s, "tokenizer")) p.tokenizer = *v;
    if (const auto* node = t->get("recall_ks")) {
        const auto* arr = node->as_array();
        if (!arr || arr->empty()) throw ConfigError("params.recall_ks", "must be a non-empty array");
        p.recall_ks.clear();
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const auto path = "params.recall_ks[" + std::to_string(i) + "]";
            auto v = (*arr)[i].value<std::int64_t>();
            if (!(*arr)[i].is_integer() || !v) throw ConfigError(path, "must be an integer");
            p.recall_ks.push_back(positive(*v, path));
        }
    }
}

gateway::EndpointConfig read_endpoint(const toml::table& t, const std::string& role,
                                      const fs::path& base, bool& oracle_from_dataset) {
    std::set<std::string> known{"base_url", "model",       "api_key_env", "timeout",
                                "max_retries", "max_in_flight", "backoff_ms", "temperature",
                                "max_tokens", "style",       "batch_size",  "mock_script",
                                "oracle_file", "dimension"};
    if (role == "embedder") known.insert("oracle_from_dataset");
    reject_unknown(t, role, known);

    gateway::EndpointConfig e;
    e.role = role;
    if (auto v = get_string(t, role, "base_url")) e.base_url = *v;
    if (auto v = get_string(t, role, "model")) e.model = *v;
    if (auto v = get_string(t, role, "api_key_env")) e.api_key_env = *v;
    if (auto v = get_number(t, role, "timeout")) e.timeout_s = *v;
    if (auto v = get_int(t, role, "max_retries")) e.max_retries = static_cast<int>(*v);
    if (auto v = get_int(t, role, "max_in_flight")) {
        e.max_in_flight = positive(*v, field(role, "max_in_flight"));
    }
    if (auto v = get_int(t, role, "backoff_ms")) e.backoff_ms = static_cast<int>(*v);
    if (auto v = get_number(t, role, "temperature")) e.temperature = *v;
    if (auto v = get_int(t, role, "max_tokens")) e.max_tokens = static_cast<int>(*v);
    if (auto v = get_string(t, role, "style")) {
        e.style = gateway::prompt_style_from_name(*v, field(role, "style"));
    }
    if (auto v = get_int(t, role, "batch_size")) {
        e.batch_size = positive(*v, field(role, "batch_size"));
    }
    if (auto v = get_string(t, role, "mock_script")) e.mock_script = resolve(base, *v).string();
    if (auto v = get_string(t, role, "oracle_file")) e.oracle_file = resolve(base, *v).string();
    if (auto v = get_int(t, role, "dimension")) e.dimension = positive(*v, field(role, "dimension"));
    if (auto v = get_bool(t, role, "oracle_from_dataset")) oracle_from_dataset = *v;
    return e;
}

void read_serve(const toml::table& root, ServeConfig& s) {
    const auto* t = section(root, "serve");
    if (!t) return;
    reject_unknown(*t, "serve", {"host", "port", "bearer_token_env", "log_interactions", "max_k"});
    if (auto v = get_string(*t, "serve", "host")) s.host = *v;
    if (auto v = get_int(*t, "serve", "port")) s.port = static_cast<int>(*v);
    if (auto v = get_string(*t, "serve", "bearer_token_env")) s.bearer_token_env = *v;
    if (auto v = get_bool(*t, "serve", "log_interactions")) s.log_interactions = *v;
    if (auto v = get_int(*t, "serve", "max_k")) s.max_k = positive(*v, "serve.max_k");
}

void apply_k(const std::string& text, const std::string& path, Params& p) {
    auto ks = parse_k_list(text, path);
    if (ks.size() == 1) {
        p.k = ks.front();
    } else {
        p.recall_ks = std::move(ks);
    }
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

void validate(const PipelineConfig& cfg) {
    if (cfg.workdir.empty()) throw ConfigError("paths.workdir", "must be set");
    if (cfg.bundle && cfg.tables) {
        throw ConfigError("paths.tables", "set either paths.bundle or paths.tables, not both");
    }
    const auto& p = cfg.params;
    if (!(p.qc_threshold >= 0.0 && p.qc_threshold <= 1.0)) {
        throw ConfigError("params.qc_threshold", "must be within [0, 1]");
    }
    if (!(p.eval_fraction > 0.0 && p.eval_fraction < 1.0)) {
        throw ConfigError("params.eval_fraction", "must be within (0, 1)");
    }
    if (!(p.refusal_ratio >= 0.0 && p.refusal_ratio < 1.0)) {
        throw ConfigError("params.refusal_ratio", "must be within [0, 1)");
    }
    if (p.tokenizer != "whitespace" && p.tokenizer != "wordpunct-approx") {
        throw ConfigError("params.tokenizer", "must be \"whitespace\" or \"wordpunct-approx\"");
    }
    if (cfg.serve.port < 0 || cfg.serve.port > 65535) {
        throw ConfigError("serve.port", "must be within [0, 65535]");
    }
    for (const auto& [role, e] : cfg.endpoints) e.validate();
}

}  // namespace

const gateway::EndpointConfig& PipelineConfig::endpoint(const std::string& role) const {
    auto it = endpoints.find(role);
    if (it == endpoints.end()) {
        throw ConfigError(role + ".base_url", "this command needs a [" + role + "] endpoint");
    }
    return it->second;
}

std::optional<std::string> process_env(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
}

std::vector<std::size_t> parse_k_list(const std::string& text, const std::string& path) {
    std::vector<std::size_t> out;
    for (const auto& raw : text::split(text, ',')) {
        const auto item = text::trim(raw);
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) {
            throw ConfigError(path, "expected an integer or comma-separated integers, got \"" +
                                        text + "\"");
        }
        out.push_back(positive(v, path));
    }
    if (out.empty()) throw ConfigError(path, "must not be empty");
    return out;
}

PipelineConfig parse_config(const std::string& toml_text, const fs::path& base_dir,
                            const Overrides& overrides, const EnvLookup& env) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        const auto& where = e.source().begin;
        throw ConfigError("config", "TOML syntax error at line " + std::to_string(where.line) +
                                        ": " + std::string(e.description()));
    }
    for (const auto& [key, node] : root) {
        const std::string k(key.str());
        const bool role = k == "generator" || k == "grader" || k == "judge" || k == "embedder";
        if (!role && k != "paths" && k != "params" && k != "serve") {
            throw ConfigError(k, "unknown section");
        }
    }

    PipelineConfig cfg;
    read_paths(root, base_dir, cfg);
    read_params(root, cfg.params);
    read_serve(root, cfg.serve);
    for (const char* role : kRoles) {
        if (const auto* t = section(root, role)) {
            cfg.endpoints[role] = read_endpoint(*t, role, base_dir, cfg.embedder_oracle_from_dataset);
        }
    }

    // Environment layer.
    if (auto v = env("FORGE_K")) apply_k(*v, "FORGE_K", cfg.params);
    for (const char* role : kRoles) {
        const auto prefix = "FORGE_" + upper(role);
        auto url = env(prefix + "_BASE_URL");
        auto model = env(prefix + "_MODEL");
        if (!url && !model) continue;
        auto& e = cfg.endpoints[role];
        e.role = role;
        if (url) e.base_url = *url;
        if (model) e.model = *model;
    }

    // Flag layer.
    if (overrides.k) apply_k(*overrides.k, "--k", cfg.params);
    if (overrides.seed) cfg.params.split_seed = *overrides.seed;
    if (overrides.workdir) cfg.workdir = *overrides.workdir;
    if (overrides.port) cfg.serve.port = *overrides.port;
    for (const auto& [role, url] : overrides.base_url) {
        auto& e = cfg.endpoints[role];
        e.role = role;
        e.base_url = url;
    }
    for (const auto& [role, model] : overrides.model) {
        auto& e = cfg.endpoints[role];
        e.role = role;
        e.model = model;
    }

    for (auto& [role, e] : cfg.endpoints) {
        if (e.is_mock() && e.model.empty()) e.model = "mock-" + role;
    }
    validate(cfg);
    return cfg;
}

PipelineConfig load_config(const fs::path& path, const Overrides& overrides, const EnvLookup& env) {
    if (!fs::exists(path)) throw ConfigError("config", "file not found: " + path.string());
    return parse_config(read_file(path), fs::absolute(path).parent_path(), overrides, env);
}

ordered_json describe(const PipelineConfig& cfg) {
    ordered_json j;
    j["paths"]["bundle"] = cfg.bundle ? ordered_json(cfg.bundle->string()) : ordered_json(nullptr);
    j["paths"]["tables"] = cfg.tables ? ordered_json(cfg.tables->string()) : ordered_json(nullptr);
    j["paths"]["workdir"] = cfg.workdir.string();
    const auto& p = cfg.params;
    j["params"] = {{"k", p.k},
                   {"qc_threshold", p.qc_threshold},
                   {"split_seed", p.split_seed},
                   {"eval_fraction", p.eval_fraction},
                   {"n_neg", p.n_neg},
                   {"refusal_ratio", p.refusal_ratio},
                   {"recall_ks", p.recall_ks},
                   {"workers", p.workers},
                   {"tokenizer", p.tokenizer}};
    for (const auto& [role, e] : cfg.endpoints) {
        j[role] = {{"base_url", e.base_url},
                   {"model", e.model},
                   {"api_key_env", e.api_key_env},
                   {"style", std::string(gateway::prompt_style_name(e.style))}};
    }
    return j;
}

}  // namespace attackqa::cli
