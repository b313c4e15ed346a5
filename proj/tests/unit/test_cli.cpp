#include <doctest.h>

#include <sstream>

#include "attackqa/cli/app.hpp"
#include "attackqa/cli/config.hpp"
#include "attackqa/common/jsonl.hpp"
#include "fixtures.hpp"

using namespace attackqa;
using namespace attackqa::cli;
namespace fs = std::filesystem;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
        auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

const EnvLookup kNoEnv = env_of({});

const std::string kBase = R"(
[paths]
tables = "kb"
workdir = "work"

[params]
k = 3

[generator]
base_url = "http://file.example/v1"
model = "file-model"
api_key_env = "GEN_KEY"
)";

std::string field_of(const std::string& toml, const EnvLookup& env = kNoEnv) {
    try {
        parse_config(toml, "/cfg", {}, env);
    } catch (const ConfigError& e) {
        return e.field;
    }
    return "<no error>";
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run forge(std::vector<std::string> args) {
    args.insert(args.begin(), "forge");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = forge_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string mock_config() { return attackqa::testing::fixture_path("fixtures/mock_pipeline.toml").string(); }

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
    }
    return out;
}

}  // namespace

TEST_CASE("file values, defaults and path resolution") {
    const auto cfg = parse_config(kBase, "/cfg/dir", {}, kNoEnv);
    CHECK(cfg.params.k == 3);
    CHECK(cfg.params.qc_threshold == 0.7);
    CHECK(cfg.params.eval_fraction == 0.1);
    CHECK(cfg.params.n_neg == 7);
    CHECK(cfg.params.refusal_ratio == 0.125);
    CHECK(cfg.params.recall_ks == std::vector<std::size_t>{1, 5, 10});
    CHECK(cfg.tables == fs::path("/cfg/dir/kb"));
    CHECK(cfg.workdir == fs::path("/cfg/dir/work"));
    CHECK(cfg.endpoint("generator").model == "file-model");
    CHECK_THROWS_AS(cfg.endpoint("judge"), ConfigError);
}

TEST_CASE("precedence is flag over env over file") {
    const auto env = env_of({{"FORGE_K", "4"},
                             {"FORGE_GENERATOR_BASE_URL", "http://env.example/v1"},
                             {"FORGE_GENERATOR_MODEL", "env-model"},
                             {"FORGE_JUDGE_BASE_URL", "mock"}});
    auto cfg = parse_config(kBase, "/cfg", {}, env);
    CHECK(cfg.params.k == 4);
    CHECK(cfg.endpoint("generator").base_url == "http://env.example/v1");
    CHECK(cfg.endpoint("generator").model == "env-model");
    CHECK(cfg.endpoint("generator").api_key_env == "GEN_KEY");
    CHECK(cfg.endpoint("judge").model == "mock-judge");

    Overrides flags;
    flags.k = "6";
    flags.model["generator"] = "flag-model";
    flags.seed = 42;
    flags.workdir = "/elsewhere";
    cfg = parse_config(kBase, "/cfg", flags, env);
    CHECK(cfg.params.k == 6);
    CHECK(cfg.endpoint("generator").model == "flag-model");
    CHECK(cfg.endpoint("generator").base_url == "http://env.example/v1");
    CHECK(cfg.params.split_seed == 42);
    CHECK(cfg.workdir == fs::path("/elsewhere"));

    flags.k = "1,3,20";
    cfg = parse_config(kBase, "/cfg", flags, env);
    CHECK(cfg.params.k == 4);
    CHECK(cfg.params.recall_ks == std::vector<std::size_t>{1, 3, 20});
}

TEST_CASE("errors name the offending field") {
    CHECK(field_of(kBase + "\n[extra]\nx = 1\n") == "extra");
    CHECK(field_of(kBase + "\n[serve]\nhots = \"a\"\n") == "serve.hots");
    CHECK(field_of(kBase + "\n[judge]\nbase_url = \"mock\"\nmodle = \"x\"\n") == "judge.modle");
    CHECK(field_of(kBase + "\n[grader]\nbase_url = \"mock\"\noracle_from_dataset = true\n") ==
          "grader.oracle_from_dataset");
    CHECK(field_of(R"([paths]
tables = "kb"
workdir = "w"
[params]
k = 0
)") == "params.k");
    CHECK(field_of(R"([paths]
tables = "kb"
workdir = "w"
[params]
qc_threshold = 1.5
)") == "params.qc_threshold");
    CHECK(field_of(R"([paths]
tables = "kb"
bundle = "b.json"
workdir = "w"
)") == "paths.tables");
    CHECK(field_of(R"([paths]
tables = "kb"
)") == "paths.workdir");
    CHECK(field_of(R"([paths]
tables = "kb"
workdir = "w"
[params]
tokenizer = "bpe"
)") == "params.tokenizer");
    CHECK(field_of("[paths\n") == "config");
    CHECK(field_of(kBase, env_of({{"FORGE_K", "five"}})) == "FORGE_K");
    CHECK(field_of(kBase + "\n[embedder]\nbase_url = \"mock\"\ndimension = 0\n") == "embedder.dimension");

    CHECK(parse_k_list(" 1, 5 ,10", "f") == std::vector<std::size_t>{1, 5, 10});
    CHECK_THROWS_AS(parse_k_list("1,,5", "f"), ConfigError);
    CHECK_THROWS_AS(parse_k_list("-2", "f"), ConfigError);
}

TEST_CASE("describe shows key variable names, never values") {
    const auto cfg = parse_config(kBase, "/cfg", {}, env_of({{"GEN_KEY", "sk-very-secret"}}));
    const auto text = describe(cfg).dump();
    CHECK(text.find("GEN_KEY") != std::string::npos);
    CHECK(text.find("sk-very-secret") == std::string::npos);
}

TEST_CASE("exit codes") {
    attackqa::testing::TempDir dir("cli_exit");
    const auto work = (dir.path() / "w").string();

    SUBCASE("missing upstream artifact") {
        const auto r = forge({"--config", mock_config(), "--workdir", work, "eval"});
        CHECK(r.code == kMissingArtifact);
        CHECK(r.err.find("index/manifest.json") != std::string::npos);
    }
    SUBCASE("bad flag value") {
        const auto r = forge({"--config", mock_config(), "--workdir", work, "--k", "0", "ingest"});
        CHECK(r.code == kConfigError);
        CHECK(r.err.find("--k") != std::string::npos);
    }
    SUBCASE("unknown config key") {
        const auto cfg = dir.path() / "bad.toml";
        write_file(cfg, "[paths]\ntables = \"kb\"\nworkdir = \"w\"\n[params]\nkk = 1\n");
        const auto r = forge({"--config", cfg.string(), "ingest"});
        CHECK(r.code == kConfigError);
        CHECK(r.err.find("params.kk") != std::string::npos);
    }
    SUBCASE("missing config file and unknown subcommand") {
        CHECK(forge({"--config", (dir.path() / "none.toml").string(), "ingest"}).code == kConfigError);
        CHECK(forge({"--config", mock_config(), "frobnicate"}).code == kConfigError);
        CHECK(forge({"ingest"}).code == kConfigError);
    }
    SUBCASE("ingest then corpus succeed") {
        auto r = forge({"--config", mock_config(), "--workdir", work, "ingest"});
        CHECK_MESSAGE(r.code == kOk, r.err);
        CHECK(fs::exists(fs::path(work) / "kb"));
        r = forge({"--config", mock_config(), "--workdir", work, "build-corpus"});
        CHECK_MESSAGE(r.code == kOk, r.err);
        CHECK(read_jsonl(fs::path(work) / "corpus" / "corpus.jsonl").size() == 116);
    }
    SUBCASE("a stage without its endpoint names the role") {
        const auto cfg = dir.path() / "noembed.toml";
        write_file(cfg, "[paths]\ntables = \"" +
                            attackqa::testing::fixture_path("fixtures/kb").string() +
                            "\"\nworkdir = \"w\"\n");
        REQUIRE(forge({"--config", cfg.string(), "ingest"}).code == kOk);
        REQUIRE(forge({"--config", cfg.string(), "build-corpus"}).code == kOk);
        const auto r = forge({"--config", cfg.string(), "index"});
        CHECK(r.code == kConfigError);
        CHECK(r.err.find("embedder.base_url") != std::string::npos);
    }
}

TEST_CASE("mock run-all is reproducible byte for byte") {
    attackqa::testing::TempDir a("cli_run_a");
    attackqa::testing::TempDir b("cli_run_b");
    const auto ra = forge({"--config", mock_config(), "--workdir", a.path().string(), "run-all"});
    REQUIRE_MESSAGE(ra.code == kOk, ra.err);
    const auto rb = forge({"--config", mock_config(), "--workdir", b.path().string(), "run-all"});
    REQUIRE_MESSAGE(rb.code == kOk, rb.err);

    const auto ta = tree(a.path());
    const auto tb = tree(b.path());
    CHECK(ta.size() == tb.size());
    for (const auto& [name, content] : ta) {
        CAPTURE(name);
        auto it = tb.find(name);
        REQUIRE(it != tb.end());
        CHECK(it->second == content);
    }
    for (const char* f : {"qa/attackqa.jsonl", "split/train.jsonl", "split/eval.jsonl",
                          "index/manifest.json", "tuning/embedding_train.jsonl",
                          "tuning/generation_train.jsonl", "eval/report.json", "eval/report.md"}) {
        CHECK_MESSAGE(ta.count(f) == 1, f);
    }
    const auto report = json::parse(ta.at("eval/report.json"));
    CHECK(report["table"]["context_recall_at_k"] == 100.0);
    CHECK(report["table"]["answer_parsing_success"] == 100.0);
}
