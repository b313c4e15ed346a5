#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "attackqa/cli/config.hpp"

namespace attackqa::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kMissingArtifact = 2, kRuntimeError = 3 };

/// An input a stage needs is not on disk yet.
struct MissingArtifact : std::runtime_error {
    std::filesystem::path path;
    explicit MissingArtifact(const std::filesystem::path& p)
        : std::runtime_error("missing upstream artifact: " + p.string()), path(p) {}
};

/// Workdir layout shared by every stage.
struct Layout {
    std::filesystem::path root;

    std::filesystem::path kb() const { return root / "kb"; }
    std::filesystem::path corpus() const { return root / "corpus" / "corpus.jsonl"; }
    std::filesystem::path raw_pairs() const { return root / "qa" / "attackqa_raw.jsonl"; }
    std::filesystem::path pairs() const { return root / "qa" / "attackqa.jsonl"; }
    std::filesystem::path qc_scores() const { return root / "qa" / "qc_scores.jsonl"; }
    std::filesystem::path train() const { return root / "split" / "train.jsonl"; }
    std::filesystem::path eval() const { return root / "split" / "eval.jsonl"; }
    std::filesystem::path index() const { return root / "index"; }
    std::filesystem::path index_manifest() const { return index() / "manifest.json"; }
    std::filesystem::path tuning() const { return root / "tuning"; }
    std::filesystem::path eval_dir() const { return root / "eval"; }
};

/// Runs one stage against a loaded config. Throws MissingArtifact, ConfigError
/// or runtime errors; forge_main maps them to exit codes.
void run_stage(const std::string& stage, const PipelineConfig& cfg, std::ostream& log);

/// Every stage from ingest through eval, in order.
void run_all(const PipelineConfig& cfg, std::ostream& log);

/// Grader precision/recall of the stored QC scores against an annotation file.
void run_qc_eval(const PipelineConfig& cfg, const std::filesystem::path& annotations,
                 std::ostream& log);

/// Blocks serving the RAG API until the process is stopped.
void run_serve(const PipelineConfig& cfg, std::ostream& log);

/// The `forge` command line. Exit codes: 0 ok, 1 config error (message names
/// the field path), 2 missing upstream artifact (message names the file),
/// 3 any other failure.
int forge_main(int argc, char** argv);
int forge_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace attackqa::cli
