#include "attackqa/cli/app.hpp"

#include <csignal>
#include <iostream>
#include <pthread.h>
#include <thread>

#include <CLI11.hpp>

#include "attackqa/cli/mock_models.hpp"
#include "attackqa/corpus/builder.hpp"
#include "attackqa/corpus/tokenizer.hpp"
#include "attackqa/dataset/split.hpp"
#include "attackqa/dataset/summary.hpp"
#include "attackqa/dataset/tuning.hpp"
#include "attackqa/eval/eval.hpp"
#include "attackqa/gateway/client.hpp"
#include "attackqa/ingest/stix.hpp"
#include "attackqa/ingest/tabular.hpp"
#include "attackqa/ingest/validate.hpp"
#include "attackqa/qa/generator.hpp"
#include "attackqa/qc/qc.hpp"
#include "attackqa/rag/server.hpp"
#include "attackqa/retrieval/index.hpp"

namespace attackqa::cli {

namespace fs = std::filesystem;

namespace {

void require(const fs::path& p) {
    if (!fs::exists(p)) throw MissingArtifact(p);
}

void write_json(const fs::path& path, const ordered_json& j) {
    fs::create_directories(path.parent_path());
    write_file(path, j.dump(2) + "\n");
}

ordered_json stats_json(const IngestStats& s) {
    ordered_json j;
    j["entities_per_category"] = s.entities_per_category;
    j["relationships"] = s.relationships;
    j["deprecated_or_revoked"] = s.deprecated_or_revoked;
    j["relationships_to_excluded"] = s.relationships_to_excluded;
    j["unresolvable_endpoints"] = s.unresolvable_endpoints;
    j["skipped_types"] = s.skipped_types;
    j["skipped_relationship_types"] = s.skipped_relationship_types;
    return j;
}

ordered_json validation_json(const ValidationReport& r) {
    ordered_json findings = ordered_json::array();
    for (const auto& f : r.findings) {
        findings.push_back({{"kind", std::string(finding_kind_name(f.kind))},
                            {"category", f.category},
                            {"id", f.id},
                            {"detail", f.detail}});
    }
    return {{"clean", r.clean()}, {"findings", findings}};
}

ordered_json corpus_stats_json(const CorpusStats& s) {
    return {{"doc_count", s.doc_count},
            {"min_tokens", s.min_tokens},
            {"max_tokens", s.max_tokens},
            {"mean_tokens", s.mean_tokens},
            {"tokenizer", s.tokenizer}};
}

/// Mock endpoints answer through the shared responder; an embedder with
/// oracle_from_dataset maps every question in the QC'd dataset onto its
/// golden document.
std::shared_ptr<gateway::Client> client_for(const PipelineConfig& cfg, const std::string& role) {
    const auto& e = cfg.endpoint(role);
    if (role != "embedder" || !e.is_mock() || !cfg.embedder_oracle_from_dataset) {
        return gateway::make_client(e, mock_model_response);
    }
    e.validate();
    auto oracle = e.oracle_file.empty() ? std::unordered_map<std::string, std::string>{}
                                        : gateway::MockBackend::load_oracle(e.oracle_file);
    const Layout layout{cfg.workdir};
    if (fs::exists(layout.pairs())) {
        for (const auto& p : load_pairs(layout.pairs())) oracle.emplace(p.question, p.document);
    }
    auto script = e.mock_script.empty() ? gateway::MockScript{}
                                        : gateway::MockScript::load(e.mock_script);
    auto backend = std::make_shared<gateway::MockBackend>(std::move(script), mock_model_response,
                                                          e.dimension, std::move(oracle));
    return std::make_shared<gateway::Client>(e, std::move(backend));
}

KnowledgeBase load_kb(const Layout& layout) {
    require(layout.kb() / "manifest.json");
    return load_tabular(layout.kb());
}

std::vector<Document> load_corpus_artifact(const Layout& layout) {
    require(layout.corpus());
    return load_corpus(layout.corpus());
}

VectorIndex load_index(const Layout& layout) {
    require(layout.index_manifest());
    return VectorIndex::load(layout.index(), load_corpus_artifact(layout));
}

std::vector<QAPair> load_pairs_artifact(const fs::path& path) {
    require(path);
    return load_pairs(path);
}

void stage_ingest(const PipelineConfig& cfg, const Layout& layout, std::ostream& log) {
    KnowledgeBase kb;
    IngestStats stats;
    if (cfg.bundle) {
        require(*cfg.bundle);
        auto parsed = parse_bundle(read_file(*cfg.bundle));
        kb = std::move(parsed.kb);
        stats = std::move(parsed.stats);
    } else if (cfg.tables) {
        require(*cfg.tables / "manifest.json");
        kb = load_tabular(*cfg.tables);
        for (auto c : kAllCategories) {
            stats.entities_per_category[std::string(category_name(c))] = kb.table(c).size();
        }
        stats.relationships = kb.relationships.size();
    } else {
        throw ConfigError("paths.bundle", "ingest needs paths.bundle or paths.tables");
    }
    fs::remove_all(layout.kb());
    export_tabular(kb, layout.kb());
    write_json(layout.root / "reports" / "ingest_report.json", stats_json(stats));
    write_json(layout.root / "reports" / "validation.json", validation_json(validate(kb)));
    log << "ingest: " << kb.entity_count() << " entities, " << kb.relationships.size()
        << " relationships -> " << layout.kb().string() << "\n";
}

void stage_build_corpus(const PipelineConfig& cfg, const Layout& layout, std::ostream& log) {
    auto kb = load_kb(layout);
    auto corpus = build_corpus(kb);
    save_corpus(corpus.docs, layout.corpus());
    auto tokenizer = make_tokenizer(cfg.params.tokenizer);
    write_json(layout.root / "corpus" / "corpus_report.json", corpus.report.to_json());
    write_json(layout.root / "corpus" / "corpus_stats.json",
               corpus_stats_json(corpus_stats(corpus.docs, *tokenizer)));
    log << "build-corpus: " << corpus.docs.size() << " documents\n";
}

void stage_gen_qa(const PipelineConfig& cfg, const Layout& layout, std::ostream& log) {
    auto corpus = load_corpus_artifact(layout);
    auto generator = client_for(cfg, "generator");
    auto tokenizer = make_tokenizer(cfg.params.tokenizer);
    auto result = generate_dataset(corpus, generator.get(), cfg.params.workers, tokenizer.get());
    save_pairs(result.pairs, layout.raw_pairs());
    write_json(layout.root / "qa" / "generation_report.json", result.report.to_json());
    log << "gen-qa: " << result.pairs.size() << " pairs, parse success "
        << result.report.parse_success_rate() << "\n";
}

void stage_qc(const PipelineConfig& cfg, const Layout& layout, std::ostream& log) {
    auto raw = load_pairs_artifact(layout.raw_pairs());
    std::shared_ptr<gateway::Client> grader;
    if (cfg.endpoints.count("grader")) {
        grader = client_for(cfg, "grader");
    } else {
        log << "qc: no [grader] endpoint, score filtering skipped\n";
    }
    auto result = run_qc(raw, grader.get(), cfg.params.qc_threshold, cfg.params.workers);

    std::vector<QAPair> kept;
    std::vector<ordered_json> scores;
    for (const auto& s : result.retained) {
        kept.push_back(s.pair);
        scores.push_back({{"question", s.pair.question}, {"score", s.score.to_json()}});
    }
    std::vector<ordered_json> removed;
    for (const auto& r : result.removed) {
        ordered_json row{{"reason", r.reason}, {"pair", to_json(r.pair)}};
        if (r.score) {
            row["score"] = r.score->to_json();
            scores.push_back({{"question", r.pair.question}, {"score", r.score->to_json()}});
        }
        removed.push_back(std::move(row));
    }
    save_pairs(kept, layout.pairs());
    write_jsonl(layout.qc_scores(), scores);
    write_jsonl(layout.root / "qa" / "qc_removed.jsonl", removed);
    write_json(layout.root / "qa" / "qc_report.json", result.report.to_json());

    auto tokenizer = make_tokenizer(cfg.params.tokenizer);
    const auto summary = dataset_summary(kept, *tokenizer);
    write_json(layout.root / "qa" / "dataset_summary.json", summary.to_json());
    write_file(layout.root / "qa" / "dataset_summary.md", summary.to_markdown());
    log << "qc: kept " << kept.size() << " of " << raw.size() << " pairs\n";
}

void stage_split(const PipelineConfig& cfg, const Layout& layout, std::ostream& log) {
    auto pairs = load_pairs_artifact(layout.pairs());
    const auto split = split_train_eval(pairs, cfg.params.split_seed, cfg.params.eval_fraction);
    auto write = [&](const fs::path& path, const std::vector<QAPair>& rows) {
        std::vector<ordered_json> out{ordered_json{{"header", split.header()}}};
        for (const auto& p : rows) out.push_back(to_json(p));
        write_jsonl(path, out);
    };
    write(layout.train(), split.train);
    write(layout.eval(), split.eval);
    log << "split: " << split.train.size() << " train, " << split.eval.size() << " eval\n";
}

void stage_index(const PipelineConfig& cfg, const Layout& layout, std::ostream& log) {
    auto corpus = load_corpus_artifact(layout);
    auto embedder = client_for(cfg, "embedder");
    auto index = build_index(corpus, *embedder);
    fs::remove_all(layout.index());
    index.save(layout.index());
    log << "index: " << index.size() << " vectors of dimension " << index.dimension() << "\n";
}

void stage_build_emb_data(const PipelineConfig& cfg, const Layout& layout, std::ostream& log) {
    auto train = load_pairs_artifact(layout.train());
    auto corpus = load_corpus_artifact(layout);
    auto kb = load_kb(layout);
    auto data = build_embedding_dataset(train, corpus, kb, cfg.params.n_neg, cfg.params.split_seed);
    std::vector<ordered_json> rows;
    for (const auto& r : data.rows) rows.push_back(r.to_json());
    write_jsonl(layout.tuning() / "embedding_train.jsonl", rows);
    write_json(layout.tuning() / "embedding_report.json", data.report.to_json());
    log << "build-emb-data: " << rows.size() << " rows\n";
}

void stage_build_gen_data(const PipelineConfig& cfg, const Layout& layout, std::ostream& log) {
    auto train = load_pairs_artifact(layout.train());
    auto index = load_index(layout);
    auto embedder = client_for(cfg, "embedder");
    const auto k = cfg.params.k;
    const auto seed = cfg.params.split_seed;
    auto base = build_generation_dataset(train, index, *embedder, k, seed);
    auto refusals = build_refusal_examples(train, index, *embedder, k, base.rows.size(),
                                           cfg.params.refusal_ratio, seed);
    std::vector<ordered_json> rows;
    for (const auto& r : base.rows) rows.push_back(r.to_json());
    for (const auto& r : refusals.rows) rows.push_back(r.to_json());
    write_jsonl(layout.tuning() / "generation_train.jsonl", rows);
    write_json(layout.tuning() / "generation_report.json",
               ordered_json{{"base", base.report.to_json()}, {"refusal", refusals.report.to_json()}});
    if (refusals.report.warning) log << "build-gen-data: " << *refusals.report.warning << "\n";
    log << "build-gen-data: " << base.rows.size() << " rows + " << refusals.rows.size()
        << " refusals\n";
}

void stage_eval(const PipelineConfig& cfg, const Layout& layout, std::ostream& log) {
    require(layout.index_manifest());
    auto eval_pairs = load_pairs_artifact(layout.eval());
    auto index = load_index(layout);
    auto embedder = client_for(cfg, "embedder");
    auto generator = client_for(cfg, "generator");
    auto judge = client_for(cfg, "judge");
    auto run = run_eval(eval_pairs, index, *embedder, *generator, *judge, cfg.params.k,
                        cfg.params.recall_ks, cfg.params.workers);
    write_eval_outputs(run, layout.eval_dir());
    log << run.report.to_markdown();
}

using StageFn = void (*)(const PipelineConfig&, const Layout&, std::ostream&);

const std::vector<std::pair<std::string, StageFn>>& stages() {
    static const std::vector<std::pair<std::string, StageFn>> list{
        {"ingest", stage_ingest},
        {"build-corpus", stage_build_corpus},
        {"gen-qa", stage_gen_qa},
        {"qc", stage_qc},
        {"split", stage_split},
        {"index", stage_index},
        {"build-emb-data", stage_build_emb_data},
        {"build-gen-data", stage_build_gen_data},
        {"eval", stage_eval},
    };
    return list;
}

}  // namespace

void run_stage(const std::string& stage, const PipelineConfig& cfg, std::ostream& log) {
    for (const auto& [name, fn] : stages()) {
        if (name == stage) {
            fn(cfg, Layout{cfg.workdir}, log);
            return;
        }
    }
    throw std::invalid_argument("unknown stage: " + stage);
}

void run_all(const PipelineConfig& cfg, std::ostream& log) {
    for (const auto& [name, fn] : stages()) fn(cfg, Layout{cfg.workdir}, log);
}

void run_qc_eval(const PipelineConfig& cfg, const fs::path& annotations, std::ostream& log) {
    const Layout layout{cfg.workdir};
    require(layout.qc_scores());
    require(annotations);
    std::map<std::string, QCScore> predictions;
    for (const auto& row : read_jsonl(layout.qc_scores())) {
        predictions[row.at("question").get<std::string>()] = QCScore::from_json(row.at("score"));
    }
    const auto metrics =
        grader_metrics(predictions, load_annotations(annotations), cfg.params.qc_threshold);
    write_json(layout.root / "qa" / "grader_metrics.json", metrics.to_json());
    log << metrics.to_json().dump() << "\n";
}

void run_serve(const PipelineConfig& cfg, std::ostream& log) {
    const Layout layout{cfg.workdir};
    auto index = load_index(layout);
    auto embedder = client_for(cfg, "embedder");
    auto generator = client_for(cfg, "generator");

    ServerOptions options;
    options.default_k = cfg.params.k;
    options.max_k = cfg.serve.max_k;
    if (!cfg.serve.bearer_token_env.empty()) {
        auto token = process_env(cfg.serve.bearer_token_env);
        if (!token || token->empty()) {
            throw ConfigError("serve.bearer_token_env",
                              "variable " + cfg.serve.bearer_token_env + " is not set");
        }
        options.bearer_token = *token;
    }
    if (cfg.serve.log_interactions) options.interaction_log = layout.root / "serve" / "interactions.jsonl";

    // Block the stop signals before the listener thread starts so only this
    // thread receives them.
    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    RagServer server(index, *embedder, *generator, options);
    const int port = server.bind(cfg.serve.host, cfg.serve.port);
    log << "serve: listening on http://" << cfg.serve.host << ":" << port << "\n" << std::flush;
    std::thread listener([&] { server.listen(); });
    int sig = 0;
    sigwait(&stop_signals, &sig);
    server.stop();
    listener.join();
    log << "serve: stopped\n";
}

int forge_main(int argc, char** argv) { return forge_main(argc, argv, std::cout, std::cerr); }

int forge_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"forge: ATT&CK question answering pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> k;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> workdir;
    std::optional<int> port;
    std::string annotations;
    std::map<std::string, std::string> urls, models;
    app.add_option("--config", config_path, "Pipeline TOML file")->required();
    app.add_option("--seed", seed, "Seed for split and dataset sampling");
    app.add_option("--k", k, "Retrieval depth, or a comma-separated recall list for eval");
    app.add_option("--workdir", workdir, "Override paths.workdir");
    for (const char* role : kRoles) {
        const std::string r(role);
        app.add_option_function<std::string>(
            "--" + r + "-base-url", [&urls, r](const std::string& v) { urls[r] = v; },
            "Override " + r + ".base_url");
        app.add_option_function<std::string>(
            "--" + r + "-model", [&models, r](const std::string& v) { models[r] = v; },
            "Override " + r + ".model");
    }

    for (const auto& [name, fn] : stages()) app.add_subcommand(name, "Run the " + name + " stage");
    app.add_subcommand("run-all", "Run every stage from ingest to eval");
    auto* serve = app.add_subcommand("serve", "Serve the RAG HTTP API");
    serve->add_option("--port", port, "Listen port (0 picks a free one)");
    auto* qc_eval = app.add_subcommand("qc-eval", "Grader precision and recall against annotations");
    qc_eval->add_option("--annotations", annotations, "JSONL of {question, score, reason}")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Overrides o;
        o.k = k;
        o.seed = seed;
        if (workdir) o.workdir = fs::absolute(*workdir);
        o.base_url = urls;
        o.model = models;
        o.port = port;
        const auto cfg = load_config(config_path, o);

        if (command == "run-all") {
            run_all(cfg, out);
        } else if (command == "serve") {
            run_serve(cfg, out);
        } else if (command == "qc-eval") {
            run_qc_eval(cfg, annotations, out);
        } else {
            run_stage(command, cfg, out);
        }
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const MissingArtifact& e) {
        err << "error: " << e.what() << " (run the earlier stage first)\n";
        return kMissingArtifact;
    } catch (const std::exception& e) {
        err << "error: " << command << ": " << e.what() << "\n";
        return kRuntimeError;
    }
}

}  // namespace attackqa::cli
