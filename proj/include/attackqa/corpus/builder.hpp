#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "attackqa/corpus/document.hpp"
#include "attackqa/corpus/tokenizer.hpp"
#include "attackqa/ingest/types.hpp"

namespace attackqa {

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorpusBuildReport {
    std::size_t description_docs = 0;
    std::size_t relation_docs = 0;
    std::size_t summary_docs = 0;
    std::size_t skipped_empty_description = 0;
    std::size_t skipped_empty = 0;  // relationships without a mapping description
    std::size_t unsupported_relationships = 0;
    std::size_t duplicate_docs = 0;
    std::map<std::string, std::size_t> per_source;

    ordered_json to_json() const;
};

struct Corpus {
    std::vector<Document> docs;
    CorpusBuildReport report;
};

/// "Description of attack group 'G1024: Akira':" plus the cleaned description.
/// nullopt when the description is empty.
std::optional<Document> build_description_doc(const Entity& entity);

/// Per-relationship document. Subject is the target entity, relation the
/// source. With a knowledge base the subject URL and name come from the
/// entity table; otherwise they are derived from the relationship row.
/// nullopt for an empty mapping description or an unsupported mapping.
std::optional<Document> build_relation_doc(const Relationship& rel,
                                           const KnowledgeBase* kb = nullptr);

/// One document per (subject, rule) group with at least one member.
std::vector<Document> build_relation_summary_docs(const KnowledgeBase& kb);

/// Description, relation and summary documents in that order, deduplicated by doc_id.
Corpus build_corpus(const KnowledgeBase& kb);

struct CorpusStats {
    std::size_t doc_count = 0;
    std::size_t max_tokens = 0;
    std::size_t min_tokens = 0;
    double mean_tokens = 0.0;
    std::string tokenizer;
};

/// Token lengths over text(). Throws CorpusError("empty corpus").
CorpusStats corpus_stats(const std::vector<Document>& corpus, const Tokenizer& tokenizer);

std::vector<Document> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::vector<Document>& docs, const std::filesystem::path& path);

}  // namespace attackqa
