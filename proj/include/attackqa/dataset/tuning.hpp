#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/corpus/document.hpp"
#include "attackqa/gateway/client.hpp"
#include "attackqa/ingest/types.hpp"
#include "attackqa/qa/pair.hpp"
#include "attackqa/retrieval/index.hpp"

namespace attackqa {

inline constexpr std::size_t kDefaultNegatives = 7;
inline constexpr double kDefaultRefusalRatio = 0.125;

/// Two documents are related when their subjects share a base ID (T1562.001 and
/// T1562.002), when the subject of one is the subject or relation of the
/// other, or when a relationship row links the two subjects directly.
bool are_related(const Document& a, const Document& b, const KnowledgeBase& kb);

/// are_related with the relationship links indexed once.
class Relatedness {
public:
    explicit Relatedness(const KnowledgeBase& kb);
    bool operator()(const Document& a, const Document& b) const;

private:
    std::unordered_set<std::string> links_;
};

struct EmbeddingTuneRow {
    std::string question;
    std::vector<std::string> positive_docs;  // document text
    std::vector<std::string> negative_docs;
    std::string positive_id;
    std::vector<std::string> negative_ids;
    ordered_json to_json() const;  // {question, positive_docs, negative_docs}
};

struct EmbeddingDatasetReport {
    std::size_t rows = 0;
    std::size_t short_pool_rows = 0;  // fewer eligible negatives than requested
    std::size_t empty_pool_rows = 0;
    ordered_json to_json() const;
};

struct EmbeddingDataset {
    std::vector<EmbeddingTuneRow> rows;
    EmbeddingDatasetReport report;
};

/// Negatives are drawn uniformly from corpus documents unrelated to the positive,
/// seeded per row by (seed, question). Throws std::invalid_argument when a pair's
/// document is not in the corpus.
EmbeddingDataset build_embedding_dataset(const std::vector<QAPair>& train,
                                         const std::vector<Document>& corpus,
                                         const KnowledgeBase& kb,
                                         std::size_t n_neg = kDefaultNegatives,
                                         std::uint64_t seed = 0);

struct GenerationTuneRow {
    std::string question;
    std::string prompt;
    std::string completion;
    bool contains_golden = false;
    std::optional<std::size_t> golden_rank;  // 1-based position in the prompt
    bool refusal = false;
    ordered_json to_json() const;  // {prompt, completion}
};

/// "<thought without trailing period>. The answer is contained in the provided
/// document with URL '<url>'."
std::string completion_thought(const QAPair& pair);

/// Prompt over `docs` in the given order and the completion for the pair's
/// thought, answer and URL.
GenerationTuneRow make_generation_row(const QAPair& pair, const std::vector<Document>& docs);

struct GenerationDatasetReport {
    std::size_t rows = 0;
    std::size_t golden_injected = 0;  // golden replaced the rank-k document
    std::size_t retrieval_failures = 0;
    std::size_t refusal_rows = 0;
    std::size_t refusal_target = 0;
    std::size_t refusal_eligible = 0;
    std::optional<std::string> warning;
    ordered_json to_json() const;
};

struct GenerationDataset {
    std::vector<GenerationTuneRow> rows;
    GenerationDatasetReport report;
};

/// Per pair: top-k, golden swapped in for the rank-k document when missing,
/// order shuffled with a (seed, question) RNG.
GenerationDataset build_generation_dataset(const std::vector<QAPair>& train,
                                           const VectorIndex& index, gateway::Client& embedder,
                                           std::size_t k = 5, std::uint64_t seed = 0);

/// Refusal rows needed so refusals make up `ratio` of base + refusals:
/// round(base * ratio / (1 - ratio)).
std::size_t refusal_target(std::size_t base_rows, double ratio);

/// Train questions whose golden document misses the top-k, kept in retrieval
/// order without injection, answered with the refusal sentinel and no
/// references. `base_rows` is the size of the generation dataset.
GenerationDataset build_refusal_examples(const std::vector<QAPair>& train,
                                         const VectorIndex& index, gateway::Client& embedder,
                                         std::size_t k, std::size_t base_rows,
                                         double ratio = kDefaultRefusalRatio,
                                         std::uint64_t seed = 0);

}  // namespace attackqa
