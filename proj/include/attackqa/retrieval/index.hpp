#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/corpus/document.hpp"
#include "attackqa/gateway/client.hpp"
#include "attackqa/qa/pair.hpp"
#include "attackqa/retrieval/kernels.hpp"

namespace attackqa {

struct IndexError : std::runtime_error {
    std::vector<std::string> failed_doc_ids;
    explicit IndexError(const std::string& what, std::vector<std::string> failed = {})
        : std::runtime_error(what), failed_doc_ids(std::move(failed)) {}
};

/// Hash over doc ids and texts in corpus order.
std::string corpus_hash(const std::vector<Document>& corpus);

/// Flat exact-search index. Immutable once built.
class VectorIndex {
public:
    /// Throws IndexError on duplicate doc ids, a size mismatch or mixed dimensions.
    VectorIndex(std::vector<Document> docs, const std::vector<std::vector<double>>& vectors,
                std::string embedder_model);

    std::size_t size() const { return docs_.size(); }
    std::size_t dimension() const { return matrix_.dim; }
    const std::string& embedder_model() const { return embedder_model_; }
    const std::string& corpus_hash() const { return corpus_hash_; }
    /// fingerprint(model, corpus hash, dimension).
    const std::string& fingerprint() const { return fingerprint_; }

    const Document& doc(std::size_t i) const { return docs_[i]; }
    const std::vector<Document>& docs() const { return docs_; }
    const std::vector<std::string>& doc_ids() const { return ids_; }
    const kernels::Matrix& matrix() const { return matrix_; }
    std::optional<std::size_t> find(const std::string& doc_id) const;
    std::optional<std::size_t> find_by_text(const std::string& text) const;

    /// manifest.json plus vectors.jsonl of {doc_id, vector}.
    void save(const std::filesystem::path& dir) const;
    /// `corpus` must be the corpus the index was built over (checked by hash).
    static VectorIndex load(const std::filesystem::path& dir, std::vector<Document> corpus);

private:
    std::vector<Document> docs_;
    std::vector<std::string> ids_;
    kernels::Matrix matrix_;
    std::string embedder_model_;
    std::string corpus_hash_;
    std::string fingerprint_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> by_text_;
};

/// Embeds text() of every document in batch_size requests. Failed batches do
/// not stop the others; the build then throws IndexError listing their doc ids.
VectorIndex build_index(const std::vector<Document>& corpus, gateway::Client& embedder);

struct RankedDoc {
    std::size_t index;  // position in the index
    std::string doc_id;
    double score;
};

struct RetrievalResult {
    std::string query;
    std::vector<RankedDoc> ranked;
    bool k_exceeds_corpus = false;

    /// 1-based rank of `doc_id`, nullopt when absent.
    std::optional<std::size_t> rank_of(const std::string& doc_id) const;
};

/// Exhaustive cosine top-k for a query vector. k must be >= 1.
RetrievalResult retrieve_vector(const VectorIndex& index, const std::vector<double>& query,
                                std::size_t k);
RetrievalResult retrieve(const VectorIndex& index, const std::string& question, std::size_t k,
                         gateway::Client& embedder);

struct RecallReport {
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t hits = 0;
    double recall() const { return n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0; }
    ordered_json to_json() const;
};

/// R(k) for each k from precomputed rankings (each at least max k long) and
/// golden doc ids. Throws std::invalid_argument when there are no queries.
std::vector<RecallReport> recall_from_rankings(const std::vector<std::vector<std::string>>& ranked,
                                               const std::vector<std::string>& golden,
                                               const std::vector<std::size_t>& ks);

/// Embeds every question, ranks once at max(ks) and counts golden hits. Each
/// pair's golden doc is the index entry whose text equals pair.document.
std::vector<RecallReport> context_recall(const VectorIndex& index,
                                         const std::vector<QAPair>& eval_pairs,
                                         const std::vector<std::size_t>& ks,
                                         gateway::Client& embedder);

}  // namespace attackqa
