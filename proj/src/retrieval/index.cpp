#include "attackqa/retrieval/index.hpp"

#include <algorithm>

#include "attackqa/common/hash.hpp"

namespace attackqa {

std::string corpus_hash(const std::vector<Document>& corpus) {
    std::uint64_t h = kFnvOffset;
    for (const auto& d : corpus) {
        h = fnv1a64(d.doc_id, h);
        h = fnv1a64("\x1f", h);
        h = fnv1a64(d.text(), h);
        h = fnv1a64("\x1e", h);
    }
    return to_hex(h);
}

VectorIndex::VectorIndex(std::vector<Document> docs,
                         const std::vector<std::vector<double>>& vectors,
                         std::string embedder_model)
    : docs_(std::move(docs)), embedder_model_(std::move(embedder_model)) {
    if (docs_.empty()) throw IndexError("empty corpus");
    if (vectors.size() != docs_.size()) {
        throw IndexError(std::to_string(vectors.size()) + " vectors for " +
                         std::to_string(docs_.size()) + " documents");
    }
    matrix_.rows = docs_.size();
    matrix_.dim = vectors.front().size();
    if (matrix_.dim == 0) throw IndexError("zero-dimensional vectors");
    matrix_.data.reserve(matrix_.rows * matrix_.dim);
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const auto& d = docs_[i];
        if (!by_id_.emplace(d.doc_id, i).second) throw IndexError("duplicate doc_id " + d.doc_id);
        by_text_.emplace(d.text(), i);
        ids_.push_back(d.doc_id);
        if (vectors[i].size() != matrix_.dim) {
            throw IndexError("vector for " + d.doc_id + " has dimension " +
                             std::to_string(vectors[i].size()) + ", expected " +
                             std::to_string(matrix_.dim));
        }
        matrix_.data.insert(matrix_.data.end(), vectors[i].begin(), vectors[i].end());
        matrix_.norms.push_back(kernels::norm(vectors[i]));
    }
    corpus_hash_ = attackqa::corpus_hash(docs_);
    fingerprint_ = attackqa::fingerprint(embedder_model_ + "\x1f" + corpus_hash_ + "\x1f" +
                                         std::to_string(matrix_.dim));
}

std::optional<std::size_t> VectorIndex::find(const std::string& doc_id) const {
    auto it = by_id_.find(doc_id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> VectorIndex::find_by_text(const std::string& text) const {
    auto it = by_text_.find(text);
    if (it == by_text_.end()) return std::nullopt;
    return it->second;
}

void VectorIndex::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    ordered_json manifest;
    manifest["dimension"] = matrix_.dim;
    manifest["count"] = docs_.size();
    manifest["embedder_model"] = embedder_model_;
    manifest["corpus_hash"] = corpus_hash_;
    manifest["fingerprint"] = fingerprint_;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    std::vector<ordered_json> rows;
    rows.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        ordered_json r;
        r["doc_id"] = ids_[i];
        const auto row = matrix_.row(i);
        r["vector"] = std::vector<double>(row.begin(), row.end());
        rows.push_back(std::move(r));
    }
    write_jsonl(dir / "vectors.jsonl", rows);
}

VectorIndex VectorIndex::load(const std::filesystem::path& dir, std::vector<Document> corpus) {
    const auto manifest = json::parse(read_file(dir / "manifest.json"));
    std::unordered_map<std::string, std::vector<double>> vectors;
    for (const auto& row : read_jsonl(dir / "vectors.jsonl")) {
        vectors.emplace(row.at("doc_id").get<std::string>(),
                        row.at("vector").get<std::vector<double>>());
    }
    std::vector<std::vector<double>> ordered;
    ordered.reserve(corpus.size());
    for (const auto& d : corpus) {
        auto it = vectors.find(d.doc_id);
        if (it == vectors.end()) throw IndexError("index has no vector for " + d.doc_id);
        ordered.push_back(std::move(it->second));
    }
    VectorIndex index(std::move(corpus), ordered, manifest.at("embedder_model").get<std::string>());
    if (index.corpus_hash() != manifest.at("corpus_hash").get<std::string>()) {
        throw IndexError("corpus does not match the one the index was built over");
    }
    return index;
}

VectorIndex build_index(const std::vector<Document>& corpus, gateway::Client& embedder) {
    if (corpus.empty()) throw IndexError("empty corpus");
    std::unordered_map<std::string, int> seen;
    for (const auto& d : corpus) {
        if (seen[d.doc_id]++ > 0) throw IndexError("duplicate doc_id " + d.doc_id);
    }
    const auto batch = std::max<std::size_t>(1, embedder.config().batch_size);
    std::vector<std::vector<double>> vectors(corpus.size());
    std::vector<std::string> failed;
    std::string last_error;
    for (std::size_t start = 0; start < corpus.size(); start += batch) {
        const auto end = std::min(corpus.size(), start + batch);
        std::vector<std::string> texts;
        for (std::size_t i = start; i < end; ++i) texts.push_back(corpus[i].text());
        try {
            auto out = embedder.embed(texts);
            for (std::size_t i = start; i < end; ++i) vectors[i] = std::move(out[i - start]);
        } catch (const gateway::TransportError& e) {
            last_error = e.what();
            for (std::size_t i = start; i < end; ++i) failed.push_back(corpus[i].doc_id);
        }
    }
    if (!failed.empty()) {
        throw IndexError("embedding failed for " + std::to_string(failed.size()) +
                             " document(s): " + last_error,
                         std::move(failed));
    }
    return VectorIndex(corpus, vectors, embedder.config().model);
}

std::optional<std::size_t> RetrievalResult::rank_of(const std::string& doc_id) const {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (ranked[i].doc_id == doc_id) return i + 1;
    }
    return std::nullopt;
}

RetrievalResult retrieve_vector(const VectorIndex& index, const std::vector<double>& query,
                                std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    if (query.size() != index.dimension()) {
        throw std::invalid_argument("query dimension " + std::to_string(query.size()) +
                                    " does not match index dimension " +
                                    std::to_string(index.dimension()));
    }
    std::vector<double> scores(index.size());
    kernels::cosine_scores_omp(index.matrix(), query, scores);
    RetrievalResult out;
    out.k_exceeds_corpus = k > index.size();
    for (const auto& h : kernels::top_k(scores, index.doc_ids(), k)) {
        out.ranked.push_back(RankedDoc{h.row, index.doc_ids()[h.row], h.score});
    }
    return out;
}

RetrievalResult retrieve(const VectorIndex& index, const std::string& question, std::size_t k,
                         gateway::Client& embedder) {
    auto vectors = embedder.embed({question});
    auto out = retrieve_vector(index, vectors.front(), k);
    out.query = question;
    return out;
}

ordered_json RecallReport::to_json() const {
    ordered_json j;
    j["k"] = k;
    j["n"] = n;
    j["hits"] = hits;
    j["recall"] = recall();
    return j;
}

std::vector<RecallReport> recall_from_rankings(const std::vector<std::vector<std::string>>& ranked,
                                               const std::vector<std::string>& golden,
                                               const std::vector<std::size_t>& ks) {
    if (golden.empty()) throw std::invalid_argument("empty evaluation set");
    if (ranked.size() != golden.size()) {
        throw std::invalid_argument("rankings and golden ids differ in length");
    }
    std::vector<RecallReport> out;
    for (auto k : ks) {
        RecallReport r;
        r.k = k;
        r.n = golden.size();
        for (std::size_t i = 0; i < golden.size(); ++i) {
            const auto& list = ranked[i];
            const auto end = list.begin() + static_cast<std::ptrdiff_t>(std::min(k, list.size()));
            if (std::find(list.begin(), end, golden[i]) != end) ++r.hits;
        }
        out.push_back(r);
    }
    return out;
}

std::vector<RecallReport> context_recall(const VectorIndex& index,
                                         const std::vector<QAPair>& eval_pairs,
                                         const std::vector<std::size_t>& ks,
                                         gateway::Client& embedder) {
    if (eval_pairs.empty()) throw std::invalid_argument("empty evaluation set");
    if (ks.empty()) throw std::invalid_argument("no k values given");
    std::vector<std::string> golden;
    std::vector<std::string> questions;
    for (const auto& p : eval_pairs) {
        auto at = index.find_by_text(p.document);
        if (!at) throw std::invalid_argument("golden document not in index for: " + p.question);
        golden.push_back(index.doc_ids()[*at]);
        questions.push_back(p.question);
    }
    const auto vectors = embedder.embed(questions);
    const auto k_max = *std::max_element(ks.begin(), ks.end());
    const auto hits = kernels::rank_batch_omp(index.matrix(), index.doc_ids(), vectors, k_max);
    std::vector<std::vector<std::string>> ranked(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
        for (const auto& h : hits[i]) ranked[i].push_back(index.doc_ids()[h.row]);
    }
    return recall_from_rankings(ranked, golden, ks);
}

}  // namespace attackqa
