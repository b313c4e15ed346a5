#include "attackqa/dataset/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "attackqa/common/hash.hpp"
#include "attackqa/common/rng.hpp"
#include "attackqa/common/text.hpp"
#include "attackqa/rag/prompt.hpp"

namespace attackqa {

namespace {

std::string link_key(const std::string& a, const std::string& b) { return a + '\x1f' + b; }

bool same_nonempty(const std::string& a, const std::optional<std::string>& b) {
    return !a.empty() && b && a == *b;
}

bool base_or_reference_match(const Document& a, const Document& b) {
    if (!a.subject_id.empty() && base_id(a.subject_id) == base_id(b.subject_id)) return true;
    if (!a.subject_id.empty() && a.subject_id == b.subject_id) return true;
    return same_nonempty(a.subject_id, b.relation_id) || same_nonempty(b.subject_id, a.relation_id);
}

// Top-k hits per pair; nullopt where embedding the question failed.
std::vector<std::optional<std::vector<kernels::Hit>>> retrieve_all(
    const std::vector<QAPair>& pairs, const VectorIndex& index, gateway::Client& embedder,
    std::size_t k) {
    std::vector<std::optional<std::vector<kernels::Hit>>> out(pairs.size());
    const auto batch = std::max<std::size_t>(1, embedder.config().batch_size);
    for (std::size_t start = 0; start < pairs.size(); start += batch) {
        const auto end = std::min(pairs.size(), start + batch);
        std::vector<std::string> questions;
        for (std::size_t i = start; i < end; ++i) questions.push_back(pairs[i].question);
        std::vector<std::vector<double>> vectors;
        try {
            vectors = embedder.embed(questions);
        } catch (const gateway::TransportError&) {
            continue;
        }
        auto hits = kernels::rank_batch_omp(index.matrix(), index.doc_ids(), vectors, k);
        for (std::size_t i = start; i < end; ++i) out[i] = std::move(hits[i - start]);
    }
    return out;
}

std::size_t golden_index(const VectorIndex& index, const QAPair& pair) {
    auto at = index.find_by_text(pair.document);
    if (!at) throw std::invalid_argument("golden document not in index for: " + pair.question);
    return *at;
}

std::string strip_period(std::string s) {
    s = text::trim(s);
    while (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace

bool are_related(const Document& a, const Document& b, const KnowledgeBase& kb) {
    if (base_or_reference_match(a, b)) return true;
    if (a.subject_id.empty() || b.subject_id.empty()) return false;
    for (const auto& r : kb.relationships) {
        if ((r.source_id == a.subject_id && r.target_id == b.subject_id) ||
            (r.source_id == b.subject_id && r.target_id == a.subject_id)) {
            return true;
        }
    }
    return false;
}

Relatedness::Relatedness(const KnowledgeBase& kb) {
    for (const auto& r : kb.relationships) {
        if (r.source_id.empty() || r.target_id.empty()) continue;
        links_.insert(link_key(r.source_id, r.target_id));
        links_.insert(link_key(r.target_id, r.source_id));
    }
}

bool Relatedness::operator()(const Document& a, const Document& b) const {
    if (base_or_reference_match(a, b)) return true;
    if (a.subject_id.empty() || b.subject_id.empty()) return false;
    return links_.count(link_key(a.subject_id, b.subject_id)) > 0;
}

ordered_json EmbeddingTuneRow::to_json() const {
    ordered_json j;
    j["question"] = question;
    j["positive_docs"] = positive_docs;
    j["negative_docs"] = negative_docs;
    return j;
}

ordered_json EmbeddingDatasetReport::to_json() const {
    ordered_json j;
    j["rows"] = rows;
    j["short_pool_rows"] = short_pool_rows;
    j["empty_pool_rows"] = empty_pool_rows;
    return j;
}

EmbeddingDataset build_embedding_dataset(const std::vector<QAPair>& train,
                                         const std::vector<Document>& corpus,
                                         const KnowledgeBase& kb, std::size_t n_neg,
                                         std::uint64_t seed) {
    std::unordered_map<std::string, std::size_t> by_text;
    for (std::size_t i = 0; i < corpus.size(); ++i) by_text.emplace(corpus[i].text(), i);
    std::vector<std::size_t> positives(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        auto it = by_text.find(train[i].document);
        if (it == by_text.end()) {
            throw std::invalid_argument("document not in corpus for: " + train[i].question);
        }
        positives[i] = it->second;
    }

    const Relatedness related(kb);
    EmbeddingDataset out;
    out.rows.resize(train.size());
    std::vector<int> pool_state(train.size(), 0);  // 1 short, 2 empty
    const auto n = static_cast<std::ptrdiff_t>(train.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto& pos = corpus[positives[i]];
        std::vector<std::size_t> pool;
        for (std::size_t d = 0; d < corpus.size(); ++d) {
            if (d != positives[i] && !related(pos, corpus[d])) pool.push_back(d);
        }
        DetRng rng(derive_seed(seed, train[i].question));
        auto& row = out.rows[i];
        row.question = train[i].question;
        row.positive_docs = {pos.text()};
        row.positive_id = pos.doc_id;
        for (auto p : rng.sample_indices(pool.size(), n_neg)) {
            row.negative_docs.push_back(corpus[pool[p]].text());
            row.negative_ids.push_back(corpus[pool[p]].doc_id);
        }
        if (pool.empty() && n_neg > 0) {
            pool_state[i] = 2;
        } else if (pool.size() < n_neg) {
            pool_state[i] = 1;
        }
    }
    out.report.rows = out.rows.size();
    for (int s : pool_state) {
        if (s == 1) ++out.report.short_pool_rows;
        if (s == 2) ++out.report.empty_pool_rows;
    }
    return out;
}

ordered_json GenerationTuneRow::to_json() const {
    ordered_json j;
    j["prompt"] = prompt;
    j["completion"] = completion;
    return j;
}

std::string completion_thought(const QAPair& pair) {
    return strip_period(pair.thought) +
           ". The answer is contained in the provided document with URL '" + pair.url + "'.";
}

GenerationTuneRow make_generation_row(const QAPair& pair, const std::vector<Document>& docs) {
    GenerationTuneRow row;
    row.question = pair.question;
    row.prompt = build_answer_prompt(pair.question, docs);
    row.completion = render_completion(completion_thought(pair), pair.answer, {pair.url});
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].text() == pair.document) {
            row.contains_golden = true;
            row.golden_rank = i + 1;
            break;
        }
    }
    return row;
}

ordered_json GenerationDatasetReport::to_json() const {
    ordered_json j;
    j["rows"] = rows;
    j["golden_injected"] = golden_injected;
    j["retrieval_failures"] = retrieval_failures;
    j["refusal_rows"] = refusal_rows;
    j["refusal_target"] = refusal_target;
    j["refusal_eligible"] = refusal_eligible;
    j["warning"] = warning ? ordered_json(*warning) : ordered_json(nullptr);
    return j;
}

GenerationDataset build_generation_dataset(const std::vector<QAPair>& train,
                                           const VectorIndex& index, gateway::Client& embedder,
                                           std::size_t k, std::uint64_t seed) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    GenerationDataset out;
    const auto hits = retrieve_all(train, index, embedder, k);
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (!hits[i]) {
            ++out.report.retrieval_failures;
            continue;
        }
        const auto golden = golden_index(index, train[i]);
        std::vector<std::size_t> chosen;
        for (const auto& h : *hits[i]) chosen.push_back(h.row);
        if (std::find(chosen.begin(), chosen.end(), golden) == chosen.end()) {
            chosen.back() = golden;
            ++out.report.golden_injected;
        }
        DetRng rng(derive_seed(seed, train[i].question));
        rng.shuffle(chosen);
        std::vector<Document> docs;
        for (auto c : chosen) docs.push_back(index.doc(c));
        out.rows.push_back(make_generation_row(train[i], docs));
    }
    out.report.rows = out.rows.size();
    return out;
}

std::size_t refusal_target(std::size_t base_rows, double ratio) {
    if (ratio <= 0.0) return 0;
    if (ratio >= 1.0) throw std::invalid_argument("refusal ratio must be below 1");
    return static_cast<std::size_t>(std::llround(static_cast<double>(base_rows) * ratio / (1.0 - ratio)));
}

GenerationDataset build_refusal_examples(const std::vector<QAPair>& train,
                                         const VectorIndex& index, gateway::Client& embedder,
                                         std::size_t k, std::size_t base_rows, double ratio,
                                         std::uint64_t seed) {
    GenerationDataset out;
    auto& report = out.report;
    report.refusal_target = refusal_target(base_rows, ratio);
    if (report.refusal_target == 0) return out;

    const auto hits = retrieve_all(train, index, embedder, k);
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < train.size(); ++i) {
        if (!hits[i]) {
            ++report.retrieval_failures;
            continue;
        }
        const auto golden = golden_index(index, train[i]);
        const bool hit = std::any_of(hits[i]->begin(), hits[i]->end(),
                                     [&](const kernels::Hit& h) { return h.row == golden; });
        if (!hit) eligible.push_back(i);
    }
    report.refusal_eligible = eligible.size();
    DetRng rng(derive_seed(seed, "refusal"));
    rng.shuffle(eligible);
    if (eligible.size() < report.refusal_target) {
        report.warning = "only " + std::to_string(eligible.size()) +
                         " questions miss their golden document; wanted " +
                         std::to_string(report.refusal_target);
    }
    eligible.resize(std::min(eligible.size(), report.refusal_target));
    std::sort(eligible.begin(), eligible.end());

    for (auto i : eligible) {
        const auto& pair = train[i];
        std::vector<Document> docs;
        for (const auto& h : *hits[i]) docs.push_back(index.doc(h.row));
        GenerationTuneRow row;
        row.question = pair.question;
        row.prompt = build_answer_prompt(pair.question, docs);
        row.completion = render_completion(
            strip_period(pair.thought) + ". None of the provided documents contain the answer.",
            std::string(kRefusalSentinel), {});
        row.refusal = true;
        out.rows.push_back(std::move(row));
    }
    report.rows = out.rows.size();
    report.refusal_rows = out.rows.size();
    return out;
}

}  // namespace attackqa
