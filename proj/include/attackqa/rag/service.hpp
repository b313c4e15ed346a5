#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/gateway/client.hpp"
#include "attackqa/retrieval/index.hpp"

namespace attackqa {

inline constexpr std::size_t kDefaultK = 5;

struct AnswerRecord {
    std::string question;
    RetrievalResult retrieved;
    std::string thought;
    std::string answer;
    std::vector<std::string> references;
    bool parse_ok = false;
    std::optional<std::size_t> golden_rank;
    bool refusal = false;
    std::optional<std::string> warning;
    std::optional<std::string> error;
    bool transport_failure = false;  // retrieval or generation never produced output
    std::string completion;  // raw generator output, empty on transport failure

    /// `index` supplies header and url for each retrieved doc.
    ordered_json to_json(const VectorIndex& index) const;
};

/// Embed, retrieve k, prompt, complete, parse. Transport and parse failures
/// are returned in the record, never thrown. `golden_doc_id` fills golden_rank.
AnswerRecord answer_question(const std::string& question, std::size_t k,
                             const VectorIndex& index, gateway::Client& embedder,
                             gateway::Client& generator,
                             const std::optional<std::string>& golden_doc_id = std::nullopt);

/// Generation and parsing over an existing retrieval; `retrieved` is used as given.
AnswerRecord answer_from_retrieval(const std::string& question, RetrievalResult retrieved,
                                   const VectorIndex& index, gateway::Client& generator,
                                   const std::optional<std::string>& golden_doc_id = std::nullopt);

/// Append-only JSONL of answered requests; writes are serialized.
class InteractionLog {
public:
    explicit InteractionLog(const std::filesystem::path& path);
    void append(const ordered_json& row);

private:
    std::mutex mutex_;
    std::ofstream out_;
};

}  // namespace attackqa
