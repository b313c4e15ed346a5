#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "attackqa/corpus/document.hpp"
#include "attackqa/qa/pair.hpp"

namespace attackqa {

/// Question, thought and answer for a relation-summary document. The answer is
/// the full document text. Throws std::invalid_argument for other sources.
QAPair gen_summary_qa(const Document& summary_doc);

/// "Describe X" for description documents, "How does X use Y?", "How can X
/// detect Y?", "How can X mitigate Y?" or "How is X attributed to Y?" for
/// relation documents. nullopt when the document fits no template.
std::optional<std::string> gen_templated_question(const Document& doc);

}  // namespace attackqa
