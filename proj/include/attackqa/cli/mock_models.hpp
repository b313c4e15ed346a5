#pragma once

#include <optional>
#include <string>

namespace attackqa {

/// Deterministic stand-in for every model role, recognised from the prompt:
///   docgen       one {question, thought, answer, references} per requested set,
///                each built from one sentence of the document
///   templated    the first sentence of the document as the answer
///   RAG answer   the text of Document 1 as the answer, its URL as the reference
///   QC grader    grade 10
///   judge        10 when the generated answer contains the true answer, else 0
/// Unrecognised prompts yield nullopt, which the mock backend reports as a failure.
std::optional<std::string> mock_model_response(const std::string& prompt);

}  // namespace attackqa
