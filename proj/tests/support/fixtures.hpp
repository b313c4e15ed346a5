#pragma once

#include <filesystem>
#include <string>

#include "attackqa/corpus/builder.hpp"
#include "attackqa/ingest/types.hpp"

namespace attackqa::testing {

std::filesystem::path data_dir();
std::filesystem::path fixture_path(const std::string& relative);
std::string read_fixture(const std::string& relative);

/// The tabular fixture knowledge base under tests/fixtures/kb.
const KnowledgeBase& fixture_kb();
const Corpus& fixture_corpus();
const Document& doc_with_header(const std::string& header);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace attackqa::testing
