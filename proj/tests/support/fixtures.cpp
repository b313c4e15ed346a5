#include "fixtures.hpp"

#include <atomic>
#include <stdexcept>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/ingest/tabular.hpp"

#include <unistd.h>

namespace attackqa::testing {

std::filesystem::path data_dir() { return ATTACKQA_TEST_DATA; }

std::filesystem::path fixture_path(const std::string& relative) { return data_dir() / relative; }

std::string read_fixture(const std::string& relative) { return read_file(fixture_path(relative)); }

const KnowledgeBase& fixture_kb() {
    static const KnowledgeBase kb = load_tabular(fixture_path("fixtures/kb"));
    return kb;
}

const Corpus& fixture_corpus() {
    static const Corpus corpus = build_corpus(fixture_kb());
    return corpus;
}

const Document& doc_with_header(const std::string& header) {
    for (const auto& d : fixture_corpus().docs) {
        if (d.header == header) return d;
    }
    throw std::runtime_error("no fixture document with header: " + header);
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("attackqa-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

}  // namespace attackqa::testing
