#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "attackqa/ingest/types.hpp"

namespace attackqa {

struct TabularError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view content);

/// Loads <dir>/{techniques,tactics,software,groups,campaigns,mitigations}.{jsonl,csv}
/// plus relationships.{jsonl,csv}. Column names follow the ATT&CK spreadsheet
/// exports: ID, name, description, url (other columns become extras) and
/// "source ID" ... "mapping description". An optional manifest.json supplies
/// the version.
KnowledgeBase load_tabular(const std::filesystem::path& dir);

/// Writes the canonical JSONL export (one file per table plus manifest.json)
/// in the same layout load_tabular reads.
void export_tabular(const KnowledgeBase& kb, const std::filesystem::path& dir);

}  // namespace attackqa
