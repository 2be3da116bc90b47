#pragma once

#include <filesystem>
#include <string>

#include "aegis/async_sim.hpp"

namespace aegis {

/// "{problem}_{method}_q{q}_r{repeat}.jsonl"
std::string trace_file_name(const std::string& problem, const std::string& method, int q, int repeat);

/// JSONL text: a header object (type "header") followed by one object per
/// evaluation in completion order. Doubles round-trip exactly.
std::string serialise_trace(const RunResult& result);
RunResult parse_trace(const std::string& text);

/// Writes to a temporary sibling and renames it into place.
void write_trace(const std::filesystem::path& path, const RunResult& result);
RunResult read_trace(const std::filesystem::path& path);

/// True when the file parses, its header budget equals `budget` and it holds
/// exactly that many evaluation lines.
bool trace_is_complete(const std::filesystem::path& path, int budget);

/// Writes `text` atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace aegis
