#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>

namespace nestasp::cli {

enum class Format { standard, facts, json_lines };

struct RunConfig {
  std::filesystem::path program_path;
  std::size_t max_depth = 16;
  /// 0 prints every answer set.
  std::size_t max_answer_sets = 0;
  std::optional<std::set<std::string>> filter_predicates;
  bool trace_calls = false;
  Format format = Format::standard;
  bool parallel = false;
};

/// Evaluates the host program and prints its answer sets to `out`, diagnostics to `err`.
/// Returns 0 with at least one answer set, 1 with none, 2 on error.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry point: `nestasp [options] FILE`.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nestasp::cli
