#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "varlab/app/config.hpp"
#include "varlab/app/record.hpp"

namespace varlab::app {

struct RunOptions {
  bool trace = false;
  // JSON-lines store; records are appended. Companion CSV files share its stem.
  std::optional<std::filesystem::path> out;
};

struct RunResult {
  std::vector<ResultRecord> records;
  Status status = Status::ok;  // most severe record status
  std::vector<std::filesystem::path> files;  // CSV side outputs written
};

const std::vector<std::string>& experiment_names();

// Dispatches on config "experiment". Configuration problems throw Error(parse).
RunResult run(const Config& config, const RunOptions& options);

}  // namespace varlab::app
