#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace varlab::app {

enum class Status { ok, refused, inconclusive, violation };

const char* to_string(Status status);
int exit_code(Status status);
// Most severe first: violation, inconclusive, refused, ok.
Status worst(Status a, Status b);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitRefused = 2;
inline constexpr int kExitInconclusive = 3;
inline constexpr int kExitViolation = 4;
inline constexpr int kExitUsage = 64;

inline constexpr const char* kRecordSchema = "varlab.result/1";

struct ResultRecord {
  std::string config_hash;
  std::string experiment;
  std::string timestamp;  // UTC, ISO 8601
  Status status = Status::ok;
  nlohmann::json payload = nlohmann::json::object();

  nlohmann::json to_json() const;
};

std::string utc_timestamp();

// Empty string when the record matches the documented schema, else the first problem.
std::string schema_problem(const nlohmann::json& record);

void append_jsonl(const std::filesystem::path& path, const ResultRecord& record);

}  // namespace varlab::app
