#include "varlab/app/record.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

#include "varlab/errors.hpp"

namespace varlab::app {

const char* to_string(Status status) {
  switch (status) {
    case Status::ok: return "ok";
    case Status::refused: return "refused";
    case Status::inconclusive: return "inconclusive";
    case Status::violation: return "violation";
  }
  return "ok";
}

int exit_code(Status status) {
  switch (status) {
    case Status::ok: return kExitOk;
    case Status::refused: return kExitRefused;
    case Status::inconclusive: return kExitInconclusive;
    case Status::violation: return kExitViolation;
  }
  return kExitInternal;
}

Status worst(Status a, Status b) {
  auto rank = [](Status s) {
    switch (s) {
      case Status::ok: return 0;
      case Status::refused: return 1;
      case Status::inconclusive: return 2;
      case Status::violation: return 3;
    }
    return 0;
  };
  return rank(a) >= rank(b) ? a : b;
}

nlohmann::json ResultRecord::to_json() const {
  return nlohmann::json{{"schema", kRecordSchema},   {"config_hash", config_hash},
                        {"experiment", experiment},  {"timestamp", timestamp},
                        {"status", to_string(status)}, {"payload", payload}};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string schema_problem(const nlohmann::json& r) {
  if (!r.is_object()) return "record is not an object";
  for (const char* key : {"schema", "config_hash", "experiment", "timestamp", "status"}) {
    if (!r.contains(key) || !r[key].is_string()) return std::string("missing string field '") + key + "'";
  }
  if (r["schema"] != kRecordSchema) return "unknown schema " + r["schema"].get<std::string>();
  const std::string hash = r["config_hash"];
  if (hash.size() != 16 || hash.find_first_not_of("0123456789abcdef") != std::string::npos) {
    return "config_hash must be 16 lowercase hex digits";
  }
  static const char* experiments[] = {"constants", "three-solutions", "pde-demo", "minimax-audit", "decomposable",
                                      "sweep"};
  if (std::none_of(std::begin(experiments), std::end(experiments), [&](const char* e) { return r["experiment"] == e; })) {
    return "unknown experiment";
  }
  static const char* statuses[] = {"ok", "refused", "inconclusive", "violation"};
  if (std::none_of(std::begin(statuses), std::end(statuses), [&](const char* s) { return r["status"] == s; })) {
    return "unknown status";
  }
  const std::string ts = r["timestamp"];
  if (ts.size() != 20 || ts[4] != '-' || ts[10] != 'T' || ts.back() != 'Z') return "timestamp is not ISO 8601 UTC";
  if (!r.contains("payload") || !r["payload"].is_object()) return "payload must be an object";
  if (r["status"] == "refused") {
    const auto& p = r["payload"];
    if (!p.contains("refusal") || !p["refusal"].is_object() || !p["refusal"].contains("code")) {
      return "refused records carry payload.refusal.code";
    }
  }
  return {};
}

void append_jsonl(const std::filesystem::path& path, const ResultRecord& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) fail(ErrorCode::parse, "cannot open result store " + path.string());
  out << record.to_json().dump() << '\n';
}

}  // namespace varlab::app
