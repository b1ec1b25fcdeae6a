#pragma once

// Verification records and the JSON report format.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qdyb {

inline constexpr const char* kReportSchema = "qdyb-report/1";
inline constexpr std::size_t kWitnessLimit = 400;  // long exact witnesses are cut

struct Record {
  std::string id;
  std::string anchor;  // short name of the identity being checked
  std::string status;  // pass | fail | skip
  std::string witness;
  std::string backend;
  double millis = 0;
};

class Report {
 public:
  explicit Report(std::string suite = "") : suite_(std::move(suite)) {}

  void add(Record r) { records_.push_back(std::move(r)); }
  void merge(const Report& o) {
    for (const auto& r : o.records_) records_.push_back(r);
  }

  // Runs body; nullopt means pass, a string is the failure witness.
  void check(const std::string& id, const std::string& anchor, const std::string& backend,
             const std::function<std::optional<std::string>()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Record r{id, anchor, "pass", "", backend, 0};
    try {
      if (auto w = body()) {
        r.status = "fail";
        r.witness = w->size() > kWitnessLimit ? w->substr(0, kWitnessLimit) + "..." : *w;
      }
    } catch (const std::exception& e) {
      r.status = "fail";
      r.witness = std::string("exception: ") + e.what();
    }
    r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    records_.push_back(std::move(r));
  }
  void skip(const std::string& id, const std::string& anchor, const std::string& backend, const std::string& why) {
    records_.push_back({id, anchor, "skip", why, backend, 0});
  }

  bool passed() const {
    return std::all_of(records_.begin(), records_.end(), [](const Record& r) { return r.status != "fail"; });
  }
  std::size_t failures() const {
    return std::count_if(records_.begin(), records_.end(), [](const Record& r) { return r.status == "fail"; });
  }
  const std::vector<Record>& records() const { return records_; }
  const std::string& suite() const { return suite_; }

  // Records sorted by id; timing can be left out for byte-stable output.
  nlohmann::json to_json(bool timing = true, std::optional<std::uint64_t> seed = std::nullopt) const {
    auto sorted = records_;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Record& a, const Record& b) { return a.id < b.id; });
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["suite"] = suite_;
    if (seed) j["seed"] = *seed;
    j["status"] = passed() ? "pass" : "fail";
    j["records"] = nlohmann::json::array();
    for (const auto& r : sorted) {
      nlohmann::json e{{"id", r.id}, {"anchor", r.anchor}, {"status", r.status}, {"backend", r.backend}};
      if (!r.witness.empty()) e["witness"] = r.witness;
      if (timing) e["timing_ms"] = r.millis;
      j["records"].push_back(e);
    }
    return j;
  }

  std::string to_text() const {
    auto sorted = records_;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Record& a, const Record& b) { return a.id < b.id; });
    std::string s;
    for (const auto& r : sorted) {
      s += r.status + "  " + r.id;
      if (!r.witness.empty()) s += "  (" + r.witness + ")";
      s += "\n";
    }
    s += std::string(passed() ? "PASS" : "FAIL") + " " + suite_ + ": " + std::to_string(records_.size()) +
         " records, " + std::to_string(failures()) + " failed\n";
    return s;
  }

 private:
  std::string suite_;
  std::vector<Record> records_;
};

// Turns an optional witness of any printable kind into the report form.
template <class W>
std::optional<std::string> witness_str(const std::optional<W>& w) {
  if (!w) return std::nullopt;
  return w->str();
}

}  // namespace qdyb
