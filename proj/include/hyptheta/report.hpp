#pragma once

// Structured check records and the versioned JSON report envelope the
// command line tool emits.  One report per run: a config echo, a flat
// array of checks, and an overall pass flag that drives the exit code.

#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyptheta {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "hyptheta-report/1";

struct CheckRecord {
  std::string name;
  Json params = Json::object();
  Json expected;
  Json observed;
  std::optional<double> tolerance;  // absent for exact checks
  bool pass = false;
};

struct RunReport {
  std::string command;
  Json config = Json::object();
  std::vector<CheckRecord> checks;
  std::optional<double> wall_ms;  // emitted only when timing is requested

  bool pass() const {
    for (const CheckRecord& c : checks)
      if (!c.pass) return false;
    return true;
  }

  // Exact comparison: no tolerance field, pass iff expected == observed.
  CheckRecord& add_exact(const std::string& name, Json params, Json expected, Json observed) {
    CheckRecord rec;
    rec.name = name;
    rec.params = std::move(params);
    rec.pass = expected == observed;
    rec.expected = std::move(expected);
    rec.observed = std::move(observed);
    checks.push_back(std::move(rec));
    return checks.back();
  }

  // Numeric comparison: pass iff |observed| <= tolerance, with the
  // bound echoed in the record.  expected describes the target.
  CheckRecord& add_residual(const std::string& name, Json params, double observed,
                            double tolerance) {
    CheckRecord rec;
    rec.name = name;
    rec.params = std::move(params);
    rec.expected = Json{{"residual_below", tolerance}};
    rec.observed = observed;
    rec.tolerance = tolerance;
    rec.pass = observed <= tolerance;
    checks.push_back(std::move(rec));
    return checks.back();
  }

  // Boolean condition stated by name.
  CheckRecord& add_flag(const std::string& name, Json params, bool ok) {
    CheckRecord rec;
    rec.name = name;
    rec.params = std::move(params);
    rec.expected = true;
    rec.observed = ok;
    rec.pass = ok;
    checks.push_back(std::move(rec));
    return checks.back();
  }

  Json to_json() const {
    Json doc;
    doc["schema_version"] = kReportSchema;
    doc["command"] = command;
    doc["config"] = config;
    Json arr = Json::array();
    for (const CheckRecord& c : checks) {
      Json jc;
      jc["name"] = c.name;
      jc["params"] = c.params;
      jc["expected"] = c.expected;
      jc["observed"] = c.observed;
      if (c.tolerance) jc["tolerance"] = *c.tolerance;
      jc["pass"] = c.pass;
      arr.push_back(std::move(jc));
    }
    doc["checks"] = std::move(arr);
    doc["pass"] = pass();
    if (wall_ms) doc["wall_ms"] = *wall_ms;
    return doc;
  }

  void write(const std::string& out_path) const {
    std::string text = to_json().dump(2);
    text.push_back('\n');
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write report to " + out_path);
      out << text;
    }
  }
};

}  // namespace hyptheta
