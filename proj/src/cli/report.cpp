#include <cmath>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "geoqm/cli.hpp"

namespace geoqm::cli {

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void record(Report& r, const std::string& metric, double value, json threshold, bool ok) {
  r.metrics[metric] = number(value);
  r.thresholds[metric] = std::move(threshold);
  r.passes[metric] = ok;
}

}  // namespace

void Report::check_max(const std::string& metric, double value, double max) {
  record(*this, metric, value, {{"max", max}}, value <= max);
}

void Report::check_min(const std::string& metric, double value, double min) {
  record(*this, metric, value, {{"min", min}}, value >= min);
}

void Report::check_abs(const std::string& metric, double value, double target, double tol) {
  record(*this, metric, value, {{"target", target}, {"tolerance", tol}}, std::abs(value - target) <= tol);
}

bool Report::passed() const {
  for (const auto& [k, v] : passes.items()) {
    if (!v.get<bool>()) return false;
  }
  return true;
}

json Report::to_json() const {
  json j = extra;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["config"] = config;
  j["metrics"] = metrics;
  j["thresholds"] = thresholds;
  j["passes"] = passes;
  j["pass"] = passed();
  json files = json::array();
  for (const auto& f : csv) files.push_back(f.name);
  j["csv_files"] = files;
  return j;
}

void write_report(const Report& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::io, "cannot create output directory " + out_dir.string() + ": " + ec.message());
  auto write = [&](const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(Errc::io, "cannot write " + p.string());
    os << content;
    os.flush();
    if (!os) throw Error(Errc::io, "write failed for " + p.string());
  };
  write(out_dir / (report.experiment + ".json"), report.to_json().dump(2) + "\n");
  for (const auto& f : report.csv) write(out_dir / f.name, f.content);
}

std::string summary_line(const Report& report) {
  std::ostringstream os;
  os << report.experiment << ": " << (report.passed() ? "PASS" : "FAIL");
  for (const auto& [k, v] : report.metrics.items()) {
    if (!report.passes.contains(k)) continue;
    os << ' ' << k << '=';
    if (v.is_number()) {
      os << csv::format(v.get<double>());
    } else {
      os << v.dump();
    }
    if (!report.passes[k].get<bool>()) os << "(!)";
  }
  return os.str();
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::config:
    case Errc::io:
    case Errc::invalid_argument:
    case Errc::out_of_range:
    case Errc::step_size:
    case Errc::zero_field:
      return 2;
    default:
      return 1;
  }
}

}  // namespace geoqm::cli
