#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cartanlab::cli {

const char* verdict(const CheckLine& line) {
  if (!std::isfinite(line.residual)) return "FAIL";
  if (line.residual < line.tolerance) return "PASS";
  if (line.residual < 10.0 * line.tolerance) return "WARN";
  return "FAIL";
}

void Report::add(std::string name, std::string ref, double residual,
                 double tolerance) {
  checks.push_back({std::move(name), std::move(ref), residual,
                    tolerance * tol_scale});
}

bool Report::failed() const {
  for (const auto& line : checks)
    if (std::string_view(verdict(line)) == "FAIL") return true;
  return false;
}

namespace {

std::string overall(const Report& report) {
  std::string_view worst = "PASS";
  for (const auto& line : report.checks) {
    std::string_view v = verdict(line);
    if (v == "FAIL") return "FAIL";
    if (v == "WARN") worst = "WARN";
  }
  return std::string(worst);
}

std::string hex_seed(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%llx",
                static_cast<unsigned long long>(seed));
  return buf;
}

void print_data(std::ostringstream& out, const Json& data,
                const std::string& indent) {
  for (const auto& [key, value] : data.items()) {
    if (value.is_object()) {
      out << indent << key << ":\n";
      print_data(out, value, indent + "  ");
    } else {
      out << indent << key << " = " << value.dump() << "\n";
    }
  }
}

} // namespace

std::string Report::to_text() const {
  std::ostringstream out;
  out << "cartanlab " << suite << " " << subject << "\n";
  out << "seed " << hex_seed(seed) << "  samples " << samples;
  if (tol_scale != 1.0) out << "  tol-scale " << tol_scale;
  out << "\n";

  std::size_t width = 0;
  for (const auto& line : checks) width = std::max(width, line.name.size());
  for (const auto& line : checks) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-4s  %-*s  %11.4e  (tol %.1e)",
                  verdict(line), static_cast<int>(width), line.name.c_str(),
                  line.residual, line.tolerance);
    out << buf;
    if (!line.ref.empty()) out << "  " << line.ref;
    out << "\n";
  }
  if (!data.empty()) print_data(out, data, "  ");
  out << "verdict: " << overall(*this) << "\n";
  return out.str();
}

std::string Report::to_json() const {
  Json root;
  root["tool"] = "cartanlab";
  root["suite"] = suite;
  root["subject"] = subject;
  root["seed"] = hex_seed(seed);
  root["samples"] = samples;
  root["tol_scale"] = tol_scale;
  Json lines = Json::array();
  for (const auto& line : checks) {
    Json entry;
    entry["name"] = line.name;
    entry["ref"] = line.ref;
    entry["residual"] = line.residual;
    entry["tolerance"] = line.tolerance;
    entry["verdict"] = verdict(line);
    lines.push_back(std::move(entry));
  }
  root["checks"] = std::move(lines);
  root["data"] = data.empty() ? Json(Json::value_t::object) : data;
  root["verdict"] = overall(*this);
  return root.dump(2) + "\n";
}

} // namespace cartanlab::cli
