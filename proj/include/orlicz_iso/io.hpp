#pragma once

// File formats.
//
//   OrliczSpec JSON   {"family": "power", "p": 2.0} | {"family": "log_shifted"} | {"family": "arctan"}
//                     | {"family": "exp_saturating"} | {"family": "exponential"}
//                     | {"family": "piecewise_phi", "knots": [[0, 0], [1, 0.5], ...]}
//   Problem JSON      {"a": ..., "b": ..., "breakpoints": [...]?, "values": [...]}
//   Problem CSV       header `x_left,x_right,f` (explicit contiguous cells) or `x,f`
//                     (samples on a uniform grid over [a, b] supplied by the caller)

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "orlicz_iso/certificate.hpp"
#include "orlicz_iso/grid.hpp"
#include "orlicz_iso/isotone.hpp"
#include "orlicz_iso/luxemburg_fit.hpp"
#include "orlicz_iso/orlicz.hpp"

namespace oiso::io {

using nlohmann::json;

/// Malformed input file or document.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Problem {
  CellGrid grid;
  StepFunction f;
};

// ---- OrliczSpec ----------------------------------------------------------

inline json spec_to_json(const OrliczSpec& spec) {
  return std::visit(
      [](const auto& fam) -> json {
        using F = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<F, family::Power>) {
          return {{"family", "power"}, {"p", fam.p}};
        } else if constexpr (std::is_same_v<F, family::LogShifted>) {
          return {{"family", "log_shifted"}};
        } else if constexpr (std::is_same_v<F, family::ArctanPrimitive>) {
          return {{"family", "arctan"}};
        } else if constexpr (std::is_same_v<F, family::ExpSaturating>) {
          return {{"family", "exp_saturating"}};
        } else if constexpr (std::is_same_v<F, family::Exponential>) {
          return {{"family", "exponential"}};
        } else {
          json knots = json::array();
          for (const auto& [t, v] : fam.knots) knots.push_back({t, v});
          return {{"family", "piecewise_phi"}, {"knots", knots}};
        }
      },
      spec.family());
}

/// Throws ParseError for unknown/malformed documents and DomainError for inadmissible parameters.
inline OrliczSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
    throw ParseError("spec: expected an object with a string \"family\"");
  }
  const auto fam = j["family"].get<std::string>();
  if (fam == "power") {
    if (!j.contains("p") || !j["p"].is_number()) throw ParseError("spec: power family needs numeric \"p\"");
    return OrliczSpec::power(j["p"].get<double>());
  }
  if (fam == "log_shifted") return OrliczSpec::log_shifted();
  if (fam == "arctan") return OrliczSpec::arctan();
  if (fam == "exp_saturating") return OrliczSpec::exp_saturating();
  if (fam == "exponential") return OrliczSpec::exponential();
  if (fam == "piecewise_phi") {
    if (!j.contains("knots") || !j["knots"].is_array()) {
      throw ParseError("spec: piecewise_phi needs a \"knots\" array");
    }
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j["knots"]) {
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
        throw ParseError("spec: each knot must be a [t, phi] pair of numbers");
      }
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return OrliczSpec::piecewise_phi(std::move(knots));
  }
  throw ParseError("spec: unknown family \"" + fam + "\"");
}

// ---- problems ------------------------------------------------------------

inline Problem problem_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("values")) throw ParseError("problem: missing \"values\"");
    auto values = j.at("values").get<std::vector<double>>();
    if (values.empty()) throw ParseError("problem: \"values\" is empty");
    if (j.contains("breakpoints") && !j["breakpoints"].is_null()) {
      auto bp = j["breakpoints"].get<std::vector<double>>();
      if (bp.size() != values.size() + 1) {
        throw ParseError("problem: need exactly one more breakpoint than values");
      }
      if (j.contains("a") && j["a"].get<double>() != bp.front()) {
        throw ParseError("problem: \"a\" disagrees with the first breakpoint");
      }
      if (j.contains("b") && j["b"].get<double>() != bp.back()) {
        throw ParseError("problem: \"b\" disagrees with the last breakpoint");
      }
      return {CellGrid(std::move(bp)), StepFunction{std::move(values)}};
    }
    const double a = j.at("a").get<double>();
    const double b = j.at("b").get<double>();
    return {make_uniform(a, b, values.size()), StepFunction{std::move(values)}};
  } catch (const json::exception& e) {
    throw ParseError(std::string("problem: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("problem: ") + e.what());
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& s, std::size_t line_no) {
  if (s.empty()) throw ParseError("csv line " + std::to_string(line_no) + ": empty field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ParseError("csv line " + std::to_string(line_no) + ": bad number \"" + s + "\"");
  }
  return v;
}

}  // namespace detail

/// Parses CSV text. For the `x,f` layout, [a, b] must be supplied.
inline Problem problem_from_csv(std::istream& in, std::optional<double> a = std::nullopt,
                                std::optional<double> b = std::nullopt) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = detail::split_csv_line(line);
    break;
  }
  if (header.empty()) throw ParseError("csv: missing header");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError("csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(detail::parse_number(c, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("csv: no data rows");

  if (header == std::vector<std::string>{"x_left", "x_right", "f"}) {
    std::vector<double> bp{rows.front()[0]};
    StepFunction f;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i][0] != rows[i - 1][1]) {
        throw ParseError("csv row " + std::to_string(i + 1) + ": cells are not contiguous");
      }
      if (!(rows[i][1] > rows[i][0])) {
        throw ParseError("csv row " + std::to_string(i + 1) + ": breakpoints not increasing");
      }
      bp.push_back(rows[i][1]);
      f.values.push_back(rows[i][2]);
    }
    return {CellGrid(std::move(bp)), std::move(f)};
  }
  if (header == std::vector<std::string>{"x", "f"}) {
    if (!a || !b) throw ParseError("csv: the x,f layout needs --a and --b");
    if (!(*a < *b)) throw ParseError("csv: need a < b");
    StepFunction f;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double x = rows[i][0];
      if (x < *a || x > *b) throw ParseError("csv row " + std::to_string(i + 1) + ": x outside [a, b]");
      if (i > 0 && !(x > rows[i - 1][0])) {
        throw ParseError("csv row " + std::to_string(i + 1) + ": x not increasing");
      }
      f.values.push_back(rows[i][1]);
    }
    return {make_uniform(*a, *b, f.size()), std::move(f)};
  }
  throw ParseError("csv: header must be `x_left,x_right,f` or `x,f`");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Dispatches on extension: `.json` is a problem document, anything else is CSV.
inline Problem load_problem(const std::string& path, std::optional<double> a = std::nullopt,
                            std::optional<double> b = std::nullopt) {
  const auto text = read_file(path);
  if (has_suffix(path, ".json")) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    return problem_from_json(j);
  }
  std::istringstream in(text);
  return problem_from_csv(in, a, b);
}

// ---- results -------------------------------------------------------------

inline json certificate_to_json(const CertificateReport& r) {
  json j;
  j["tol"] = r.tol;
  j["jump_tol"] = r.jump_tol;
  j["item1_balance"] = {{"value", r.item1_balance}, {"pass", r.item1_pass}};
  j["item2_min_r"] = {{"value", r.item2_min_r}, {"pass", r.item2_pass}};
  j["item3_total"] = {{"value", r.item3_total}, {"pass", r.item3_pass}};
  j["item4_max_tail"] = {{"value", r.item4_max_tail}, {"pass", r.item4_pass}};
  json jumps = json::array();
  for (const auto& e : r.item5_jump_residuals) {
    jumps.push_back({{"breakpoint", e.breakpoint}, {"jump", e.jump}, {"abs_r", e.abs_r}});
  }
  j["item5_jump_residuals"] = {{"entries", jumps}, {"pass", r.item5_pass}};
  json wit = json::array();
  for (const auto& e : r.item6_witnesses) {
    wit.push_back({{"breakpoint", e.breakpoint}, {"r", e.r}, {"locally_constant", e.locally_constant}});
  }
  j["item6_witnesses"] = {{"entries", wit}, {"pass", r.item6_pass}};
  if (r.characterization) {
    j["characterization"] = {{"min_value", r.characterization->min_value},
                             {"argmin_probe", r.characterization->argmin_probe},
                             {"probes", r.characterization->probes_evaluated},
                             {"pass", r.characterization->passed}};
  } else {
    j["characterization"] = nullptr;
  }
  j["passed"] = r.passed;
  return j;
}

inline json fit_to_json(const MonotoneFit& fit) {
  json blocks = json::array();
  for (const auto& b : fit.blocks) {
    blocks.push_back({{"start_cell", b.start_cell},
                      {"end_cell", b.end_cell},
                      {"level", b.level},
                      {"level_interval", {b.c_lo, b.c_hi}}});
  }
  json j;
  j["g_star"] = std::vector<double>(fit.g_star.values().begin(), fit.g_star.values().end());
  j["blocks"] = blocks;
  j["modular_value"] = fit.modular_value;
  j["merges"] = fit.merges;
  j["block_solves"] = fit.block_solves;
  return j;
}

inline json luxemburg_to_json(const LuxemburgResult& r) {
  json j;
  j["delta"] = r.delta;
  j["h_star"] = std::vector<double>(r.h_star.values().begin(), r.h_star.values().end());
  j["outer_iterations"] = r.outer_iterations;
  j["relation_hypothesis_met"] = r.relation_hypothesis_met;
  return j;
}

}  // namespace oiso::io
