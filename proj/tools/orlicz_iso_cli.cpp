// orlicz_iso_cli: fit, certify and study best non-decreasing approximations.
//
// Exit status: 0 computed and certified, 1 computed but not certified,
//              2 input error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <variant>

#include "orlicz_iso/io.hpp"
#include "orlicz_iso/orlicz_iso.hpp"

namespace {

using namespace oiso;
using io::json;

constexpr int kCertified = 0;
constexpr int kUncertified = 1;
constexpr int kInputError = 2;
constexpr int kNumericalFailure = 3;

struct L1Marker {};  // Phi(t) = |t|, only reachable through --allow-l1-oracle

struct RunConfig {
  std::string spec_text;
  std::string family = "power";
  double p = 2.0;
  std::string input;
  std::string fixture;
  std::size_t n = 64;
  std::optional<double> a, b;
  std::string output;
  std::string csv;
  std::string candidate;
  double tol = 1e-8;        // certificate tolerance, relative to the certificate scale
  double norm_tol = 1e-12;  // bisection tolerance for Luxemburg computations
  double lr_tol = 1e-6;     // Landers-Rogge sup-difference tolerance
  TieBreak tie_break = TieBreak::Midpoint;
  std::uint64_t seed = 0;
  std::size_t probes = 100;
  std::size_t refine_levels = 6;
  bool allow_l1 = false;
};

// ---- helpers ---------------------------------------------------------------

/// Writes through a sibling temporary so readers never observe a partial file.
void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io::ParseError("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out.flush()) throw io::ParseError("failed writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw io::ParseError("cannot move result into '" + path + "': " + ec.message());
  }
}

void emit_json(const RunConfig& cfg, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (cfg.output.empty()) {
    std::cout << text;
  } else {
    write_atomically(cfg.output, text);
  }
}

json spec_document(const RunConfig& cfg) {
  if (!cfg.spec_text.empty()) {
    const std::string text = io::has_suffix(cfg.spec_text, ".json") ? io::read_file(cfg.spec_text) : cfg.spec_text;
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw io::ParseError(std::string("--orlicz: ") + e.what());
    }
  }
  json j{{"family", cfg.family}};
  if (cfg.family == "power") j["p"] = cfg.p;
  return j;
}

bool is_l1(const json& doc) {
  return doc.is_object() && doc.value("family", "") == "power" && doc.contains("p") && doc["p"].is_number() &&
         doc["p"].get<double>() == 1.0;
}

std::variant<OrliczSpec, L1Marker> resolve_spec(const RunConfig& cfg) {
  const auto doc = spec_document(cfg);
  if (cfg.allow_l1 && is_l1(doc)) return L1Marker{};
  return io::spec_from_json(doc);  // Power(1) throws its diagnostic here
}

OrliczSpec require_admissible(const RunConfig& cfg, const char* command) {
  auto spec = resolve_spec(cfg);
  if (std::holds_alternative<L1Marker>(spec)) {
    throw DomainError(std::string(command) + ": the L1 oracle is only available to 'fit' and 'demo'");
  }
  return std::get<OrliczSpec>(spec);
}

io::Problem load_input(const RunConfig& cfg) {
  if (!cfg.input.empty() && !cfg.fixture.empty()) throw io::ParseError("give either --input or --fixture, not both");
  if (!cfg.fixture.empty()) {
    auto fx = fixtures::by_name(cfg.fixture, cfg.n);
    return {std::move(fx.grid), std::move(fx.f)};
  }
  if (cfg.input.empty()) throw io::ParseError("an input is required (--input FILE or --fixture NAME)");
  return io::load_problem(cfg.input, cfg.a, cfg.b);
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions o;
  o.tie_break = cfg.tie_break;
  return o;
}

CertifyOptions certify_options(const RunConfig& cfg) {
  CertifyOptions o;
  o.rel_tol = cfg.tol;
  o.n_probes = cfg.probes;
  o.seed = cfg.seed;
  return o;
}

std::string plot_csv(const CellGrid& grid, const StepFunction& f, std::span<const double> g) {
  std::ostringstream out;
  out.precision(17);
  out << "x,f,g_star\n";
  for (std::size_t i = 0; i < f.size(); ++i) out << grid.midpoint(i) << ',' << f.values[i] << ',' << g[i] << '\n';
  return out.str();
}

json run_header(const char* command, const json& spec, const RunConfig& cfg) {
  return {{"command", command}, {"orlicz", spec}, {"tie_break", to_string(cfg.tie_break)}, {"seed", cfg.seed}};
}

// ---- commands --------------------------------------------------------------

int cmd_fit(const RunConfig& cfg) {
  const auto problem = load_input(cfg);
  const auto spec = resolve_spec(cfg);

  if (std::holds_alternative<L1Marker>(spec)) {
    // Comparison only: L1 is outside the admissible class, so nothing is certified.
    const auto levels = reference::make_level_grid(problem.f.values, 2001);
    const auto dp = reference::brute_force_fit(reference::l1_big_phi, problem.grid, problem.f, levels);
    std::cerr << "warning: L1 is outside the admissible class; result is a level-grid DP oracle, uncertified\n";
    json j = run_header("fit", {{"family", "power"}, {"p", 1.0}}, cfg);
    j["oracle"] = "level-grid-dp";
    j["validated"] = false;
    j["g_star"] = std::vector<double>(dp.g.values().begin(), dp.g.values().end());
    j["modular_value"] = dp.value;
    j["certificate"] = nullptr;
    emit_json(cfg, j);
    if (!cfg.csv.empty()) write_atomically(cfg.csv, plot_csv(problem.grid, problem.f, dp.g.values()));
    return kUncertified;
  }

  const auto& s = std::get<OrliczSpec>(spec);
  const auto fit = fit_isotone(s, problem.grid, problem.f, solver_options(cfg));
  const auto rep = certify(s, problem.grid, problem.f, fit.g_star, certify_options(cfg));

  json j = run_header("fit", io::spec_to_json(s), cfg);
  j.update(io::fit_to_json(fit));
  j["certificate"] = io::certificate_to_json(rep);
  emit_json(cfg, j);
  if (!cfg.csv.empty()) write_atomically(cfg.csv, plot_csv(problem.grid, problem.f, fit.g_star.values()));
  if (!rep.passed) std::cerr << "certificate failed; see the report\n";
  return rep.passed ? kCertified : kUncertified;
}

int cmd_certify(const RunConfig& cfg) {
  const auto spec = require_admissible(cfg, "certify");
  const auto problem = load_input(cfg);
  if (cfg.candidate.empty()) throw io::ParseError("certify requires --candidate FILE");
  const auto cand = io::load_problem(cfg.candidate, cfg.a, cfg.b);
  if (!(cand.grid == problem.grid)) throw StructuralError("candidate grid differs from the input grid");

  json j = run_header("certify", io::spec_to_json(spec), cfg);
  j["candidate"] = cand.f.values;
  std::optional<MonotoneStepFunction> g;
  try {
    g.emplace(cand.f.values);
  } catch (const StructuralError& e) {
    j["feasible"] = false;
    j["reason"] = e.what();
    j["certificate"] = nullptr;
    j["passed"] = false;
    emit_json(cfg, j);
    std::cerr << "candidate is not non-decreasing: " << e.what() << "\n";
    return kUncertified;
  }
  const auto rep = certify(spec, problem.grid, problem.f, *g, certify_options(cfg));
  j["feasible"] = true;
  j["modular_value"] = modular(spec, problem.grid, subtract(problem.f, g->values()));
  j["certificate"] = io::certificate_to_json(rep);
  j["passed"] = rep.passed;
  emit_json(cfg, j);
  return rep.passed ? kCertified : kUncertified;
}

int cmd_norm(const RunConfig& cfg) {
  const auto spec = require_admissible(cfg, "norm");
  const auto problem = load_input(cfg);
  const double norm = luxemburg_norm(spec, problem.grid, problem.f.values, cfg.norm_tol);
  std::printf("%.10f\n", norm);
  if (!cfg.output.empty()) {
    json j = run_header("norm", io::spec_to_json(spec), cfg);
    j["norm"] = norm;
    j["tol"] = cfg.norm_tol;
    write_atomically(cfg.output, j.dump(2) + "\n");
  }
  return kCertified;
}

int cmd_lux_fit(const RunConfig& cfg) {
  const auto spec = require_admissible(cfg, "lux-fit");
  const auto problem = load_input(cfg);
  const auto opts = solver_options(cfg);
  const auto res = fit_luxemburg(spec, problem.grid, problem.f, opts, cfg.norm_tol);
  const auto chk = landers_rogge_check(spec, problem.grid, problem.f, res, cfg.lr_tol, opts, certify_options(cfg));

  json j = run_header("lux-fit", io::spec_to_json(spec), cfg);
  j["luxemburg"] = io::luxemburg_to_json(res);
  j["inner_fit"] = io::fit_to_json(res.inner_fit);
  // The inner problem is the modular fit of f / delta (of f itself when delta = 0).
  const auto inner_f = res.delta > 0.0 ? scaled(problem.f, 1.0 / res.delta) : problem.f;
  j["inner_certificate"] =
      io::certificate_to_json(certify(spec, problem.grid, inner_f, res.inner_fit.g_star, certify_options(cfg)));
  j["landers_rogge"] = {{"consistent", chk.consistent},
                        {"residual", chk.residual},
                        {"tol", cfg.lr_tol},
                        {"inner_certified", chk.inner_certified},
                        {"relation_hypothesis_met", chk.relation_hypothesis_met}};
  emit_json(cfg, j);
  if (!cfg.csv.empty()) write_atomically(cfg.csv, plot_csv(problem.grid, problem.f, res.h_star.values()));
  if (!chk.relation_hypothesis_met) {
    std::cerr << "note: " << spec.name() << " is not an N-function; the scaling relation is used outside its hypothesis\n";
  }
  return chk.consistent ? kCertified : kUncertified;
}

int cmd_refine_study(const RunConfig& cfg) {
  const auto spec = require_admissible(cfg, "refine-study");
  if (!cfg.input.empty() && !cfg.fixture.empty()) throw io::ParseError("give either --input or --fixture, not both");
  std::optional<io::Problem> base;
  if (cfg.fixture.empty()) base = load_input(cfg);

  std::ostringstream csv;
  csv.precision(17);
  csv << "n,max_jump,modular,certified\n";
  json levels = json::array();
  bool all_certified = true;
  for (std::size_t k = 0; k <= cfg.refine_levels; ++k) {
    const std::size_t factor = std::size_t{1} << k;
    auto [grid, f] = base ? refine(base->grid, base->f, factor) : [&] {
      auto fx = fixtures::by_name(cfg.fixture, cfg.n * factor);
      return std::pair{std::move(fx.grid), std::move(fx.f)};
    }();
    const auto fit = fit_isotone(spec, grid, f, solver_options(cfg));
    const auto rep = certify(spec, grid, f, fit.g_star, certify_options(cfg));
    const double mj = max_jump(jump_scan(grid, fit, default_jump_tol(f)));
    all_certified = all_certified && rep.passed;
    csv << grid.cells() << ',' << mj << ',' << fit.modular_value << ',' << (rep.passed ? 1 : 0) << '\n';
    levels.push_back({{"n", grid.cells()}, {"max_jump", mj}, {"modular", fit.modular_value}, {"certified", rep.passed}});
  }
  if (cfg.csv.empty()) {
    std::cout << csv.str();
  } else {
    write_atomically(cfg.csv, csv.str());
  }
  if (!cfg.output.empty()) {
    json j = run_header("refine-study", io::spec_to_json(spec), cfg);
    j["source"] = cfg.fixture.empty() ? cfg.input : cfg.fixture;
    j["continuity_hypothesis"] = continuity_hypothesis(spec);
    j["levels"] = levels;
    write_atomically(cfg.output, j.dump(2) + "\n");
  }
  return all_certified ? kCertified : kUncertified;
}

void print_fit(std::ostream& out, const MonotoneFit& fit) {
  out << "  g* =";
  for (double v : fit.g_star.values()) out << ' ' << v;
  out << "\n  blocks:";
  for (const auto& b : fit.blocks) out << " [" << b.start_cell << ',' << b.end_cell << "]@" << b.level;
  out << "\n  modular value " << fit.modular_value << '\n';
}

int cmd_demo(const RunConfig& cfg) {
  std::ostream& out = std::cout;
  out.precision(10);
  bool ok = true;

  out << "1. Two cells on [0, 2], f = (2, 1), Phi(t) = t^2 / 2\n";
  const auto g2 = make_uniform(0, 2, 2);
  const StepFunction f2{{2, 1}};
  const auto quad = OrliczSpec::power(2);
  const auto fit2 = fit_isotone(quad, g2, f2);
  print_fit(out, fit2);
  const auto rep2 = certify(quad, g2, f2, fit2.g_star, certify_options(cfg));
  out << "  certificate: " << (rep2.passed ? "passed" : "FAILED") << "\n\n";
  ok = ok && rep2.passed;

  out << "2. Same data with g = (1.5, 1.6): the total-residual item catches the bad last level\n";
  const auto bad = certify(quad, g2, f2, MonotoneStepFunction({1.5, 1.6}), certify_options(cfg));
  out << "  total residual r_n = " << bad.item3_total << ", certificate " << (bad.passed ? "passed" : "rejected")
      << "\n\n";

  out << "3. f = (3, 1, 2) on [0, 3] with Phi(t) = t - ln(1 + t)\n";
  const auto g3 = make_uniform(0, 3, 3);
  const StepFunction f3{{3, 1, 2}};
  const auto ls = OrliczSpec::log_shifted();
  const auto fit3 = fit_isotone(ls, g3, f3);
  print_fit(out, fit3);
  ok = ok && certify(ls, g3, f3, fit3.g_star, certify_options(cfg)).passed;
  out << '\n';

  out << "4. Luxemburg distance for the first example\n";
  const auto lux = fit_luxemburg(quad, g2, f2, {}, cfg.norm_tol);
  const auto lr = landers_rogge_check(quad, g2, f2, lux, cfg.lr_tol);
  out << "  delta = " << lux.delta << ", h* = (" << lux.h_star[0] << ", " << lux.h_star[1] << ")"
      << ", scaling check " << (lr.consistent ? "consistent" : "INCONSISTENT") << "\n\n";
  ok = ok && lr.consistent;

  out << "5. Delta_2 sup ratio Phi(2x)/Phi(x) on [1e-3, 50]\n";
  for (const auto& s : {OrliczSpec::power(2), OrliczSpec::log_shifted(), OrliczSpec::arctan(),
                        OrliczSpec::exp_saturating(), OrliczSpec::exponential()}) {
    const auto d = delta2_estimate(s, 1e-3, 50, 400);
    out << "  " << s.name() << ": " << d.sup_ratio << (d.satisfied ? "" : "  (violated)") << '\n';
  }

  if (cfg.allow_l1) {
    out << "\n6. L1 contrast (outside the admissible class) on f = (0, 1, 0, 1)\n";
    const auto g4 = make_uniform(0, 4, 4);
    const StepFunction f4{{0, 1, 0, 1}};
    const auto dp = reference::brute_force_fit(reference::l1_big_phi, g4, f4, reference::make_level_grid(f4.values, 101));
    out << "  level-grid DP value " << dp.value << "; every level in [0, 1] for the middle pair is optimal,\n"
        << "  so the L1 minimizer is not unique and no certificate applies\n";
  }
  return ok ? kCertified : kUncertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best non-decreasing approximation in Orlicz spaces"};
  app.require_subcommand(1);
  RunConfig cfg;

  const std::map<std::string, TieBreak> tie_breaks{
      {"midpoint", TieBreak::Midpoint}, {"leftmost", TieBreak::Leftmost}, {"rightmost", TieBreak::Rightmost}};

  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--orlicz", cfg.spec_text, "Orlicz function as inline JSON or a .json file");
    sub->add_option("--family", cfg.family, "power | log_shifted | arctan | exp_saturating | exponential")
        ->capture_default_str();
    sub->add_option("--p", cfg.p, "exponent for the power family")->capture_default_str();
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input,-i", cfg.input, "problem file (.json, otherwise CSV)");
    sub->add_option("--fixture", cfg.fixture, "built-in input: sin | step | inv-sqrt | sqrt2");
    sub->add_option("--n", cfg.n, "cells for --fixture")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--a", cfg.a, "left end for `x,f` CSV input");
    sub->add_option("--b", cfg.b, "right end for `x,f` CSV input");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output,-o", cfg.output, "JSON result path (stdout if omitted)");
    sub->add_option("--tol", cfg.tol, "certificate tolerance relative to the certificate scale")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--tie-break", cfg.tie_break, "midpoint | leftmost | rightmost")
        ->transform(CLI::CheckedTransformer(tie_breaks, CLI::ignore_case));
    sub->add_option("--seed", cfg.seed, "probe seed")->envname("ORLICZ_ISOTONE_SEED")->capture_default_str();
    sub->add_option("--probes", cfg.probes, "random characterization probes")->capture_default_str();
    sub->add_option("--norm-tol", cfg.norm_tol, "Luxemburg bisection tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--lr-tol", cfg.lr_tol, "tolerance of the Luxemburg scaling check")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };

  auto* fit = app.add_subcommand("fit", "fit a non-decreasing step function and certify it");
  auto* cert = app.add_subcommand("certify", "certify a user-supplied candidate");
  auto* norm = app.add_subcommand("norm", "Luxemburg norm of the input");
  auto* lux = app.add_subcommand("lux-fit", "best approximation in the Luxemburg norm");
  auto* study = app.add_subcommand("refine-study", "jump sizes of the fit under mesh refinement");
  auto* demo = app.add_subcommand("demo", "guided walkthrough on small examples");
  for (auto* sub : {fit, cert, norm, lux, study}) {
    add_spec(sub);
    add_input(sub);
    add_common(sub);
  }
  add_common(demo);
  for (auto* sub : {fit, lux}) sub->add_option("--csv", cfg.csv, "plot data `x,f,g_star`");
  study->add_option("--csv", cfg.csv, "study table `n,max_jump,modular,certified` (stdout if omitted)");
  study->add_option("--refine-levels", cfg.refine_levels, "number of doublings")->capture_default_str();
  cert->add_option("--candidate", cfg.candidate, "candidate g in the same format and grid as the input");
  for (auto* sub : {fit, demo}) {
    sub->add_flag("--allow-l1-oracle", cfg.allow_l1, "permit p = 1 through the DP oracle (uncertified)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (*fit) return cmd_fit(cfg);
    if (*cert) return cmd_certify(cfg);
    if (*norm) return cmd_norm(cfg);
    if (*lux) return cmd_lux_fit(cfg);
    if (*study) return cmd_refine_study(cfg);
    if (*demo) return cmd_demo(cfg);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const io::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const StructuralError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
