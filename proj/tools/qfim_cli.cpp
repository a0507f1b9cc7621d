// qfim: command-line front end for the two-source quantum Fisher information
// library. Exit codes: 0 success, 1 numerical/model failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qfim/app/crossval.hpp"
#include "qfim/app/evaluate.hpp"
#include "qfim/app/format.hpp"
#include "qfim/app/sweep.hpp"
#include "qfim/qfim.hpp"

namespace {

using namespace qfim;
using namespace qfim::app;

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct PsfArgs {
  double k = 0;
  double z_r = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--k", k, "wavenumber k (1/length)")->required();
    cmd->add_option("--zr", z_r, "Rayleigh-type length z_R")->required();
  }
  GaussianPsf<double> psf() const { return {k, z_r}; }
};

struct GeometryArgs {
  double s = 0;
  double p = 0;
  double xbar = 0;
  double zbar = 0;
  std::vector<double> coords;

  void add(CLI::App* cmd) {
    auto* s_opt = cmd->add_option("--s", s, "transverse separation s");
    auto* p_opt = cmd->add_option("--p", p, "axial separation p");
    auto* x_opt = cmd->add_option("--xbar", xbar, "transverse centroid");
    auto* z_opt = cmd->add_option("--zbar", zbar, "axial centroid");
    cmd->add_option("--coords", coords,
                    "absolute source coordinates x1 z1 x2 z2 (instead of "
                    "--s/--p/--xbar/--zbar)")
        ->expected(4)
        ->excludes(s_opt)
        ->excludes(p_opt)
        ->excludes(x_opt)
        ->excludes(z_opt);
  }

  SourceGeometry<double> geometry() const {
    if (coords.size() == 4) {
      return SourceGeometry<double>::from_coordinates(coords[0], coords[1],
                                                      coords[2], coords[3]);
    }
    return {s, xbar, p, zbar};
  }
};

struct BudgetArgs {
  std::int64_t nu = 1;
  std::int64_t m = 1;
  double eps = 1;

  void add(CLI::App* cmd) {
    cmd->add_option("--nu", nu, "number of experimental runs")->required();
    cmd->add_option("--m", m, "coherence intervals per run")->required();
    cmd->add_option("--eps", eps, "mean photons per interval")->required();
  }
  EstimationBudget budget() const { return {nu, m, eps}; }
};

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_eval(const PsfArgs& psf_args, const GeometryArgs& geo,
             const std::string& method, double tol) {
  const auto m = parse_method(method);
  const auto e = evaluate(psf_args.psf(), geo.geometry(), m);
  print_json(to_json(e));
  if (e.max_deviation && !(*e.max_deviation <= tol)) {
    std::cerr << "cross-method deviation " << format_double(*e.max_deviation)
              << " exceeds tolerance " << format_double(tol) << '\n';
    return kExitNumerical;
  }
  return 0;
}

int cmd_sweep(SweepSpec spec, const std::string& range, const std::string& method,
              const std::string& out_path) {
  spec.range = Range::parse(range);
  spec.method = parse_method(method);
  spec.validate();
  const auto rows = run_sweep(spec);

  std::ostringstream csv;
  write_sweep_csv(csv, spec, rows);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) {
      std::cerr << "cannot open '" << out_path << "' for writing\n";
      return kExitNumerical;
    }
    f << csv.str();
    f.flush();
    if (!f) {
      std::cerr << "failed writing '" << out_path << "'\n";
      return kExitNumerical;
    }
  }
  if (spec.method == Method::All) {
    const double dev = max_sweep_deviation(rows);
    std::cerr << "max cross-method deviation: " << format_double(dev) << '\n';
    if (!(dev <= spec.tol)) return kExitNumerical;
  }
  return 0;
}

int cmd_crossval(CrossvalSpec spec, const std::string& range,
                 const std::string& s_range, const std::string& p_range) {
  if (!range.empty()) spec.s_range = spec.p_range = Range::parse(range);
  if (!s_range.empty()) spec.s_range = Range::parse(s_range);
  if (!p_range.empty()) spec.p_range = Range::parse(p_range);
  const auto report = run_crossval(spec);
  print_report(std::cout, report);
  return report.passed() ? 0 : kExitNumerical;
}

int cmd_limits(const PsfArgs& psf_args) {
  const auto lim = small_separation_limit(psf_args.psf());
  print_json({{"psf", {{"model", "gaussian"}, {"k", psf_args.k}, {"z_r", psf_args.z_r}}},
              {"parameters", {"s", "xbar", "p", "zbar"}},
              {"H", matrix_to_json(lim.h)},
              {"Gamma", matrix_to_json(lim.gamma_mat)}});
  return 0;
}

std::vector<Parameter> parse_subset(const std::string& text) {
  std::vector<Parameter> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    bool found = false;
    for (auto p : kAllParameters) {
      if (name(p) == item) {
        out.push_back(p);
        found = true;
      }
    }
    if (!found) throw InvalidParameter("unknown parameter '" + item + "' in --subset");
  }
  return out;
}

int cmd_crb(const PsfArgs& psf_args, const GeometryArgs& geo, bool from_limits,
            const std::string& method, const BudgetArgs& budget_args,
            const std::string& subset) {
  const auto budget = budget_args.budget();
  budget.validate();
  const auto psf = psf_args.psf();

  ParamMatrix4d h;
  std::string source;
  if (from_limits) {
    h = small_separation_limit(psf).h;
    source = "limit";
  } else {
    const auto e = evaluate(psf, geo.geometry(), parse_method(method));
    h = e.qfim.h;
    source = e.method_used;
  }

  const auto report = qcrb_report(h, budget);
  nlohmann::json per;
  for (auto p : kAllParameters) per[std::string(name(p))] = report.per_parameter(index(p));
  nlohmann::json j = {{"source", source},
                      {"budget", {{"nu", budget.nu}, {"m", budget.m}, {"eps", budget.eps}}},
                      {"trace_inverse", report.trace_inverse},
                      {"bound", report.bound},
                      {"condition_number", report.condition_number},
                      {"per_parameter", per}};
  if (!subset.empty()) {
    const auto params = parse_subset(subset);
    std::vector<std::string> names;
    for (auto p : params) names.emplace_back(name(p));
    j["subset"] = {{"parameters", names}, {"bound", qcrb_subset<double>(h, params, budget)}};
  }
  if (!budget.weak_source()) {
    std::cerr << "warning: eps >= 1 is outside the weak-source regime\n";
  }
  print_json(j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Fisher information for two incoherent point sources"};
  app.require_subcommand(1);

  PsfArgs psf_args;
  GeometryArgs geo;
  BudgetArgs budget_args;
  std::string method = "all";
  double tol = 1e-8;

  auto* eval = app.add_subcommand("eval", "evaluate H and Gamma at one geometry");
  psf_args.add(eval);
  geo.add(eval);
  eval->add_option("--method", method, "pipeline | general | gaussian-closed | all")
      ->capture_default_str();
  eval->add_option("--tol", tol, "cross-method tolerance for --method all")
      ->capture_default_str();

  SweepSpec sweep_spec;
  std::string sweep_var = "s";
  std::string sweep_range = "0:5:0.01";
  std::string sweep_method = "gaussian-closed";
  std::string out_path;
  auto* sweep = app.add_subcommand("sweep", "sweep s or p and write CSV");
  sweep->add_option("--k", sweep_spec.k, "wavenumber k")->required();
  sweep->add_option("--zr", sweep_spec.z_r, "Rayleigh-type length z_R")->required();
  sweep->add_option("--sweep", sweep_var, "swept variable: s or p")
      ->check(CLI::IsMember({"s", "p"}))
      ->capture_default_str();
  sweep->add_option("--range", sweep_range, "start:stop:step")->capture_default_str();
  sweep->add_option("--fixed", sweep_spec.fixed, "value of the other separation")
      ->capture_default_str();
  sweep->add_option("--method", sweep_method, "pipeline | general | gaussian-closed | all")
      ->capture_default_str();
  sweep->add_flag("--normalized", sweep_spec.normalized, "divide by N = k/(2 z_R)");
  sweep->add_option("--out", out_path, "output CSV path (default stdout)");
  sweep->add_option("--tol", sweep_spec.tol, "cross-method tolerance for --method all")
      ->capture_default_str();

  CrossvalSpec cv_spec;
  std::string cv_range, cv_s_range, cv_p_range;
  auto* crossval = app.add_subcommand("crossval", "three-way route comparison on a grid");
  crossval->add_option("--k", cv_spec.k, "wavenumber k")->capture_default_str();
  crossval->add_option("--zr", cv_spec.z_r, "Rayleigh-type length z_R")->capture_default_str();
  crossval->add_option("--range", cv_range, "start:stop:step for both s and p (default 0.1:5:0.25)");
  crossval->add_option("--s-range", cv_s_range, "start:stop:step for s");
  crossval->add_option("--p-range", cv_p_range, "start:stop:step for p");
  crossval->add_option("--tol", cv_spec.tol, "relative agreement tolerance")
      ->capture_default_str();

  auto* limits = app.add_subcommand("limits", "small-separation limit of H and Gamma");
  PsfArgs limit_psf;
  limit_psf.add(limits);

  auto* crb = app.add_subcommand("crb", "quantum Cramer-Rao bound");
  PsfArgs crb_psf;
  GeometryArgs crb_geo;
  bool from_limits = false;
  std::string crb_method = "gaussian-closed";
  std::string subset;
  crb_psf.add(crb);
  crb_geo.add(crb);
  budget_args.add(crb);
  crb->add_flag("--from-limits", from_limits, "use the small-separation limit of H");
  crb->add_option("--method", crb_method, "route used to compute H")->capture_default_str();
  crb->add_option("--subset", subset, "comma-separated parameters, others known (e.g. s,p)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*eval) return cmd_eval(psf_args, geo, method, tol);
    if (*sweep) {
      sweep_spec.swept = sweep_var.front();
      return cmd_sweep(sweep_spec, sweep_range, sweep_method, out_path);
    }
    if (*crossval) return cmd_crossval(cv_spec, cv_range, cv_s_range, cv_p_range);
    if (*limits) return cmd_limits(limit_psf);
    if (*crb) return cmd_crb(crb_psf, crb_geo, from_limits, crb_method, budget_args, subset);
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
