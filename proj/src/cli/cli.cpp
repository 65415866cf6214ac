#include "liesym/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "liesym/catalog.hpp"
#include "liesym/models.hpp"
#include "liesym/numerics.hpp"
#include "liesym/parse.hpp"
#include "liesym/reduction.hpp"

namespace liesym::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Thrown for bad input that CLI11 cannot see (model names, files, constants).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string model;
  std::string params_file;
  std::string out_dir;
  std::string ansatz = "a1";
  std::map<std::string, std::string> constants;  // kappa1, kappa2, kappa, kappa3, c
  std::vector<int> figures;
  double tol = static_cast<double>(kDefaultTol);
  std::uint64_t seed = 1;
  bool json = false;
};

PDEModel load_model(const RunConfig& cfg, const char* fallback) {
  std::optional<ModelId> id;
  ModelParams params;
  if (!cfg.params_file.empty()) {
    std::ifstream in(cfg.params_file);
    if (!in) throw UsageError("cannot read params file " + cfg.params_file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("params file " + cfg.params_file + ": " + e.what());
    }
    try {
      if (j.contains("model")) {
        auto mc = model_config_from_json(j);
        id = mc.id;
        params = mc.params;
      } else {
        params = model_params_from_json(j);
      }
    } catch (const std::exception& e) {
      throw UsageError("params file " + cfg.params_file + ": " + e.what());
    }
  }
  try {
    if (!cfg.model.empty()) id = model_from_name(cfg.model);
    if (!id) {
      if (!fallback) throw UsageError("--model is required");
      id = model_from_name(fallback);
    }
    return build_model(*id, params);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void emit_json(const RunConfig& cfg, const std::string& file, const json& j, std::ostream& out) {
  if (cfg.json) out << j.dump(2) << "\n";
  if (cfg.out_dir.empty()) return;
  fs::create_directories(cfg.out_dir);
  std::ofstream f(fs::path(cfg.out_dir) / file);
  f << j.dump(2) << "\n";
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  auto model = load_model(cfg, nullptr);
  auto entries = catalog(model);
  auto diffs = catalog_diffs(entries);
  json rows = json::array();
  std::ostringstream text;
  std::size_t verified = 0, printed_ok = 0;
  for (const auto& e : entries) {
    auto rep = check_symmetry(e.field, model.pde);
    verified += rep.passed;
    printed_ok += e.printed_passes;
    rows.push_back({{"label", e.label},
                    {"source", e.source},
                    {"printed_passes", e.printed_passes},
                    {"verified", rep.passed},
                    {"report", to_json(rep)}});
    text << "  " << std::left << std::setw(6) << e.label << (rep.passed ? "pass" : "FAIL")
         << (e.printed_passes ? "" : " (printed form fails; corrected form used)") << "  " << to_string(e.field)
         << "\n";
  }
  const bool ok = verified == entries.size();
  json j{{"model", model_name(model.id)},
         {"passed", ok},
         {"verified", verified},
         {"printed_passed", printed_ok},
         {"total", entries.size()},
         {"entries", rows},
         {"diffs", to_json(diffs)}};
  emit_json(cfg, "verify_" + model_name(model.id) + ".json", j, out);
  if (!cfg.json) {
    out << "model " << model_name(model.id) << ": " << verified << "/" << entries.size() << " generators pass";
    if (printed_ok != entries.size()) out << ", " << printed_ok << "/" << entries.size() << " as printed";
    out << "\n" << text.str();
    if (!diffs.entries.empty()) out << to_text(diffs);
  }
  return ok ? kOk : kVerificationFailed;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  auto model = load_model(cfg, nullptr);
  auto c = classify(model);
  json basis = json::array();
  for (const auto& v : c.basis) basis.push_back(to_json(v));
  json j{{"model", model_name(model.id)}, {"dimension", c.dimension}, {"basis", basis}, {"diagnostics", c.diagnostics}};
  emit_json(cfg, "classify_" + model_name(model.id) + ".json", j, out);
  if (!cfg.json) {
    out << "model " << model_name(model.id) << ": dimension " << c.dimension << "\n";
    for (std::size_t i = 0; i < c.basis.size(); ++i) out << "  e" << i + 1 << " = " << to_string(c.basis[i]) << "\n";
    for (const auto& d : c.diagnostics) out << "  note: " << d << "\n";
  }
  return kOk;
}

int cmd_brackets(const RunConfig& cfg, std::ostream& out) {
  auto model = load_model(cfg, "const-vol");
  auto t = bracket_table(catalog(model), model.params);
  json j = to_json(t);
  j["model"] = model_name(model.id);
  emit_json(cfg, "brackets_" + model_name(model.id) + ".json", j, out);
  if (!cfg.json) out << to_text(t);
  return t.closed() && t.antisymmetric() ? kOk : kVerificationFailed;
}

std::map<std::string, Expr> parse_constants(const RunConfig& cfg) {
  std::map<std::string, Expr> k;
  for (const auto& [name, text] : cfg.constants) {
    try {
      k.emplace(name, parse(text));
    } catch (const std::exception& e) {
      throw UsageError("--" + name + ": " + e.what());
    }
  }
  return k;
}

Expr bind_all(const Expr& e, const std::vector<SubstitutionRule>& rules) { return rules.empty() ? e : substitute(e, rules); }

int cmd_reduce(const RunConfig& cfg, std::ostream& out) {
  auto model = load_model(cfg, nullptr);
  auto k = parse_constants(cfg);
  ReductionAnsatz ansatz;
  try {
    ansatz = ansatz_by_name(cfg.ansatz, model, k);
  } catch (const ReductionError& e) {
    throw UsageError(e.what());
  }
  auto red = reduce(model, ansatz);
  json j{{"model", model_name(model.id)},
         {"ansatz", cfg.ansatz},
         {"template", to_string(ansatz.tmpl())},
         {"variables", red.space.independent()},
         {"equation", to_string(red.equation)}};
  std::ostringstream text;
  text << "model " << model_name(model.id) << ", ansatz " << cfg.ansatz << ": u = " << to_string(ansatz.tmpl()) << "\n";
  text << "reduced: " << to_string(red.equation) << " = 0\n";

  const auto& vars = red.space.independent();
  if (vars.size() == 1 && vars[0] == "t") {
    auto ode = to_ode1(red);
    j["ode1"] = {{"var", ode.var}, {"p", to_string(ode.p)}, {"q", to_string(ode.q)}};
    text << "p = " << to_string(ode.p) << "\nq = " << to_string(ode.q) << "\n";
  } else if (vars.size() == 1) {
    auto ode = to_ode2(red);
    j["ode"] = to_json(ode);
    text << "a = " << to_string(ode.a) << "\nb = " << to_string(ode.b) << "\nc = " << to_string(ode.c) << "\n";
    // Compare with the published form where one exists.
    std::optional<LinearODE2> printed;
    bool is_a1 = cfg.ansatz == "a1" || cfg.ansatz == "heston-a1" || cfg.ansatz == "stein-a1";
    if (is_a1 && model.id == ModelId::StochVolGeneric) printed = printed_generic_ode();
    if (is_a1 && model.id == ModelId::HestonTransformed) printed = printed_heston_ode();
    if (is_a1 && model.id == ModelId::SteinStein) printed = printed_stein_ode();
    if (printed) {
      std::vector<SubstitutionRule> rules;
      for (const char* n : {kKappa1, kKappa2})
        if (auto it = k.find(n); it != k.end()) rules.push_back(SubstitutionRule::symbol(n, it->second));
      for (const auto& n : ModelParams::field_names())
        if (const auto& v = model.params.field(n); v && *v != Expr::symbol(n))
          rules.push_back(SubstitutionRule::symbol(n, *v));
      printed->a = bind_all(printed->a, rules);
      printed->b = bind_all(printed->b, rules);
      printed->c = bind_all(printed->c, rules);
      auto diffs = ode_diffs(model_name(model.id), *printed, ode);
      j["diffs"] = to_json(diffs);
      if (!diffs.entries.empty()) text << to_text(diffs);
    }
  }
  emit_json(cfg, "reduce_" + model_name(model.id) + "_" + cfg.ansatz + ".json", j, out);
  if (!cfg.json) out << text.str();
  return kOk;
}

int cmd_figures(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = cfg.out_dir.empty() ? fs::path("figures") : fs::path(cfg.out_dir);
  fs::create_directories(dir);
  FigureOptions opts;
  opts.tol = cfg.tol;
  opts.seed = cfg.seed;
  std::vector<int> figs = cfg.figures.empty() ? std::vector<int>{1, 2, 3, 4} : cfg.figures;
  json summary = json::array();
  bool ok = true;
  for (int n : figs) {
    if (n < 1 || n > 4) throw UsageError("figure must be 1, 2, 3 or 4");
    auto curves = figure_data(n, opts);
    for (const auto& c : curves) {
      const std::string file = "fig" + std::to_string(n) + "_curve" + std::to_string(c.index) + ".csv";
      std::ofstream(dir / file) << to_csv(c);
      const bool pass = c.residual.max_abs_residual < kResidualBound;
      ok = ok && pass;
      summary.push_back({{"figure", n},
                         {"curve", c.index},
                         {"label", c.label},
                         {"file", file},
                         {"points", c.grid.y.size()},
                         {"steps", c.grid.meta.steps},
                         {"residual", to_json(c.residual)},
                         {"passed", pass}});
      if (!cfg.json)
        out << file << "  " << c.label << "  residual_max=" << static_cast<double>(c.residual.max_abs_residual)
            << (pass ? "" : "  FAIL") << "\n";
    }
  }
  json j{{"figures", figs}, {"tol", cfg.tol}, {"seed", cfg.seed}, {"curves", summary}};
  std::ofstream(dir / "figures_summary.json") << j.dump(2) << "\n";
  if (cfg.json) out << j.dump(2) << "\n";
  return ok ? kOk : kNumericFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Lie point symmetries and reductions of option-pricing equations"};
  app.name("lie_reduce");
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub, bool model_opts) {
    if (model_opts) {
      sub->add_option("--model", cfg.model, "model: " + [] {
        std::string s;
        for (const auto& n : model_names()) s += (s.empty() ? "" : ", ") + n;
        return s;
      }());
      sub->add_option("--params", cfg.params_file, "JSON file with parameters, or {\"model\", \"params\"}");
    }
    sub->add_option("--out", cfg.out_dir, "directory for JSON/CSV output");
    sub->add_option("--tol", cfg.tol, "ODE tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "seed for residual sample points");
    sub->add_flag("--json", cfg.json, "print JSON instead of text");
  };
  auto* verify = app.add_subcommand("verify", "check every catalogued generator on the model");
  common(verify, true);
  auto* classify_cmd = app.add_subcommand("classify", "solve the determining equations");
  common(classify_cmd, true);
  auto* brackets = app.add_subcommand("brackets", "commutator table of the catalogued algebra");
  common(brackets, true);
  auto* reduce_cmd = app.add_subcommand("reduce", "reduce by an invariant ansatz");
  common(reduce_cmd, true);
  std::string ansatz_help = "ansatz:";
  for (const auto& n : ansatz_names()) ansatz_help += " " + n;
  reduce_cmd->add_option("--ansatz", cfg.ansatz, ansatz_help);
  for (const char* k : {"kappa1", "kappa2", "kappa", "kappa3", "c"}) {
    reduce_cmd->add_option_function<std::string>(
        std::string("--") + k, [&cfg, k](const std::string& v) { cfg.constants[k] = v; },
        std::string("value of ") + k + " (expression)");
  }
  auto* figures = app.add_subcommand("figures", "solve the reduced ODEs on the figure parameter grids");
  common(figures, false);
  figures->add_option("figure,--figure", cfg.figures, "figure numbers (default 1 2 3 4)");

  std::vector<std::string> argv_store{"lie_reduce"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(cfg, out);
    if (classify_cmd->parsed()) return cmd_classify(cfg, out);
    if (brackets->parsed()) return cmd_brackets(cfg, out);
    if (reduce_cmd->parsed()) return cmd_reduce(cfg, out);
    return cmd_figures(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericsError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kVerificationFailed;
  }
}

}  // namespace liesym::cli
