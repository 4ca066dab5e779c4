#include "gms/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "gms/borninfeld.hpp"
#include "gms/errors.hpp"
#include "gms/reduced.hpp"

#ifndef GMS_VERSION
#define GMS_VERSION "0.1.0"
#endif

namespace gms {

const char* version_string() { return GMS_VERSION; }

namespace {

const std::set<std::string> kCommands{"figure2", "solve-torus", "sweep-t", "thresholds", "bi-check"};

bool needs_metric(const std::string& cmd) { return cmd != "bi-check" && !cmd.empty(); }
bool is_torus(const std::string& cmd) { return cmd == "solve-torus" || cmd == "sweep-t"; }

// Walks a document and records every schema problem instead of stopping at
// the first.
class Checker {
 public:
  Checker(ExperimentConfig& cfg, std::string base_dir) : cfg_(cfg), base_(std::move(base_dir)) {}

  std::vector<Diagnostic> diagnostics;

  void check(const Json& doc) {
    if (!doc.is_object()) return fail("", "config must be a JSON object");
    only_keys(doc, "", {"command", "manifold", "metric", "k", "class", "solver", "quadrature", "seed", "samples",
                        "theta_samples", "output"});

    if (auto* v = find(doc, "command")) {
      if (!v->is_string() || !kCommands.count(v->get<std::string>()))
        fail("command", "must be one of figure2, solve-torus, sweep-t, thresholds, bi-check");
      else
        cfg_.command = v->get<std::string>();
    } else {
      fail("command", "is required");
    }

    if (auto* v = find(doc, "manifold")) manifold(*v);
    if (auto* v = find(doc, "metric"))
      metric(*v);
    else if (needs_metric(cfg_.command))
      fail("metric", "is required for " + cfg_.command);
    if (auto* v = find(doc, "k")) degrees(*v);
    if (auto* v = find(doc, "class")) class_spec(*v);
    if (auto* v = find(doc, "solver")) solver(*v);
    if (auto* v = find(doc, "quadrature")) quadrature(*v);
    if (auto* v = find(doc, "seed")) {
      if (!v->is_number_unsigned()) fail("seed", "must be a non-negative integer");
      else cfg_.seed = v->get<std::uint64_t>();
    }
    if (auto* v = find(doc, "samples")) cfg_.samples = integer(*v, "samples", 10);
    if (auto* v = find(doc, "theta_samples")) cfg_.thetaSamples = integer(*v, "theta_samples", 3);
    if (auto* v = find(doc, "output")) output(*v);
    command_rules(doc);
  }

 private:
  ExperimentConfig& cfg_;
  std::string base_;

  void fail(const std::string& path, const std::string& msg) { diagnostics.push_back({path, msg, 0, 0}); }

  static const Json* find(const Json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  static std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
  }

  void only_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
        fail(join(path, it.key()), "unknown field");
    }
  }

  bool object(const Json& v, const std::string& path) {
    if (v.is_object()) return true;
    fail(path, "must be an object");
    return false;
  }

  int integer(const Json& v, const std::string& path, long long min) {
    if (!v.is_number_integer() || v.get<long long>() < min || v.get<long long>() > std::numeric_limits<int>::max()) {
      fail(path, "must be an integer >= " + std::to_string(min));
      return static_cast<int>(min);
    }
    return v.get<int>();
  }

  double positive(const Json& v, const std::string& path) {
    if (!v.is_number() || !(v.get<double>() > 0.0)) {
      fail(path, "must be a positive number");
      return 1.0;
    }
    return v.get<double>();
  }

  std::vector<double> numbers(const Json& v, const std::string& path) {
    std::vector<double> out;
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "must be a number");
        else out.push_back(v[i].get<double>());
      }
      if (v.empty()) fail(path, "must not be empty");
    } else {
      fail(path, "must be a number or an array of numbers");
    }
    return out;
  }

  void manifold(const Json& v) {
    if (!object(v, "manifold")) return;
    only_keys(v, "manifold", {"n1", "n2", "period1", "period2"});
    if (auto* x = find(v, "n1")) cfg_.n1 = integer(*x, "manifold.n1", 4);
    if (auto* x = find(v, "n2")) cfg_.n2 = integer(*x, "manifold.n2", 4);
    if (auto* x = find(v, "period1")) cfg_.period1 = positive(*x, "manifold.period1");
    if (auto* x = find(v, "period2")) cfg_.period2 = positive(*x, "manifold.period2");
  }

  void metric(const Json& v) {
    if (!object(v, "metric")) return;
    only_keys(v, "metric", {"builtin", "table", "angle_map"});
    const Json* b = find(v, "builtin");
    const Json* t = find(v, "table");
    if ((b != nullptr) == (t != nullptr)) {
      fail("metric", "needs exactly one of builtin or table");
    } else if (b) {
      if (!b->is_string() || (*b != "one-plus-cos-squared" && *b != "flat"))
        fail("metric.builtin", "must be one-plus-cos-squared or flat");
      else
        cfg_.metricBuiltin = b->get<std::string>();
    } else {
      if (!t->is_string() || t->get<std::string>().empty()) {
        fail("metric.table", "must be a path to a theta,h CSV file");
      } else {
        std::filesystem::path p(t->get<std::string>());
        if (p.is_relative()) p = std::filesystem::path(base_) / p;
        cfg_.metricBuiltin.clear();
        cfg_.metricTable = p.lexically_normal().string();
        try {
          (void)HFunction::from_csv(cfg_.metricTable);
        } catch (const Error& e) {
          fail("metric.table", e.what());
        }
      }
    }
    if (auto* a = find(v, "angle_map")) {
      if (!a->is_string() || (*a != "even" && *a != "half")) fail("metric.angle_map", "must be even or half");
      else cfg_.angleMap = a->get<std::string>();
    }
  }

  void degrees(const Json& v) {
    cfg_.k.clear();
    if (v.is_number_integer()) {
      cfg_.k.push_back(integer(v, "k", 1));
    } else if (v.is_array() && !v.empty()) {
      for (std::size_t i = 0; i < v.size(); ++i) cfg_.k.push_back(integer(v[i], "k[" + std::to_string(i) + "]", 1));
    } else {
      fail("k", "must be a positive integer or a non-empty array of them");
      cfg_.k = {1};
    }
  }

  void class_spec(const Json& v) {
    if (!object(v, "class")) return;
    only_keys(v, "class", {"c", "kappa", "t"});
    if (auto* x = find(v, "c")) cfg_.c = numbers(*x, "class.c");
    if (auto* x = find(v, "kappa")) cfg_.kappa = numbers(*x, "class.kappa");
    if (auto* x = find(v, "t")) {
      cfg_.t = numbers(*x, "class.t");
      for (std::size_t i = 0; i < cfg_.t.size(); ++i) {
        if (!(cfg_.t[i] > 0.0)) fail("class.t", "every t must be positive");
        if (i > 0 && !(cfg_.t[i] > cfg_.t[i - 1])) {
          fail("class.t", "must be strictly ascending");
          break;
        }
      }
    }
  }

  void solver(const Json& v) {
    if (!object(v, "solver")) return;
    only_keys(v, "solver", {"grad_tol", "max_newton", "max_cg", "shrink", "sufficient_decrease"});
    auto& s = cfg_.solver;
    if (auto* x = find(v, "grad_tol")) s.gradTol = positive(*x, "solver.grad_tol");
    if (auto* x = find(v, "max_newton")) s.maxNewton = integer(*x, "solver.max_newton", 1);
    if (auto* x = find(v, "max_cg")) s.maxCG = integer(*x, "solver.max_cg", 1);
    auto unit = [&](const char* key, double& into) {
      if (auto* x = find(v, key)) {
        if (!x->is_number() || !(x->get<double>() > 0.0 && x->get<double>() < 1.0))
          fail(std::string("solver.") + key, "must lie in (0, 1)");
        else
          into = x->get<double>();
      }
    };
    unit("shrink", s.shrink);
    unit("sufficient_decrease", s.sufficientDecrease);
  }

  void quadrature(const Json& v) {
    if (!object(v, "quadrature")) return;
    only_keys(v, "quadrature", {"tol", "max_level"});
    if (auto* x = find(v, "tol")) cfg_.quadTol = positive(*x, "quadrature.tol");
    if (auto* x = find(v, "max_level")) cfg_.quadMaxLevel = integer(*x, "quadrature.max_level", 2);
  }

  void output(const Json& v) {
    if (!object(v, "output")) return;
    only_keys(v, "output", {"path", "format"});
    if (auto* x = find(v, "path")) {
      if (!x->is_string()) fail("output.path", "must be a string");
      else cfg_.outputPath = x->get<std::string>();
    }
    if (auto* x = find(v, "format")) {
      if (!x->is_string() || (*x != "csv" && *x != "json")) fail("output.format", "must be csv or json");
      else cfg_.outputFormat = x->get<std::string>();
    }
  }

  void command_rules(const Json& doc) {
    const std::string& cmd = cfg_.command;
    const bool has_c = !cfg_.c.empty(), has_kappa = !cfg_.kappa.empty();
    if (cmd == "figure2") {
      if (!has_c) fail("class.c", "figure2 needs at least one c");
      if (has_kappa) fail("class.kappa", "figure2 takes c values only");
    }
    if (is_torus(cmd) && has_c == has_kappa) fail("class", "needs exactly one of c or kappa");
    if (cmd == "sweep-t") {
      if (cfg_.t.empty()) fail("class.t", "sweep-t needs a t list");
      if (cfg_.c.size() + cfg_.kappa.size() > 1) fail("class", "sweep-t takes a single c or kappa");
    }
    if ((cmd == "figure2" || is_torus(cmd)) && doc.contains("k") && cfg_.k != std::vector<int>{1})
      fail("k", cmd + " works on the 2-torus, k = 1");
    if (cfg_.angleMap == "half" && cmd != "figure2") fail("metric.angle_map", "half is a figure2 display option");
    if (is_torus(cmd) && !(cfg_.period2 > 0.0 && std::abs(cfg_.period2 - 2.0 * std::numbers::pi) < 1e-12))
      fail("manifold.period2", "the h(theta2) metric needs period2 = 2 pi");
  }
};

HFunction make_h(const ExperimentConfig& cfg) {
  if (!cfg.metricTable.empty()) return HFunction::from_csv(cfg.metricTable);
  if (cfg.metricBuiltin == "flat") return HFunction::constant(1.0);
  return HFunction::one_plus_cos_squared();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Parses JSON text; on failure returns a diagnostic with line and column.
bool parse_text(const std::string& text, Json& doc, Diagnostic& diag) {
  try {
    doc = Json::parse(text);
    return true;
  } catch (const Json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < pos; ++i)
      if (text[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    diag.line = line;
    diag.column = static_cast<int>(pos - line_start) + 1;
    std::string msg = e.what();
    if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    diag.message = msg;
    return false;
  }
}

std::string parent_dir(const std::string& path) {
  auto p = std::filesystem::path(path).parent_path();
  return p.empty() ? "." : p.string();
}

// ---- commands -------------------------------------------------------------

Table run_figure2(const ExperimentConfig& cfg) {
  const HFunction h = make_h(cfg);
  const bool half = cfg.angleMap == "half";
  Table t;
  t.columns = {"c", "theta", "absAlpha"};
  const int n = cfg.thetaSamples;
  for (double c : cfg.c) {
    for (int i = 0; i < n; ++i) {
      // Symmetric grid: theta_i = -theta_{n-1-i} exactly.
      const int offset = 2 * i - (n - 1);
      const double theta = std::numbers::pi * offset / (n - 1);
      const double s = std::abs(theta) * (half ? 0.5 : 1.0);
      const double value = h(s) * f_closed_at(c, h, 1, s);
      t.rows.push_back({c, theta, value});
    }
  }
  return t;
}

struct TorusClass {
  double c;
  double kappa;
};

std::vector<TorusClass> torus_classes(const ExperimentConfig& cfg, const HFunction& h) {
  std::vector<TorusClass> out;
  for (double c : cfg.c) out.push_back({c, kappa_of_c(c, h, 1)});
  for (double k : cfg.kappa) out.push_back({c_for_kappa(k, h, 1), k});
  return out;
}

double closed_form_gap(const Cochain& alpha, const ConformalMetric& m, const HFunction& h, double c) {
  const auto image = integrate_form(
      m.grid(), [](double, double) { return 0.0; },
      [&](double, double t2) { return f_closed_at(c, h, 1, std::min(std::abs(t2), std::numbers::pi)); });
  return sup_norm(alpha - image, m);
}

Table run_solve_torus(const ExperimentConfig& cfg) {
  const HFunction h = make_h(cfg);
  const auto m = build_torus(cfg.n1, cfg.n2, h.even_sampler(), cfg.period1, cfg.period2);
  Table t;
  t.columns = {"c",         "kappa",    "n1",          "n2",       "energy",        "tvValue",
               "supNorm",   "gradNorm", "newtonIters", "cgIters",  "closedFormGap"};
  for (const auto& cls : torus_classes(cfg, h)) {
    const auto a = constant_form(m.grid(), 0.0, cls.kappa);
    const auto sol = minimize(a, m, RhoModel::gms(), cfg.solver);
    t.rows.push_back({cls.c, cls.kappa, static_cast<long long>(cfg.n1), static_cast<long long>(cfg.n2),
                      sol.energy.value, sol.energy.tvValue, sol.energy.maxPointwiseNorm, sol.gradNorm,
                      static_cast<long long>(sol.newtonIters), static_cast<long long>(sol.cgIters),
                      closed_form_gap(sol.alpha, m, h, cls.c)});
  }
  return t;
}

Table run_sweep_t(const ExperimentConfig& cfg) {
  const HFunction h = make_h(cfg);
  const auto m = build_torus(cfg.n1, cfg.n2, h.even_sampler(), cfg.period1, cfg.period2);
  const auto cls = torus_classes(cfg, h).front();
  const auto rep = t_sweep(constant_form(m.grid(), 0.0, cls.kappa), m, cfg.t, cfg.solver);
  Table t;
  t.columns = {"t",        "tvValue",     "tGmsValue",       "supNorm", "harmonicGap",
               "gammaUpperBound", "gradNorm", "newtonIters", "harmonicSupNorm", "gVolume"};
  for (const auto& e : rep.entries)
    t.rows.push_back({e.t, e.tvValue, e.tGmsValue, e.supNorm, e.harmonicGap, e.gammaUpperBound, e.solution.gradNorm,
                      static_cast<long long>(e.solution.newtonIters), rep.harmonicSupNorm, rep.gVolume});
  return t;
}

Table run_thresholds(const ExperimentConfig& cfg) {
  const HFunction h = make_h(cfg);
  Table t;
  t.columns = {"k", "cStar", "kappaStar", "divergent", "levels", "lastEstimate"};
  for (int k : cfg.k) {
    const auto rep = kappa_star(h, k, cfg.quadTol, cfg.quadMaxLevel);
    t.rows.push_back({static_cast<long long>(k), rep.cStar, rep.kappaStar, rep.divergent,
                      static_cast<long long>(rep.refinementTrace.size()), rep.refinementTrace.back().second});
  }
  return t;
}

Table run_bi_check(const ExperimentConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const int n = cfg.samples;
  const int n_sd = std::max(1, n / 10);
  double det_gap = 0.0, order_violation = 0.0, wedge_gap = 0.0, resolvent_gap = 0.0;
  for (int i = 0; i < n; ++i) {
    const TwoForm4 F = random_two_form(rng, 2.0);
    const double tt = 5.0 * (2.0 * uniform01(rng) - 1.0);
    det_gap = std::max(det_gap, det_identity_gap(F));
    const auto s = sandwich(F);
    order_violation = std::max({order_violation, s.gms - s.bi, s.bi - s.hodge});
    const auto parts = sd_split(F);
    wedge_gap = std::max(wedge_gap, std::abs(wedge_square(F) - (parts.plus.norm2() - parts.minus.norm2())));
    resolvent_gap = std::max(resolvent_gap, resolvent_asym_gap(F, tt));
  }
  double flux_gap = 0.0, bi_hodge_gap = 0.0;
  for (int i = 0; i < n_sd; ++i) {
    const TwoForm4 F = random_selfdual(rng, 2.0, i % 2 == 1);
    flux_gap = std::max(flux_gap, (bi_el_residual(F) - to_matrix(F)).norm());
    const auto s = sandwich(F);
    bi_hodge_gap = std::max(bi_hodge_gap, std::abs(s.bi - s.hodge));
  }
  Table t;
  t.columns = {"check", "samples", "maxValue", "bound", "pass"};
  auto row = [&](const char* name, int count, double value, double bound) {
    t.rows.push_back({std::string(name), static_cast<long long>(count), value, bound, value <= bound});
  };
  row("det_identity_gap", n, det_gap, 1e-12);
  row("sandwich_order_violation", n, std::max(order_violation, 0.0), 0.0);
  row("wedge_selfdual_gap", n, wedge_gap, 1e-13);
  row("resolvent_gap", n, resolvent_gap, 1e-11);
  row("selfdual_flux_gap", n_sd, flux_gap, 1e-12);
  row("selfdual_bi_hodge_gap", n_sd, bi_hodge_gap, 1e-12);
  return t;
}

}  // namespace

ExperimentConfig parse_config(const Json& doc, const std::string& base_dir) {
  ExperimentConfig cfg;
  Checker checker(cfg, base_dir);
  checker.check(doc);
  if (!checker.diagnostics.empty()) {
    const auto& d = checker.diagnostics.front();
    throw ConfigError(d.path, d.message);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_file(path);
  Json doc;
  Diagnostic diag;
  if (!parse_text(text, doc, diag))
    throw ConfigError("", "line " + std::to_string(diag.line) + ", column " + std::to_string(diag.column) + ": " +
                              diag.message);
  return parse_config(doc, parent_dir(path));
}

std::vector<Diagnostic> validate_config_file(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ConfigError& e) {
    return {{"", e.what(), 0, 0}};
  }
  Json doc;
  Diagnostic diag;
  if (!parse_text(text, doc, diag)) return {diag};
  ExperimentConfig cfg;
  Checker checker(cfg, parent_dir(path));
  checker.check(doc);
  return checker.diagnostics;
}

Json resolved_config(const ExperimentConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["manifold"] = {{"n1", cfg.n1}, {"n2", cfg.n2}, {"period1", cfg.period1}, {"period2", cfg.period2}};
  Json metric;
  if (!cfg.metricTable.empty()) metric["table"] = cfg.metricTable;
  else metric["builtin"] = cfg.metricBuiltin;
  metric["angle_map"] = cfg.angleMap;
  j["metric"] = metric;
  j["k"] = cfg.k;
  j["class"] = {{"c", cfg.c}, {"kappa", cfg.kappa}, {"t", cfg.t}};
  j["solver"] = {{"grad_tol", cfg.solver.gradTol},
                 {"max_newton", cfg.solver.maxNewton},
                 {"max_cg", cfg.solver.maxCG},
                 {"shrink", cfg.solver.shrink},
                 {"sufficient_decrease", cfg.solver.sufficientDecrease}};
  j["quadrature"] = {{"tol", cfg.quadTol}, {"max_level", cfg.quadMaxLevel}};
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["theta_samples"] = cfg.thetaSamples;
  j["output"] = {{"path", cfg.outputPath}, {"format", cfg.outputFormat}};
  return j;
}

RunRecord run(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = resolved_config(cfg);
  rec.version = version_string();
  rec.command = cfg.command;
  if (cfg.command == "figure2") rec.payload = run_figure2(cfg);
  else if (cfg.command == "solve-torus") rec.payload = run_solve_torus(cfg);
  else if (cfg.command == "sweep-t") rec.payload = run_sweep_t(cfg);
  else if (cfg.command == "thresholds") rec.payload = run_thresholds(cfg);
  else if (cfg.command == "bi-check") rec.payload = run_bi_check(cfg);
  else throw ConfigError("command", "unknown command '" + cfg.command + "'");
  rec.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace gms
