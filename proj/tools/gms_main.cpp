// gms <command> --config <path> [--seed N] [--out <path>] [--format csv|json]
//
// Exit codes: 0 success, 2 invalid configuration or request, 3 numerical
// failure (non-convergence, quadrature precision), 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "gms/errors.hpp"
#include "gms/experiment.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  bool timing = false;
};

int print_diagnostics(const std::string& path, const std::string& format) {
  const auto diags = gms::validate_config_file(path);
  if (format == "json") {
    gms::Json arr = gms::Json::array();
    for (const auto& d : diags) {
      gms::Json j;
      j["path"] = d.path;
      j["message"] = d.message;
      if (d.line > 0) {
        j["line"] = d.line;
        j["column"] = d.column;
      }
      arr.push_back(j);
    }
    std::cout << arr.dump(2) << "\n";
  } else {
    for (const auto& d : diags) {
      if (d.line > 0) std::cout << path << ":" << d.line << ":" << d.column << ": " << d.message << "\n";
      else std::cout << (d.path.empty() ? path : d.path) << ": " << d.message << "\n";
    }
  }
  return diags.empty() ? 0 : kConfigExit;
}

int execute(const std::string& command, const Options& opt) {
  auto cfg = gms::load_config(opt.config);
  if (cfg.command != command)
    throw gms::ConfigError("command", "config is for '" + cfg.command + "' but '" + command + "' was requested");
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.out.empty()) cfg.outputPath = opt.out;
  if (!opt.format.empty()) cfg.outputFormat = opt.format;

  const auto rec = gms::run(cfg);
  auto emit = [&](std::ostream& os) {
    if (cfg.outputFormat == "json") gms::write_json(rec, os, opt.timing);
    else gms::write_csv(rec.payload, os);
  };
  if (cfg.outputPath.empty()) {
    emit(std::cout);
  } else {
    std::ofstream file(cfg.outputPath, std::ios::binary);
    if (!file) throw gms::ConfigError("output.path", "cannot write '" + cfg.outputPath + "'");
    emit(file);
  }
  std::cerr << "gms " << command << ": " << rec.payload.rows.size() << " rows in " << rec.wallSeconds << " s ("
            << rec.version << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Hodge / generalized minimal surface experiments"};
  app.set_version_flag("--version", std::string(gms::version_string()));
  app.require_subcommand(1);

  Options opt;
  const char* commands[][2] = {{"figure2", "closed-form |alpha_c| curves on the circle"},
                               {"solve-torus", "GMS minimizers on the conformal 2-torus"},
                               {"sweep-t", "tGMS minimizers across a t list"},
                               {"thresholds", "critical constants c* and kappa* per degree"},
                               {"bi-check", "seeded fuzzing of the Born-Infeld identities"},
                               {"validate", "check a config without running it"}};
  for (auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (std::string(name) != "validate") {
      sub->add_option("--seed", opt.seed, "override the config seed");
      sub->add_option("--out", opt.out, "output file (default: stdout)");
      sub->add_flag("--timing", opt.timing, "include the wall time in JSON output");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "validate") return print_diagnostics(opt.config, opt.format);
    return execute(command, opt);
  } catch (const gms::NonConvergenceError& e) {
    std::cerr << "gms " << command << ": " << e.what() << "\n";
    return kNumericExit;
  } catch (const gms::PrecisionError& e) {
    std::cerr << "gms " << command << ": " << e.what() << "\n";
    return kNumericExit;
  } catch (const gms::InternalError& e) {
    std::cerr << "gms " << command << ": " << e.what() << "\n";
    return kNumericExit;
  } catch (const gms::Error& e) {
    std::cerr << "gms " << command << ": " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "gms " << command << ": " << e.what() << "\n";
    return 1;
  }
}
