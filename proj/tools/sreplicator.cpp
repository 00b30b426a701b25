// Command-line front end: analyze | classify | simulate | verify.
//
// Exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical
// failure. Every JSON output embeds a manifest whose "argv" replays the run
// bit-identically via `sreplicator --manifest FILE`.

#include "sreplicator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace sreplicator;

enum ExitCode { kOk = 0, kVerifyFailed = 1, kInputError = 2, kNumericalError = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + " is not valid JSON: " + e.what());
  }
}

Game load_game(const std::string& path) { return report::game_from_json(read_json_file(path)); }

void write_text(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw InputError("cannot write " + *path);
  out << text;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("--x0 expects a comma-separated list of numbers, got '" + item + "'");
    }
  }
  return out;
}

// x0 given on the command line; sums within 1e-6 of one are renormalized.
SimplexPoint parse_x0(const std::string& s, std::size_t n) {
  const auto v = parse_list(s);
  if (v.size() != n) throw InvariantError("x0 has length n");
  Vector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw InvariantError("x0 lies in the interior of the simplex");
    x(static_cast<Eigen::Index>(i)) = v[i];
  }
  if (std::abs(x.sum() - 1.0) > 1e-6) throw InvariantError("x0 sums to 1");
  return SimplexPoint::normalized(x);
}

struct Global {
  double tol_scale = 1.0;
  bool quiet = false;
  std::string timestamp;
  std::string manifest;

  double tol() const { return kDefaultTol * tol_scale; }
};

struct AnalyzeArgs {
  std::string game;
  std::optional<std::string> out;
};

struct SimulateArgs {
  std::string game;
  double t_final = 1e4;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  std::string x0;
  std::size_t stride = 0;  // 0 selects the default
  double burn_in = -1.0;
  std::size_t thin = 1;
  std::optional<std::string> out;
  std::optional<std::string> report;
};

struct VerifyArgs {
  std::string game;
  std::size_t runs = 8;
  double t_final = 1e4;
  std::uint64_t seed_base = 1;
  double dt = 1e-3;
  std::size_t stability_runs = 20;
  std::size_t workers = 0;
  std::optional<std::string> out;
};

json manifest(const Global& g, const std::string& command, const std::string& game_file, json config, json seeds,
              std::vector<std::string> argv) {
  return {{"tool", "sreplicator"},
          {"version", kVersion},
          {"command", command},
          {"game_file", game_file},
          {"config", std::move(config)},
          {"seeds", std::move(seeds)},
          {"timestamp", g.timestamp},
          {"argv", std::move(argv)}};
}

std::vector<std::string> global_argv(const Global& g) {
  return {"--tol-scale", format_double(g.tol_scale), "--timestamp", g.timestamp};
}

void append_out(std::vector<std::string>& argv, const char* flag, const std::optional<std::string>& path) {
  if (path) {
    argv.emplace_back(flag);
    argv.push_back(*path);
  }
}

int run_analyze(const Global& g, const AnalyzeArgs& a) {
  const Game game = load_game(a.game);
  json rep = report::analysis_report(game, g.tol());
  auto argv = global_argv(g);
  argv.insert(argv.end(), {"analyze", a.game});
  append_out(argv, "--out", a.out);
  rep["manifest"] = manifest(g, "analyze", a.game, {{"tol", g.tol()}}, json::array(), argv);
  write_text(a.out, rep.dump(2) + "\n");
  return kOk;
}

int run_classify(const Global& g, const AnalyzeArgs& a) {
  const Game game = load_game(a.game);
  json rep = report::classification_json(classify(game, g.tol()));
  auto argv = global_argv(g);
  argv.insert(argv.end(), {"classify", a.game});
  append_out(argv, "--out", a.out);
  rep["manifest"] = manifest(g, "classify", a.game, {{"tol", g.tol()}}, json::array(), argv);
  write_text(a.out, rep.dump(2) + "\n");
  return kOk;
}

int run_simulate(const Global& g, const SimulateArgs& a) {
  const Game game = load_game(a.game);
  SimConfig cfg(a.x0.empty() ? SimplexPoint::barycenter(game.n()) : parse_x0(a.x0, game.n()));
  cfg.t_final = a.t_final;
  cfg.dt = a.dt;
  cfg.seed = a.seed;
  cfg.record_stride = a.stride == 0 ? SimConfig::default_stride(a.t_final, a.dt) : a.stride;
  cfg.validate();
  const double burn_in = a.burn_in < 0.0 ? 0.01 * a.t_final : a.burn_in;
  if (!(burn_in < a.t_final)) throw InvariantError("burn_in < t_final");

  const Trajectory traj = simulate(game, cfg);
  const ClassificationReport cls = classify(game, g.tol());
  std::optional<DirichletParams> params;
  if (cls.label == Label::PositiveRecurrent && cls.certificate.dirichlet) params = cls.certificate.dirichlet;

  std::string x0_text;
  for (std::size_t i = 0; i < game.n(); ++i) x0_text += (i ? "," : "") + format_double(cfg.x0[i]);
  auto argv = global_argv(g);
  argv.insert(argv.end(), {"simulate", a.game, "--t-final", format_double(cfg.t_final), "--dt", format_double(cfg.dt),
                           "--seed", std::to_string(cfg.seed), "--x0", x0_text, "--stride",
                           std::to_string(cfg.record_stride), "--burn-in", format_double(burn_in), "--thin",
                           std::to_string(a.thin)});
  append_out(argv, "--out", a.out);
  append_out(argv, "--report", a.report);
  const json config = {{"t_final", cfg.t_final},   {"dt", cfg.dt},       {"seed", cfg.seed},
                       {"x0", report::to_json(cfg.x0.coords())}, {"record_stride", cfg.record_stride},
                       {"burn_in", burn_in},       {"thin", a.thin},     {"tol", g.tol()}};
  const json man = manifest(g, "simulate", a.game, config, json::array({cfg.seed}), argv);

  if (a.out) {
    std::ofstream csv(*a.out, std::ios::binary);
    if (!csv) throw InputError("cannot write " + *a.out);
    report::write_trajectory_csv(csv, traj);
    std::ofstream side(*a.out + ".manifest.json", std::ios::binary);
    side << man.dump(2) << "\n";
  }
  json rep = report::estimator_report(game, traj, burn_in, params, a.thin);
  rep["classification"] = to_string(cls.label);
  rep["records"] = traj.size();
  rep["manifest"] = man;
  write_text(a.report, rep.dump(2) + "\n");
  return kOk;
}

int run_verify(const Global& g, const VerifyArgs& a) {
  const Game game = load_game(a.game);
  VerifyOptions opt;
  opt.runs = a.runs;
  opt.t_final = a.t_final;
  opt.seed_base = a.seed_base;
  opt.dt = a.dt;
  opt.stability_runs = a.stability_runs;
  opt.workers = a.workers;
  opt.tol = g.tol();
  const VerifyReport vr = verify(game, opt);

  auto argv = global_argv(g);
  argv.insert(argv.end(), {"verify", a.game, "--runs", std::to_string(a.runs), "--t-final", format_double(a.t_final),
                           "--seed-base", std::to_string(a.seed_base), "--dt", format_double(a.dt),
                           "--stability-runs", std::to_string(a.stability_runs)});
  append_out(argv, "--out", a.out);
  const json config = {{"runs", opt.runs},
                       {"t_final", opt.t_final},
                       {"seed_base", opt.seed_base},
                       {"dt", opt.dt},
                       {"burn_in", opt.resolved_burn_in()},
                       {"record_stride", opt.stride},
                       {"stability_runs", opt.stability_runs},
                       {"stability_t_final", opt.stability_t_final},
                       {"tol", opt.tol}};
  json rep = report::verify_json(vr);
  rep["manifest"] = manifest(g, "verify", a.game, config, vr.seeds, argv);
  write_text(a.out, rep.dump(2) + "\n");

  if (!g.quiet) {
    std::fprintf(stderr, "%-28s %-6s %14s %12s\n", "check", "result", "value", "threshold");
    for (const auto& c : vr.checks) {
      std::fprintf(stderr, "%-28s %-6s %14.6g %12.6g\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.value,
                   c.threshold);
    }
    std::fprintf(stderr, "%s: %s (%s)\n", vr.passed() ? "PASS" : "FAIL", to_string(vr.classification.label),
                 to_string(vr.classification.certificate.rule));
  }
  return vr.passed() ? kOk : kVerifyFailed;
}

int run(std::vector<std::string> args, bool allow_manifest);

int replay(const std::string& path) {
  const json j = read_json_file(path);
  const json& m = j.contains("manifest") ? j["manifest"] : j;
  if (!m.contains("argv") || !m["argv"].is_array()) throw InputError(path + " holds no manifest argv");
  return run(m["argv"].get<std::vector<std::string>>(), false);
}

int run(std::vector<std::string> args, bool allow_manifest) {
  CLI::App app{"Stochastic replicator dynamics: analysis, classification, simulation and verification", "sreplicator"};
  app.set_version_flag("--version", kVersion);
  Global g;
  app.add_option("--tol-scale", g.tol_scale, "Multiplies the default tolerances")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress progress and tables on stderr");
  app.add_option("--timestamp", g.timestamp, "Timestamp recorded in the manifest (default: now, UTC)");
  if (allow_manifest) app.add_option("--manifest", g.manifest, "Re-run the command recorded in a manifest or report");
  app.require_subcommand(0, 1);
  app.fallthrough();  // global options may follow the subcommand

  AnalyzeArgs an, cl;
  auto* analyze = app.add_subcommand("analyze", "Static analysis of a game");
  analyze->add_option("game", an.game, "Game JSON file")->required();
  analyze->add_option("--out", an.out, "Write the report here instead of stdout");

  auto* classify_cmd = app.add_subcommand("classify", "Long-run classification with certificate");
  classify_cmd->add_option("game", cl.game, "Game JSON file")->required();
  classify_cmd->add_option("--out", cl.out, "Write the report here instead of stdout");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate one trajectory and report estimators");
  sim->add_option("game", sa.game, "Game JSON file")->required();
  sim->add_option("--t-final", sa.t_final, "Horizon")->capture_default_str();
  sim->add_option("--dt", sa.dt, "Time step")->capture_default_str();
  sim->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  sim->add_option("--x0", sa.x0, "Initial state, comma separated (default: barycenter)");
  sim->add_option("--stride", sa.stride, "Record every k-th step (default: keep at most 1e6 records)");
  sim->add_option("--burn-in", sa.burn_in, "Burn-in time for estimators (default: 1% of horizon)");
  sim->add_option("--thin", sa.thin, "Record thinning for the Dirichlet moment check")->check(CLI::PositiveNumber);
  sim->add_option("--out", sa.out, "Trajectory CSV file");
  sim->add_option("--report", sa.report, "Estimator report JSON file (default: stdout)");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Monte Carlo verification battery");
  ver->add_option("game", va.game, "Game JSON file")->required();
  ver->add_option("--runs", va.runs, "Independent runs")->capture_default_str()->check(CLI::PositiveNumber);
  ver->add_option("--t-final", va.t_final, "Horizon of each run")->capture_default_str();
  ver->add_option("--seed-base", va.seed_base, "Base seed; run r uses splitmix64(base + r)")->capture_default_str();
  ver->add_option("--dt", va.dt, "Time step")->capture_default_str();
  ver->add_option("--stability-runs", va.stability_runs, "Runs per strict equilibrium vertex")->capture_default_str();
  ver->add_option("--workers", va.workers, "Worker threads (0: hardware concurrency)");
  ver->add_option("--out", va.out, "Write the report here instead of stdout");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  if (!g.manifest.empty()) {
    if (!app.get_subcommands().empty()) throw InputError("--manifest cannot be combined with a subcommand");
    return replay(g.manifest);
  }
  if (g.timestamp.empty()) g.timestamp = utc_now();

  if (analyze->parsed()) return run_analyze(g, an);
  if (classify_cmd->parsed()) return run_classify(g, cl);
  if (sim->parsed()) return run_simulate(g, sa);
  if (ver->parsed()) return run_verify(g, va);
  std::cerr << app.help();
  return kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(std::move(args), true);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const InvariantError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
