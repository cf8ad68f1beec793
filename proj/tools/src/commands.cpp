#include "gwr/cli/commands.hpp"

#include "gwr/gwr.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>

namespace gwr::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RankPolicy rank_policy(const GlobalOptions& g) {
  RankPolicy p;
  p.absolute_tol = g.tol_rank;
  return p;
}

Scenario load(const std::string& path, const GlobalOptions& g, std::ostream& err) {
  ParseOptions opt;
  opt.strict = g.strict;
  Scenario sc = load_scenario(path, opt);
  for (const auto& w : sc.warnings) err << "warning: " << path << ":" << w << '\n';
  return sc;
}

std::uint64_t effective_seed(const Scenario& sc, const GlobalOptions& g) {
  return g.seed ? *g.seed : sc.seed;
}

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json points(const Configuration& cfg) {
  json out = json::array();
  for (int i = 0; i < cfg.size(); ++i) out.push_back(vec(cfg.point(i)));
  return out;
}

json one_based(const std::vector<int>& rows) {
  json out = json::array();
  for (int r : rows) out.push_back(r + 1);
  return out;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
    return;
  }
  out << prefix << ',';
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (k) out << ';';
      out << (j[k].is_string() ? j[k].get<std::string>() : j[k].dump());
    }
  } else {
    out << (j.is_string() ? j.get<std::string>() : j.dump());
  }
  out << '\n';
}

void emit(const json& doc, const std::string& name, const GlobalOptions& g, std::ostream& out) {
  if (g.format == "csv") {
    out << "key,value\n";
    flatten(doc, "", out);
  } else {
    out << doc.dump(2) << '\n';
  }
  if (!g.out.empty()) {
    fs::create_directories(g.out);
    std::ofstream f(fs::path(g.out) / (name + ".json"));
    if (!f) throw InvalidArgument("cannot write to " + g.out);
    f << doc.dump(2) << '\n';
  }
}

json rigidity_json(const RigidityReport& r) {
  return json{{"rank", r.rank},
              {"threshold", r.threshold},
              {"num_constraints", r.num_constraints},
              {"is_giwr", r.is_giwr},
              {"is_minimal", r.is_minimal},
              {"e_empty", r.e_empty},
              {"singular_values", r.singular_values},
              {"sigma_max", r.sigma_max},
              {"rank_tolerance", r.rank_tolerance},
              {"trivial_basis_residual", r.trivial_basis_residual},
              {"span_rank", r.span_rank},
              {"span_deficient", r.span_deficient}};
}

json gains_json(const Gains& k) { return json{{"dist", k.dist}, {"angle", k.angle}}; }

json equilibrium_json(const EquilibriumReport& r) {
  return json{{"kind", to_string(r.kind)},
              {"grad_norm", r.grad_norm},
              {"err_norm", r.err_norm},
              {"collinearity", r.collinearity},
              {"hessian_spectrum", r.hessian_spectrum},
              {"min_eig", r.min_eig},
              {"restricted_min_eig", r.restricted_min_eig},
              {"near_zero_eigs", r.near_zero_eigs},
              {"symmetry_residual", r.symmetry_residual},
              {"symmetry_ok", r.symmetry_ok},
              {"e_matrix_spectrum", r.e_matrix_spectrum},
              {"e_matrix_min_eig", r.e_matrix_min_eig}};
}

}  // namespace

int cmd_analyze(const std::string& scenario, const GlobalOptions& g, std::ostream& out,
                std::ostream& err) {
  const Scenario sc = load(scenario, g, err);
  const RigidityReport rep = classify(sc.spec, sc.initial, rank_policy(g));
  json doc = rigidity_json(rep);
  doc["scenario"] = sc.name;
  doc["n"] = sc.spec.n;
  doc["d"] = sc.spec.d;
  json sensing = json::array();
  for (const auto& [a, b] : sensing_graph(sc.spec).edges) sensing.push_back({a + 1, b + 1});
  doc["sensing_edges"] = sensing;
  if (rep.is_giwr) {
    const ConstraintPartition part = partition_constraints(sc.spec, sc.initial, rank_policy(g));
    doc["partition"] = json{{"minimal", one_based(part.minimal)},
                            {"remainder", one_based(part.remainder)}};
  } else {
    doc["partition"] = nullptr;
  }
  emit(doc, "analyze", g, out);
  return rep.is_giwr ? 0 : 2;
}

int cmd_simulate(const std::string& scenario, const GlobalOptions& g, const SimulateOptions& s,
                 std::ostream& out, std::ostream& err) {
  const Scenario sc = load(scenario, g, err);
  SimConfig cfg = sc.sim;
  if (s.t_max) cfg.t_max = *s.t_max;
  if (s.record_every) cfg.record_every = *s.record_every;
  const std::uint64_t seed = effective_seed(sc, g);
  Configuration start = sc.initial;
  if (s.perturb) {
    if (!sc.desired) throw InvalidArgument("--perturb needs a 'desired' block in the scenario");
    start = perturbed(*sc.desired, *s.perturb, seed);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const SimulationTrace trace = simulate(sc.spec, start, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string dir = g.out.empty() ? std::string("gwr-out") : g.out;
  fs::create_directories(dir);
  write_trace(trace, dir);

  const LogErrorFit fit = fit_log_error(trace);
  json summary{{"scenario", sc.name},
               {"flag", to_string(trace.flag)},
               {"final_err", trace.final_error_norm()},
               {"final_time", trace.times.back()},
               {"steps", trace.steps},
               {"slope_log_err", fit.samples >= 3 ? json(fit.slope) : json(nullptr)},
               {"r_squared_log_err", fit.samples >= 3 ? json(fit.r_squared) : json(nullptr)},
               {"fit_samples", fit.samples},
               {"centroid_drift", monitor_centroid(trace)},
               {"scale_drift", sc.spec.has_distances() ? json(nullptr)
                                                       : json(monitor_scale(trace))},
               {"cp_rank_constant", monitor_cp_rank(trace)},
               {"rw_rank_constant",
                cfg.track_rw_rank ? json(monitor_rw_rank(trace)) : json(nullptr)},
               {"lyapunov_violations", lyapunov_violations(trace)},
               {"min_pair_dist", nullable([&] {
                  double m = INFINITY;
                  for (const auto& x : trace.monitors) m = std::min(m, x.min_pair_dist);
                  return m;
                }())},
               {"final_positions", points(trace.final_configuration())},
               {"dt", cfg.dt},
               {"t_max", cfg.t_max},
               {"err_tol", cfg.err_tol},
               {"grad_tol", cfg.grad_tol},
               {"integrator", to_string(cfg.integrator)},
               {"record_every", cfg.record_every},
               {"gains", gains_json(cfg.gains)},
               {"seed", seed},
               {"perturb", s.perturb ? json(*s.perturb) : json(nullptr)}};
  {
    std::ofstream f(fs::path(dir) / "summary.json");
    f << summary.dump(2) << '\n';
    std::ofstream t(fs::path(dir) / "timing.json");
    t << json{{"wall_time", wall}}.dump(2) << '\n';
  }
  summary["wall_time"] = wall;
  GlobalOptions printed = g;
  printed.out.clear();
  emit(summary, "summary", printed, out);
  return 0;
}

int cmd_montecarlo(const std::string& scenario, const GlobalOptions& g,
                   const MonteCarloOptions& m, std::ostream& out, std::ostream& err) {
  const Scenario sc = load(scenario, g, err);
  BasinOptions opt;
  opt.mode = m.collinear ? SamplingMode::collinear : SamplingMode::random;
  opt.threads = m.threads;
  const std::uint64_t seed = effective_seed(sc, g);
  const BasinStats st = monte_carlo_basin(sc.spec, m.trials, seed, sc.sim, opt);

  json doc{{"scenario", sc.name},
           {"trials", st.trials},
           {"seed", st.seed},
           {"mode", m.collinear ? "collinear" : "random"},
           {"n_desired", st.n_desired},
           {"n_incorrect", st.n_incorrect},
           {"n_horizon", st.n_horizon},
           {"n_degenerate", st.n_degenerate},
           {"mean_convergence_time", st.mean_convergence_time},
           {"box", {-st.half_width, st.half_width}},
           {"convergence_rate", st.trials ? double(st.n_desired) / st.trials : 0.0}};
  if (m.details) {
    json rows = json::array();
    for (const auto& o : st.outcomes) {
      rows.push_back(json{{"trial", o.trial},
                          {"flag", to_string(o.flag)},
                          {"time", o.time},
                          {"final_err", o.final_err},
                          {"final_grad", o.final_grad},
                          {"cp_rank", o.cp_rank},
                          {"cp_rank_constant", o.cp_rank_constant},
                          {"initial", points(o.initial)},
                          {"final", points(o.final)}});
    }
    doc["outcomes"] = rows;
  }
  emit(doc, "montecarlo", g, out);
  return 0;
}

GradientCheck check_gradient(const FrameworkSpec& spec, int samples, std::uint64_t seed,
                             const JacobianFn& jacobian) {
  if (samples <= 0) throw InvalidArgument("gradient check needs at least one sample");
  require_valid(spec);
  GradientCheck out;
  out.samples = samples;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Configuration cfg = sample_configuration(spec, rng, 10.0, 1.0);
    out.max_error = std::max(out.max_error, jacobian_fd_error(spec, cfg, jacobian));
  }
  return out;
}

int cmd_check_gradient(const std::string& scenario, int samples, const GlobalOptions& g,
                       std::ostream& out, std::ostream& err) {
  const Scenario sc = load(scenario, g, err);
  const GradientCheck chk = check_gradient(sc.spec, samples, effective_seed(sc, g));
  json doc{{"scenario", sc.name},     {"samples", chk.samples},     {"seed", chk.seed},
           {"max_error", chk.max_error}, {"tolerance", chk.tolerance}, {"pass", chk.pass()}};
  emit(doc, "check-gradient", g, out);
  return chk.pass() ? 0 : 2;
}

int cmd_equilibrium(const std::string& scenario, const GlobalOptions& g,
                    const EquilibriumOptions& e, std::ostream& out, std::ostream& err) {
  const Scenario sc = load(scenario, g, err);
  Configuration cfg = sc.initial;
  json doc{{"scenario", sc.name}};
  if (e.settle) {
    const SimulationTrace tr = simulate(sc.spec, sc.initial, sc.sim);
    cfg = tr.final_configuration();
    doc["settle"] = json{{"flag", to_string(tr.flag)}, {"time", tr.times.back()}};
  }
  const EquilibriumReport rep = classify_equilibrium(sc.spec, cfg, {}, sc.sim.gains);
  doc.update(equilibrium_json(rep));
  doc["configuration"] = points(cfg);
  if (sc.spec.n == 3 && sc.spec.d == 2 && rep.collinearity <= EquilibriumTolerances{}.tol_col) {
    const BlockStructure bs = block_structure_check(sc.spec, cfg, {}, sc.sim.gains);
    doc["block_structure"] = json{{"off_block_residual", bs.off_block_residual},
                                  {"j_max", bs.j_max},
                                  {"e_block_residual", bs.e_block_residual}};
  }
  emit(doc, "equilibrium", g, out);
  return 0;
}

int cmd_plotdata(const std::string& trace_dir, const GlobalOptions& g, std::ostream& out,
                 std::ostream&) {
  const fs::path in(trace_dir);
  for (const char* f : {kPositionsFile, kErrorsFile}) {
    if (!fs::exists(in / f)) throw InvalidArgument("missing " + (in / f).string());
  }
  const CsvTable pos = read_csv((in / kPositionsFile).string());
  const CsvTable errs = read_csv((in / kErrorsFile).string());
  const int d = static_cast<int>(pos.header.size()) - 2;
  if (d != 2 && d != 3) throw ParseError("positions.csv must have 2 or 3 coordinate columns");
  if (pos.rows.empty()) throw ParseError("positions.csv has no rows");

  const fs::path dir = g.out.empty() ? in / "plot" : fs::path(g.out);
  fs::create_directories(dir);

  std::map<int, std::ofstream> agents;
  for (const auto& row : pos.rows) {
    const int k = static_cast<int>(row[1]);
    auto it = agents.find(k);
    if (it == agents.end()) {
      it = agents.emplace(k, std::ofstream(dir / ("agent_" + std::to_string(k) + ".dat"))).first;
      it->second << (d == 2 ? "# t x y\n" : "# t x y z\n");
    }
    it->second << format_double(row[0]);
    for (int c = 0; c < d; ++c) it->second << ' ' << format_double(row[2 + c]);
    it->second << '\n';
  }

  std::map<int, std::ofstream> series;
  std::map<double, double> norm_sq;
  for (const auto& row : errs.rows) {
    const int c = static_cast<int>(row[1]);
    auto it = series.find(c);
    if (it == series.end()) {
      it = series.emplace(c, std::ofstream(dir / ("error_" + std::to_string(c) + ".dat"))).first;
      it->second << "# t error log10_abs_error\n";
    }
    const double v = row[2];
    it->second << format_double(row[0]) << ' ' << format_double(v) << ' '
               << format_double(v != 0.0 ? std::log10(std::abs(v)) : -INFINITY) << '\n';
    norm_sq[row[0]] += v * v;
  }
  {
    std::ofstream f(dir / "error_norm.dat");
    f << "# t norm log10_norm\n";
    for (const auto& [t, s] : norm_sq) {
      const double nv = std::sqrt(s);
      f << format_double(t) << ' ' << format_double(nv) << ' '
        << format_double(nv > 0.0 ? std::log10(nv) : -INFINITY) << '\n';
    }
  }
  {
    const int na = static_cast<int>(agents.size());
    const int nc = static_cast<int>(series.size());
    std::ofstream f(dir / "plot.gp");
    f << "set terminal pngcairo size 900,700\n"
      << "set output 'trajectories.png'\n";
    if (d == 2) {
      f << "set size ratio -1\n"
        << "plot for [k=1:" << na << "] sprintf('agent_%d.dat', k) using 2:3 with lines title "
        << "sprintf('agent %d', k)\n";
    } else {
      f << "set view equal xyz\n"
        << "splot for [k=1:" << na << "] sprintf('agent_%d.dat', k) using 2:3:4 with lines "
        << "title sprintf('agent %d', k)\n";
    }
    f << "set output 'errors.png'\n"
      << "set size noratio\n"
      << "set logscale y\n"
      << "set xlabel 't'\n"
      << "plot for [c=1:" << nc << "] sprintf('error_%d.dat', c) using 1:(abs($2)) with lines "
      << "title sprintf('e_%d', c), 'error_norm.dat' using 1:2 with lines lw 2 title '|e|'\n";
  }

  json doc{{"agents", agents.size()},
           {"constraints", series.size()},
           {"samples_per_agent", pos.rows.size() / std::max<std::size_t>(agents.size(), 1)},
           {"directory", dir.string()}};
  GlobalOptions printed = g;
  printed.out.clear();
  emit(doc, "plotdata", printed, out);
  return 0;
}

int cmd_run(const std::string& scenario, const GlobalOptions& g, std::ostream& out,
            std::ostream& err) {
  const Scenario sc = load(scenario, g, err);
  if (!sc.experiment) throw InvalidArgument("scenario has no 'experiment' block");
  const Experiment& ex = *sc.experiment;
  auto flag = [&](const char* key) { return ex.text(key).value_or("false") == "true"; };
  if (ex.type == "analyze") return cmd_analyze(scenario, g, out, err);
  if (ex.type == "simulate") {
    SimulateOptions s;
    s.t_max = ex.number("t_max");
    if (auto r = ex.number("record_every")) s.record_every = static_cast<int>(*r);
    s.perturb = ex.number("perturb");
    return cmd_simulate(scenario, g, s, out, err);
  }
  if (ex.type == "montecarlo") {
    MonteCarloOptions m;
    if (auto t = ex.number("trials")) m.trials = static_cast<int>(*t);
    m.collinear = flag("collinear");
    m.details = flag("details");
    return cmd_montecarlo(scenario, g, m, out, err);
  }
  if (ex.type == "check-gradient") {
    return cmd_check_gradient(scenario, static_cast<int>(ex.number("samples").value_or(50)), g,
                              out, err);
  }
  EquilibriumOptions e;
  e.settle = flag("settle");
  return cmd_equilibrium(scenario, g, e, out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized weak rigidity analysis and formation-control simulation"};
  app.name("gwr");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  double tol_rank = 0.0;
  auto* seed_opt = app.add_option("--seed", seed, "Seed overriding the scenario's sim.seed");
  auto* tol_opt = app.add_option("--tol-rank", tol_rank, "Absolute singular-value cutoff for rank");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--strict", g.strict, "Reject unknown scenario keys");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string path;
  int samples = 50;
  SimulateOptions so;
  MonteCarloOptions mo;
  EquilibriumOptions eo;
  double t_max = 0.0, perturb = 0.0;
  int record_every = 1;

  auto* analyze = app.add_subcommand("analyze", "Rigidity classification of the initial configuration");
  analyze->add_option("scenario", path)->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Integrate the gradient flow and write traces");
  simulate_cmd->add_option("scenario", path)->required();
  auto* tmax_opt = simulate_cmd->add_option("--t-max", t_max, "Override sim.t_max");
  auto* rec_opt = simulate_cmd->add_option("--record-every", record_every, "Override sim.record_every");
  auto* pert_opt = simulate_cmd->add_option(
      "--perturb", perturb, "Start from 'desired' displaced by this fraction of its diameter");

  auto* mc = app.add_subcommand("montecarlo", "Basin statistics from random starts (3 agents, 2D)");
  mc->add_option("scenario", path)->required();
  mc->add_option("--trials", mo.trials, "Number of trials")->check(CLI::NonNegativeNumber);
  mc->add_flag("--collinear", mo.collinear, "Draw collinear initial configurations");
  mc->add_option("--threads", mo.threads, "Worker threads (0 = all cores)");
  mc->add_flag("--details", mo.details, "Include per-trial outcomes");

  auto* grad = app.add_subcommand("check-gradient", "Analytic vs finite-difference Jacobian");
  grad->add_option("scenario", path)->required();
  grad->add_option("--samples", samples, "Random configurations to test");

  auto* eq = app.add_subcommand("equilibrium", "Classify the configuration as an equilibrium");
  eq->add_option("scenario", path)->required();
  eq->add_flag("--settle", eo.settle, "Simulate first and classify the final configuration");

  auto* plot = app.add_subcommand("plotdata", "Turn a trace directory into gnuplot data files");
  plot->add_option("trace_dir", path)->required();

  auto* runc = app.add_subcommand("run", "Run the scenario's experiment block");
  runc->add_option("scenario", path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  if (seed_opt->count()) g.seed = seed;
  if (tol_opt->count()) g.tol_rank = tol_rank;
  if (tmax_opt->count()) so.t_max = t_max;
  if (rec_opt->count()) so.record_every = record_every;
  if (pert_opt->count()) so.perturb = perturb;

  try {
    if (analyze->parsed()) return cmd_analyze(path, g, out, err);
    if (simulate_cmd->parsed()) return cmd_simulate(path, g, so, out, err);
    if (mc->parsed()) return cmd_montecarlo(path, g, mo, out, err);
    if (grad->parsed()) return cmd_check_gradient(path, samples, g, out, err);
    if (eq->parsed()) return cmd_equilibrium(path, g, eo, out, err);
    if (plot->parsed()) return cmd_plotdata(path, g, out, err);
    if (runc->parsed()) return cmd_run(path, g, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace gwr::cli
