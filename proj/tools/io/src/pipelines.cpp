#include "hydrolimit_io/pipelines.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/scenarios.hpp"
#include "hydrolimit_io/csv.hpp"

namespace hydrolimit::io {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kScenarios = {"ghost",  "reverse", "transverse",
                                          "layers", "scatter", "sweep"};

json config_json(const RunConfig& cfg) {
  return json{{"scenario", cfg.scenario},
              {"N", cfg.N},
              {"horizon", cfg.horizon},
              {"snapshots", cfg.snapshots},
              {"bins", cfg.bins},
              {"kind", cfg.kind},
              {"sigma", cfg.sigma},
              {"alphas", cfg.alphas},
              {"speeds", cfg.speeds},
              {"residual_snapshots", cfg.residual_snapshots},
              {"tol",
               {{"energy", cfg.tol.energy},
                {"momentum", cfg.tol.momentum},
                {"velocity", cfg.tol.velocity},
                {"q_energy", cfg.tol.q_energy},
                {"free_transport", cfg.tol.free_transport},
                {"residual", cfg.tol.residual},
                {"fields", cfg.tol.fields}}}};
}

json w1_metadata() {
  return json{{"exact_atom_limit", kExactW1AtomLimit},
              {"sliced_directions", kSlicedDirections},
              {"sliced_seed", kSlicedSeed}};
}

// Width 1/n grid aligned to multiples of the width, or default_bins.
Bins bins_for(const RunConfig& cfg, const EmpiricalMeasure& m) {
  if (cfg.bins == "default") return default_bins(m);
  const int n = std::stoi(cfg.bins);
  const double w = 1.0 / n;
  double xlo = m.x[0].x, xhi = xlo, ylo = m.x[0].y, yhi = ylo;
  for (const auto& p : m.x) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  auto edges = [w](double lo, double hi) {
    std::vector<double> e;
    for (double k = std::floor(lo / w); k <= std::floor(hi / w) + 1.0; k += 1.0) e.push_back(k * w);
    return e;
  };
  Bins b;
  b.x_edges = edges(xlo, xhi);
  if (m.dim == 2) b.y_edges = edges(ylo, yhi);
  return b;
}

std::vector<EnergyRow> profile(const RunConfig& cfg, const std::vector<Snapshot>& snaps) {
  std::vector<EnergyRow> rows;
  for (const auto& s : snaps) {
    const EnergySplit e = energy_split(s.m, bins_for(cfg, s.m));
    rows.push_back({s.t, e.macroscopic, e.fluctuation, e.total});
  }
  return rows;
}

fs::path prepare(const fs::path& dir) {
  fs::create_directories(dir);
  return dir;
}

json ghost_summary(const RunConfig& cfg, const CascadeBuild& build, const fs::path& dir) {
  const int N = build.plan.N;
  const CascadeVerification ver = verify_cascade(build);
  write_json(dir / "plan.json", to_json(build.plan));
  write_json(dir / "verification.json", to_json(ver));
  json enc = json::array();
  for (const auto& e : build.encounters) enc.push_back(to_json(e));
  write_json(dir / "encounters.json", enc);

  const auto times = uniform_times(-cfg.horizon, cfg.horizon, cfg.snapshots);
  const ScenarioSamples g = ghost_samples(build, times);
  write_measures_csv(dir / "measures.csv", g.snapshots);
  write_energy_csv(dir / "energy.csv", profile(cfg, g.snapshots));
  {
    CsvWriter csv(dir / "q_energy.csv", {"t", "q_kinetic"});
    for (const auto& s : g.snapshots) {
      double q = 0.0;
      for (std::size_t i = 1; i < s.m.size(); ++i) q += s.m.w[i] * norm2(s.m.v[i]);
      csv.row({s.t, q});
    }
  }

  const std::vector<double> w1_times{-1.0, 0.5, 1.0};
  const ScenarioSamples w = ghost_samples(build, w1_times);
  json w1 = json::array();
  CsvWriter csv(dir / "w1.csv", {"t", "w1", "mode"});
  for (std::size_t i = 0; i < w1_times.size(); ++i) {
    const auto limit = discretize_limit({LimitScenario::ghost, w1_times[i], N + 1});
    const W1Result r = w1_distance(w.snapshots[i].m, limit);
    json row = to_json(r);
    row["t"] = w1_times[i];
    w1.push_back(row);
    csv.cell(w1_times[i]).cell(r.value).cell(r.mode == W1Mode::exact ? "exact" : "sliced");
    csv.end_row();
  }

  double max_y = 0.0;
  for (std::size_t k = 1; k < build.plan.offsets.size(); ++k) {
    max_y = std::max(max_y, std::abs(build.plan.offsets[k]));
  }
  json failed = json::array();
  for (const auto& c : ver.checks) {
    if (!c.pass) failed.push_back(c.name);
  }
  const double drift = std::max(ver.energy_drift, g.energy_drift);
  const double mom = std::max(ver.momentum_drift, g.momentum_drift);
  return json{{"N", N},
              {"sigma", build.plan.sigma},
              {"step", build.plan.step},
              {"t_N_measured", ver.t_N_measured},
              {"t_N_bound", ver.t_N_bound},
              {"t_N_below_bound", ver.t_N_measured < ver.t_N_bound},
              {"verification_ok", ver.ok()},
              {"failed_checks", failed},
              {"energy_drift", drift},
              {"energy_ok", drift < cfg.tol.energy},
              {"momentum_drift", mom},
              {"momentum_ok", mom < cfg.tol.momentum},
              {"max_q_velocity_error", ver.max_q_velocity_error},
              {"p_speed_error", ver.p_speed_error},
              {"q_energy_before", ver.q_energy_before},
              {"q_energy_after", ver.q_energy_after},
              {"q_energy_after_expected", static_cast<double>(N) / (N + 1)},
              {"max_abs_y_Q", max_y},
              {"w1", w1}};
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (!kScenarios.count(cfg.scenario)) throw DomainError("unknown scenario '" + cfg.scenario + "'");
  if (cfg.scenario != "scatter") {
    if (cfg.N.empty()) throw DomainError("N is required");
    for (int n : cfg.N) {
      if (n < 1) throw DomainError("N must be >= 1 (got " + std::to_string(n) + ")");
    }
  }
  if (!(cfg.horizon > 0.0)) throw DomainError("horizon must be positive");
  if (cfg.snapshots < 2) throw DomainError("snapshot count must be >= 2");
  if (cfg.residual_snapshots < 2) throw DomainError("residual snapshot count must be >= 2");
  if (cfg.bins != "default") {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(cfg.bins, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cfg.bins.size() || n < 1) throw DomainError("bins must be 'default' or a positive count");
  }
  if (cfg.kind != "two" && cfg.kind != "three" && cfg.kind != "both") {
    throw DomainError("kind must be two, three or both");
  }
  if (!(cfg.sigma > 0.0 && cfg.sigma <= 1.0)) throw DomainError("sigma must lie in (0, 1]");
  if (cfg.alphas < 2) throw DomainError("alpha grid needs at least two points");
  for (double v : cfg.speeds) {
    if (!(v > 0.0)) throw DomainError("speeds must be positive");
  }
  if (cfg.threads < 0) throw DomainError("threads must be >= 0");
}

json run_ghost(const RunConfig& cfg, int N, const fs::path& dir) {
  prepare(dir);
  return ghost_summary(cfg, build_cascade(N), dir);
}

json run_reverse(const RunConfig& cfg, int N, const fs::path& dir) {
  prepare(dir);
  const CascadeBuild build = build_cascade(N);
  double H = build.plan.windows[N].exit + 1.0;
  if (cfg.horizon >= H) H = cfg.horizon + 0.5;
  const auto times = uniform_times(-cfg.horizon, cfg.horizon, cfg.snapshots);
  const ScenarioSamples r = reverse_samples(build, H, times);
  std::vector<Snapshot> q;
  for (const auto& s : r.snapshots) q.push_back({s.t, q_subsystem(s.m)});
  write_measures_csv(dir / "measures.csv", r.snapshots);
  const auto rows = profile(cfg, q);
  write_energy_csv(dir / "energy.csv", rows);

  json out{{"N", N},
           {"horizon_reversed_from", H},
           {"q_total_energy_first", rows.front().total},
           {"q_total_energy_last", rows.back().total},
           {"p_speed_last", norm(r.snapshots.back().m.v[0])},
           {"energy_drift", r.energy_drift},
           {"energy_ok", r.energy_drift < cfg.tol.energy},
           {"momentum_drift", r.momentum_drift},
           {"momentum_ok", r.momentum_drift < cfg.tol.momentum}};
  if (N % 2 == 0) {
    const std::vector<double> cmp{-0.5, 0.5};
    const ScenarioSamples a = reverse_samples(build, H, cmp);
    const ScenarioSamples b = transverse_samples(N, cmp);
    json w1 = json::array();
    for (std::size_t i = 0; i < cmp.size(); ++i) {
      json row = to_json(w1_distance(q_subsystem(a.snapshots[i].m), b.snapshots[i].m));
      row["t"] = cmp[i];
      w1.push_back(row);
    }
    out["w1_vs_transverse"] = w1;
  }
  return out;
}

json run_transverse(const RunConfig& cfg, int N, const fs::path& dir) {
  prepare(dir);
  const auto times = uniform_times(-cfg.horizon, cfg.horizon, cfg.snapshots);
  const ScenarioSamples s = transverse_samples(N, times);
  write_measures_csv(dir / "measures.csv", s.snapshots);
  const auto rows = profile(cfg, s.snapshots);
  write_energy_csv(dir / "energy.csv", rows);
  double worst = 0.0, fluct = 0.0;
  for (const auto& r : rows) {
    worst = std::max(worst, std::abs(r.total - 1.0));
    fluct = std::max(fluct, r.fluctuation);
  }
  return json{{"N", N},
              {"max_total_energy_deviation", worst},
              {"max_fluctuation_energy", fluct},
              {"energy_drift", s.energy_drift},
              {"energy_ok", s.energy_drift < cfg.tol.energy},
              {"momentum_drift", s.momentum_drift},
              {"momentum_ok", s.momentum_drift < cfg.tol.momentum}};
}

json run_layers(const RunConfig& cfg, int N, const fs::path& dir) {
  prepare(dir);
  std::vector<std::pair<LayerKind, int>> systems;
  if (cfg.kind == "two" || cfg.kind == "both") systems.push_back({LayerKind::two, N});
  if (cfg.kind == "three") systems.push_back({LayerKind::three, N});
  if (cfg.kind == "both") {
    systems.push_back({LayerKind::three, 3 * static_cast<int>(std::ceil(N / 2.0))});
  }
  const auto times = uniform_times(0.0, cfg.horizon, cfg.snapshots);
  json out{{"N", N}, {"systems", json::array()}};
  for (const auto& [kind, n] : systems) {
    const std::string name = kind == LayerKind::two ? "two" : "three";
    const System1D s0 = kind == LayerKind::two ? two_layer_init(n) : three_layer_init(n);
    Simulate1DOptions opt;
    opt.sample_times = times;
    const Simulation1D sim = simulate_1d(s0, cfg.horizon, opt);
    write_snapshots_1d_csv(dir / (name + "_snapshots.csv"), sim.snapshots);
    write_events_csv(dir / (name + "_events.csv"), sim.events);

    const double reach = (kind == LayerKind::two ? 1.0 : std::sqrt(1.5)) * cfg.horizon;
    const Bins bins = layer_bins(kind, n, -reach - 0.5, 1.0 + reach + 0.5);
    double disc = 0.0;
    FieldComparison worst;
    for (const auto& snap : sim.snapshots) {
      disc = std::max(disc, free_transport_discrepancy(snap, s0));
      const FieldComparison c = compare_layer_fields(kind, measure_of(snap), snap.time(), bins);
      worst.max_rho_error = std::max(worst.max_rho_error, c.max_rho_error);
      worst.max_u_error = std::max(worst.max_u_error, c.max_u_error);
      worst.max_e_error = std::max(worst.max_e_error, c.max_e_error);
      worst.max_abs_xi3 = std::max(worst.max_abs_xi3, c.max_abs_xi3);
      worst.bins_compared += c.bins_compared;
      worst.bins_excluded += c.bins_excluded;
    }
    const double field_tol = cfg.tol.fields > 0.0 ? cfg.tol.fields : 5.0 / n;
    const EulerFieldsReport euler = layer_euler_check(kind, n, std::max(1.0, cfg.horizon));
    write_json(dir / (name + "_euler.json"), to_json(euler, n));
    std::size_t triples = 0;
    for (const auto& e : sim.events) triples += e.type == CollisionType::triple;
    out["systems"].push_back(json{
        {"kind", name},
        {"N", n},
        {"events", sim.events.size()},
        {"triple_events", triples},
        {"free_transport_discrepancy", disc},
        {"free_transport_ok", disc < cfg.tol.free_transport},
        {"fields", to_json(worst)},
        {"fields_ok", worst.max_rho_error < field_tol && worst.max_u_error < field_tol &&
                          worst.max_e_error < field_tol && worst.max_abs_xi3 < field_tol},
        {"euler_max_residual", euler.max_abs_residual},
        {"euler_ok", euler.max_abs_residual < cfg.tol.residual}});
  }
  if (cfg.kind == "both") {
    std::vector<double> cmp{0.0, 0.25, 0.5, 0.75, 1.0};
    const NonuniquenessReport rep = nonuniqueness_report(systems[0].second, systems[1].second, cmp);
    write_json(dir / "nonuniqueness.json", to_json(rep));
    out["nonuniqueness"] = to_json(rep);
  }
  return out;
}

json scattering_table(const RunConfig& cfg, const fs::path& csv_path) {
  const PairPotential pot(cfg.sigma);
  CsvWriter csv(csv_path,
                {"alpha", "speed", "r_min", "phi", "theta", "T_measured", "T_bound", "flag"},
                {"profile=" + pot.profile().id(), "sigma=" + format_double(cfg.sigma)});
  bool all_below = true;
  int flagged = 0;
  double worst_theta = 0.0;
  for (double v : cfg.speeds) {
    for (int i = 0; i < cfg.alphas; ++i) {
      const double alpha = cfg.sigma * i / (cfg.alphas - 1);
      std::string flag = "ok";
      ScatteringResult r;
      try {
        r = scatter({alpha, v}, pot);
        if (r.quadrature_error > 1e-8) flag = "quadrature";
      } catch (const NumericalError& e) {
        flag = "error";
      }
      const TwoBodyEncounter e = two_body_encounter(alpha, v, cfg.sigma);
      if (!(e.duration < r.time_bound)) all_below = false;
      if (flag != "ok") ++flagged;
      // P stops in a head-on collision, so its direction is undefined there
      if (alpha > 0.0 && e.interacted) {
        worst_theta = std::max(worst_theta, std::abs(e.deflection - r.deflection));
      }
      csv.cell(alpha).cell(v).cell(r.r_min).cell(r.pericenter_angle).cell(r.deflection);
      csv.cell(e.duration).cell(r.time_bound).cell(flag);
      csv.end_row();
    }
  }
  return json{{"rows", static_cast<int>(cfg.speeds.size()) * cfg.alphas},
              {"all_T_below_bound", all_below},
              {"flagged_rows", flagged},
              {"max_deflection_mismatch", worst_theta}};
}

json run_scatter(const RunConfig& cfg, const fs::path& dir) {
  prepare(dir);
  return scattering_table(cfg, dir / "scattering.csv");
}

json run_sweep(const RunConfig& cfg, const fs::path& dir) {
  prepare(dir);
  const std::size_t n = cfg.N.size();
  std::vector<json> results(n);
  std::vector<std::vector<std::pair<std::string, PressurelessResidual>>> residuals(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const int N = cfg.N[i];
        const fs::path sub = prepare(dir / ("N_" + std::to_string(N)));
        const CascadeBuild build = build_cascade(N);
        results[i] = ghost_summary(cfg, build, sub);
        const auto times = uniform_times(-0.5, 1.0, cfg.residual_snapshots);
        const ScenarioSamples g = ghost_samples(build, times);
        double worst = 0.0;
        for (const auto& b : battery_2d()) {
          const PressurelessResidual r = residual_pressureless(g.snapshots, b.phi);
          residuals[i].push_back({b.id, r});
          worst = std::max({worst, std::abs(r.mass), norm(r.momentum)});
        }
        results[i]["max_pressureless_residual"] = worst;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_lock);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int threads = std::max(1, std::min(thread_cap(cfg.threads), static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  CsvWriter w1(dir / "w1_vs_N.csv", {"N", "t", "w1", "mode"});
  CsvWriter res(dir / "residual_vs_N.csv", {"N", "phi_id", "mass", "momentum_x", "momentum_y", "snapshots"});
  CsvWriter tn(dir / "tN_vs_N.csv", {"N", "t_N_measured", "t_N_bound", "max_abs_y_Q"});
  json out = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const int N = cfg.N[i];
    for (const auto& row : results[i]["w1"]) {
      w1.cell(static_cast<long long>(N)).cell(row["t"].get<double>()).cell(row["value"].get<double>());
      w1.cell(row["mode"].get<std::string>());
      w1.end_row();
    }
    for (const auto& [id, r] : residuals[i]) {
      res.cell(static_cast<long long>(N)).cell(id).cell(r.mass).cell(r.momentum.x).cell(r.momentum.y);
      res.cell(static_cast<long long>(r.snapshots));
      res.end_row();
    }
    tn.row({static_cast<double>(N), results[i]["t_N_measured"].get<double>(),
            results[i]["t_N_bound"].get<double>(), results[i]["max_abs_y_Q"].get<double>()});
    out.push_back(results[i]);
  }
  return out;
}

json run(const RunConfig& cfg) {
  validate(cfg);
  prepare(cfg.out);
  json summary{{"schema_version", kSummarySchemaVersion},
               {"tool_version", kToolVersion},
               {"scenario", cfg.scenario},
               {"config", config_json(cfg)},
               {"w1_settings", w1_metadata()}};
  if (cfg.scenario == "scatter") {
    summary["result"] = run_scatter(cfg, cfg.out);
  } else if (cfg.scenario == "sweep") {
    summary["results"] = run_sweep(cfg, cfg.out);
  } else {
    json results = json::array();
    for (int N : cfg.N) {
      const fs::path dir = cfg.N.size() == 1 ? cfg.out : cfg.out / ("N_" + std::to_string(N));
      if (cfg.scenario == "ghost") results.push_back(run_ghost(cfg, N, dir));
      else if (cfg.scenario == "reverse") results.push_back(run_reverse(cfg, N, dir));
      else if (cfg.scenario == "transverse") results.push_back(run_transverse(cfg, N, dir));
      else results.push_back(run_layers(cfg, N, dir));
    }
    summary["results"] = results;
  }
  write_json(cfg.out / "summary.json", summary);
  return summary;
}

json error_record(const std::string& type, const std::string& message) {
  return json{{"schema_version", kSummarySchemaVersion},
              {"tool_version", kToolVersion},
              {"error", {{"type", type}, {"message", message}}}};
}

int thread_cap(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  if (const char* env = std::getenv("HYDROLIMIT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

}  // namespace hydrolimit::io
