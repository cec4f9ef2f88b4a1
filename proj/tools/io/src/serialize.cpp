#include "hydrolimit_io/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include "hydrolimit_io/csv.hpp"

namespace hydrolimit::io {

namespace {

json vec(Vec2 v) { return json::array({v.x, v.y}); }

template <class T, class F>
json array_of(const std::vector<T>& xs, F f) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(f(x));
  return a;
}

}  // namespace

json to_json(const CascadePlan& plan) {
  json j;
  j["N"] = plan.N;
  j["sigma"] = plan.sigma;
  j["step"] = plan.step;
  j["order"] = plan.order;
  j["side_convention"] = plan.side_convention;
  j["theta"] = plan.schedule.theta;
  j["phi"] = plan.schedule.phi;
  j["phi_hat"] = plan.schedule.phi_hat;
  j["centers"] = array_of(plan.centers, vec);
  j["radii"] = plan.radii;
  j["offsets"] = plan.offsets;
  j["windows"] = array_of(plan.windows, [](const Window& w) {
    return json::array({w.entry, w.exit});
  });
  return j;
}

json to_json(const CascadeVerification& v) {
  json j;
  j["ok"] = v.ok();
  j["checks"] = array_of(v.checks, [](const CascadeCheck& c) {
    return json{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"limit", c.limit},
                {"detail", c.detail}};
  });
  j["t_N_measured"] = v.t_N_measured;
  j["t_N_bound"] = v.t_N_bound;
  j["energy_drift"] = v.energy_drift;
  j["momentum_drift"] = v.momentum_drift;
  j["max_q_velocity_error"] = v.max_q_velocity_error;
  j["p_speed_error"] = v.p_speed_error;
  j["q_energy_before"] = v.q_energy_before;
  j["q_energy_after"] = v.q_energy_after;
  j["max_total_energy_error"] = v.max_total_energy_error;
  j["measured_windows"] = array_of(v.measured_windows, [](const Window& w) {
    return json::array({w.entry, w.exit});
  });
  return j;
}

json to_json(const EncounterRecord& e) {
  return json{{"k", e.k},
              {"impact", e.impact},
              {"incoming_speed", e.incoming_speed},
              {"target_deflection", e.target_deflection},
              {"measured_deflection", e.measured_deflection},
              {"side", e.side},
              {"flipped", e.flipped},
              {"p_velocity", vec(e.p_velocity)},
              {"q_velocity", vec(e.q_velocity)},
              {"p_velocity_error", e.p_velocity_error},
              {"q_velocity_error", e.q_velocity_error}};
}

json to_json(const W1Result& w) {
  json j{{"value", w.value}, {"mode", w.mode == W1Mode::exact ? "exact" : "sliced"}};
  if (w.mode == W1Mode::sliced) {
    j["directions"] = w.directions;
    j["seed"] = w.seed;
  }
  return j;
}

json to_json(const EulerFieldsReport& r, int N) {
  json j;
  j["max_abs_residual"] = r.max_abs_residual;
  j["max_abs_xi3"] = r.max_abs_xi3;
  j["xi3_flagged"] = r.xi3_flagged;
  j["snapshots"] = r.snapshots;
  j["dt"] = r.dt;
  j["residuals"] = array_of(r.residuals, [&](const LawResidual& l) {
    return json{{"phi_id", l.phi_id}, {"law", law_name(l.law)}, {"residual", l.residual},
                {"snapshots", r.snapshots}, {"N", N}};
  });
  return j;
}

json to_json(const NonuniquenessReport& r) {
  json j;
  j["coincide_at_zero"] = r.coincide_at_zero;
  j["separated_later"] = r.separated_later;
  j["threshold"] = r.threshold;
  j["rows"] = array_of(r.rows, [](const NonuniquenessRow& row) {
    return json{{"t", row.t}, {"sup_rho", row.sup_rho}, {"sup_u", row.sup_u}, {"sup_e", row.sup_e}};
  });
  j["two_layer_euler_max_residual"] = r.two_layer_euler.max_abs_residual;
  j["three_layer_euler_max_residual"] = r.three_layer_euler.max_abs_residual;
  return j;
}

json to_json(const FieldComparison& c) {
  return json{{"max_rho_error", c.max_rho_error}, {"max_u_error", c.max_u_error},
              {"max_e_error", c.max_e_error},     {"max_abs_xi3", c.max_abs_xi3},
              {"bins_compared", c.bins_compared}, {"bins_excluded", c.bins_excluded}};
}

json to_json(const PressurelessResidual& r) {
  return json{{"mass", r.mass}, {"momentum", vec(r.momentum)}, {"snapshots", r.snapshots},
              {"dt", r.dt}};
}

void write_measures_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snaps) {
  CsvWriter csv(path, {"t", "i", "x", "y", "vx", "vy", "w"});
  for (const auto& s : snaps) {
    for (std::size_t i = 0; i < s.m.size(); ++i) {
      csv.cell(s.t).cell(static_cast<long long>(i));
      csv.cell(s.m.x[i].x).cell(s.m.x[i].y).cell(s.m.v[i].x).cell(s.m.v[i].y).cell(s.m.w[i]);
      csv.end_row();
    }
  }
}

void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergyRow>& rows) {
  CsvWriter csv(path, {"t", "macro", "fluct", "total"});
  for (const auto& r : rows) csv.row({r.t, r.macroscopic, r.fluctuation, r.total});
}

void write_snapshots_1d_csv(const std::filesystem::path& path, const std::vector<System1D>& snaps) {
  const std::size_t n = snaps.empty() ? 0 : snaps.front().size();
  std::vector<std::string> header{"t"};
  for (std::size_t k = 1; k <= n; ++k) header.push_back("x_" + std::to_string(k));
  for (std::size_t k = 1; k <= n; ++k) header.push_back("u_" + std::to_string(k));
  CsvWriter csv(path, header);
  for (const auto& s : snaps) {
    csv.cell(s.time());
    for (std::size_t k = 0; k < n; ++k) csv.cell(s.position(k));
    for (std::size_t k = 0; k < n; ++k) csv.cell(s.velocity(k));
    csv.end_row();
  }
}

void write_events_csv(const std::filesystem::path& path, const std::vector<CollisionEvent>& events) {
  CsvWriter csv(path, {"t", "type", "indices"});
  for (const auto& e : events) {
    std::string idx;
    for (std::size_t k = 0; k < e.count; ++k) {
      idx += (k ? " " : "") + std::to_string(e.first + k + 1);
    }
    csv.cell(e.time).cell(collision_type_name(e.type)).cell(idx);
    csv.end_row();
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace hydrolimit::io
