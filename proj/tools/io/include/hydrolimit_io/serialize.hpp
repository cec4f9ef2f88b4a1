#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "hydrolimit/cascade.hpp"
#include "hydrolimit/collide1d.hpp"
#include "hydrolimit/hydro.hpp"
#include "hydrolimit/measures.hpp"
#include "hydrolimit/scattering.hpp"

namespace hydrolimit::io {

using nlohmann::json;

json to_json(const CascadePlan& plan);
json to_json(const CascadeVerification& v);
json to_json(const EncounterRecord& e);
json to_json(const W1Result& w);
json to_json(const EulerFieldsReport& r, int N);
json to_json(const NonuniquenessReport& r);
json to_json(const FieldComparison& c);
json to_json(const PressurelessResidual& r);

// Long format: t, i, x, y, vx, vy, w (one row per atom).
void write_measures_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snaps);
// t, macro, fluct, total
void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergyRow>& rows);
// t, then x_1..x_N, then u_1..u_N
void write_snapshots_1d_csv(const std::filesystem::path& path, const std::vector<System1D>& snaps);
// t, type, indices (space separated)
void write_events_csv(const std::filesystem::path& path, const std::vector<CollisionEvent>& events);

void write_json(const std::filesystem::path& path, const json& j);

}  // namespace hydrolimit::io
