#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hydrolimit_io/serialize.hpp"

namespace hydrolimit::io {

inline constexpr int kSummarySchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.3.0";

struct Tolerances {
  double energy = 1e-6;
  double momentum = 1e-8;
  double velocity = 1e-4;
  double q_energy = 1e-6;
  double free_transport = 1e-10;
  double residual = 1e-4;
  double fields = 0.0;  // 0: 5/N
};

struct RunConfig {
  std::string scenario = "ghost";
  std::vector<int> N{8};
  double horizon = 1.0;
  int snapshots = 101;
  std::string bins = "default";  // default | <count>
  std::filesystem::path out = "hydrolimit-out";
  std::string kind = "two";  // layers: two | three | both
  // scatter
  double sigma = 0.1;
  int alphas = 11;
  std::vector<double> speeds{1.0};
  int residual_snapshots = 1501;
  int threads = 1;
  Tolerances tol;
};

// Throws DomainError on an invalid configuration.
void validate(const RunConfig& cfg);

// Runs the pipeline named by cfg.scenario, writes its artifacts under
// cfg.out and returns the summary (also written to cfg.out/summary.json).
json run(const RunConfig& cfg);

json run_ghost(const RunConfig& cfg, int N, const std::filesystem::path& dir);
json run_reverse(const RunConfig& cfg, int N, const std::filesystem::path& dir);
json run_transverse(const RunConfig& cfg, int N, const std::filesystem::path& dir);
json run_layers(const RunConfig& cfg, int N, const std::filesystem::path& dir);
json run_scatter(const RunConfig& cfg, const std::filesystem::path& dir);
json run_sweep(const RunConfig& cfg, const std::filesystem::path& dir);

// alpha, speed, r_min, phi, theta, T_measured, T_bound, flag rows.
json scattering_table(const RunConfig& cfg, const std::filesystem::path& csv_path);

// Error record for the summary stream.
json error_record(const std::string& type, const std::string& message);

// HYDROLIMIT_THREADS if set and positive, else `fallback`.
int thread_cap(int fallback);

}  // namespace hydrolimit::io
