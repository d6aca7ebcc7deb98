// Copyright 2026 The openkpz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OKL_EXPERIMENTS_HPP
#define OKL_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace okl {

// Experiment runner tying the modules into one verification story. Configs
// are single JSON documents; results are CSV plus a JSON summary with
// {criterion, value, tolerance, pass} rows and provenance (config hash,
// seed, version). Identical config + seed produces byte-identical files.

struct ExperimentConfig {
  std::string experiment;  // triple-check | pointwise | zn-convergence |
                           // weak-convergence | bounds | bessel
  double u = 1.0;
  double v = 1.0;
  double length = 1.0;
  std::vector<int> n_ladder;     // empty = per-experiment default
  long n_samples = 400000;       // lattice IS samples per rung
  long continuum_samples = 100000;
  int grid_points = 512;         // continuum path grid
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "results";
  std::map<std::string, double> tolerances;  // overrides of the defaults

  void validate() const;
  std::string canonical_json() const;
  std::uint64_t config_hash() const;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
};

struct CriterionResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;  // e.g. "exact" or "ess=34642"
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CriterionResult> criteria;
  std::vector<std::string> csv_lines;  // header + rows, deterministic

  bool all_pass() const;
  std::string summary_json() const;
  std::string csv_text() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes <out_dir>/<experiment>-<hash>.csv and .summary.json; returns the
/// CSV path.
std::string write_experiment_files(const ExperimentResult& result);

}  // namespace okl

#endif  // OKL_EXPERIMENTS_HPP
