#pragma once
#include <string>
#include <vector>

#include "batsv2x/baseline.hpp"
#include "batsv2x/trial.hpp"

namespace batsv2x::harness {

// Runs trials 1..n in parallel with shared options; results indexed by trial.
std::vector<TrialResult> run_many(const SimConfig& cfg, int n, const TrialOptions& opts,
                                  int workers = 0);

// Named experiment drivers; each writes one CSV under out_dir and returns the
// paths written. `experiment` is one of: speed, groupsize, rankcdf, delay,
// rate, dynamics, single.
std::vector<std::string> run_experiment(const SimConfig& cfg, const std::string& out_dir);

// CSV headers, exposed so tests can validate emitted schemas.
const std::vector<std::string>& speed_csv_header();
const std::vector<std::string>& groupsize_csv_header();
const std::vector<std::string>& rankcdf_csv_header();
const std::vector<std::string>& delay_csv_header();
const std::vector<std::string>& rate_csv_header();
const std::vector<std::string>& dynamics_csv_header();
const std::vector<std::string>& single_csv_header();

} // namespace batsv2x::harness
