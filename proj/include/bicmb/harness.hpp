#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bicmb/analysis.hpp"
#include "bicmb/config.hpp"
#include "bicmb/phy.hpp"

namespace bicmb {

enum class Mode { Ber, Pep, Analyze, Correlate };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct ExperimentConfig {
  Mode mode = Mode::Ber;
  LinkConfig link;
  double profile_db = -7.0;  // last-to-first tap power for the exponential profile
  std::string out_dir = "out";
  int workers = 1;

  // ber
  std::uint64_t min_errors = 200;
  std::uint64_t max_bits = 10'000'000;  // trial cap, information bits per SNR point

  // pep
  AlphaSpectrum spectrum = AlphaSpectrum(2, 2, {1, 0, 1, 0});
  std::vector<int> rows_on = {0, 1};
  std::uint64_t pep_trials = 1'000'000;

  // analyze and predicted diversity
  int max_dH = 10;

  std::vector<double> slope_window = {15.0, 30.0};

  /// Every resolved setting as `key = value` lines, sorted by key.
  std::string echo() const;
};

/// Reads an experiment from a parsed file. Unknown keys are an error.
ExperimentConfig experiment_from(const ConfigFile& file, Mode mode);

struct BerPoint {
  double snr_db = 0.0;
  std::uint64_t trials = 0;  // information bits
  std::uint64_t bit_errors = 0;
  std::uint64_t frames = 0;
  double ber = 0.0;
  double ci95 = 0.0;
  bool hit_cap = false;     // stopped at the trial cap
  bool zero_errors = false; // ber is the 3.7 / trials upper bound
};

struct BerCurve {
  std::vector<BerPoint> points;
};

enum class StopDecision { Continue, Stop };

/// Stop once the error target is met or the trial cap is reached.
StopDecision stop_rule(std::uint64_t errors, std::uint64_t trials, const ExperimentConfig& config);

/// Finalizes rate and confidence radius (binomial normal approximation); zero
/// error points report 3.7 / trials.
void finalize_point(BerPoint& point, const ExperimentConfig& config);

/// BER sweep. Each frame draws its channel and noise from a stream derived
/// from (seed, SNR index, frame index); frames are computed in parallel
/// batches and accumulated in frame order, so results do not depend on the
/// worker count.
BerCurve run_ber(const ExperimentConfig& config);

/// High-SNR diversity the analysis module predicts for a link: grouped (or
/// L = M) links use the L = M spectrum analysis; an ungrouped link with
/// M > L is capped at Nr * Nt * L.
int predicted_diversity(const LinkConfig& link, int max_dH);

/// Diversity predicted for a spectrum placed on the given subcarriers: rows on
/// the same subcarrier are merged, correlated but distinct subcarriers keep
/// their full high-SNR diversity.
int predicted_pep_diversity(const AlphaSpectrum& a, const std::vector<int>& rows_on, int nt, int nr);

std::string ber_csv(const BerCurve& curve);
std::string pep_csv(const PepCurve& curve);
std::string spectra_csv(const DiversityReport& report);
std::string correlation_csv(const TapProfile& profile, int subcarriers, double profile_db);

/// Runs the configured mode and writes its artifacts (CSV, config_echo.txt,
/// summary or report) into config.out_dir.
void run(const ExperimentConfig& config);

}  // namespace bicmb
