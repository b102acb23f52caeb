#pragma once

#include <complex>
#include <string>
#include <vector>

#include "swmode/field_stats.hpp"
#include "swmode/snapshots.hpp"

namespace swmode {

struct ExtractOptions {
  double block_s = 0.05;          ///< short-time bandpower block for onset detection
  double threshold_factor = 4.0;  ///< 6 dB above the noise floor
  double min_dwell_s = 0.5;       ///< minimum tone duration to accept a detection
  /// Burst power must also exceed this fraction of the strongest block, which
  /// rejects leakage from the other tones of the train.
  double peak_fraction = 0.05;
};

/// Windowed Fourier extraction: for each pinger frequency and each detected
/// (or supplied) tone burst, coefficient = sum_t w(t) s(t) exp(-2 pi i f t)
/// over a Hann window centered in the tone. Onsets are detected from the
/// channel-averaged short-time bandpower unless meta.tone_onsets_s is set.
/// Missed repetitions are skipped with a ToneNotFound warning; samples at the
/// clip level raise a ClippedSignal warning.
SnapshotSet extract_coefficients(const Recording& rec, const ExtractOptions& opts = {});

/// Empirical spatial correlation at one frequency: average of conj(p_n) p_m
/// over hydrophone pairs binned by |z_n - z_m| (bin width = array spacing) and
/// over repetitions, normalized by the zero-lag bin; the real part is
/// reported. Throws InsufficientData without snapshots at the frequency.
struct EmpiricalCorrelation {
  CorrelationCurve curve;
  std::vector<long> pair_counts;  ///< complex products accumulated per bin
  bool low_sample_warning = false;
};

EmpiricalCorrelation empirical_correlation(const SnapshotSet& snaps, double freq_hz,
                                           double bin_width = 0.0);

CorrelationRadius empirical_radius(const EmpiricalCorrelation& corr);

/// Scintillation estimate: mean over hydrophones of
/// (<|p|^4> - <|p|^2>^2) / <|p|^2>^2 with empirical averages over repetitions.
double empirical_scintillation(const SnapshotSet& snaps, double freq_hz);

/// Hann window of n samples (symmetric).
std::vector<double> hann_window(int n);

}  // namespace swmode
