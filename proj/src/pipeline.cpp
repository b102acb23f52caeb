#include "swmode/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "swmode/errors.hpp"

namespace swmode {

std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
  return w;
}

namespace {

// Channel-averaged tone power on short blocks (Goertzel-style projection).
std::vector<double> block_band_power(const Recording& rec, double freq_hz, int block) {
  const std::size_t n_samples = rec.n_samples();
  const int n_blocks = static_cast<int>(n_samples) / block;
  const double fs = rec.meta.sample_rate_hz;
  std::vector<double> power(n_blocks, 0.0);
  for (int b = 0; b < n_blocks; ++b) {
    for (const auto& ch : rec.channels) {
      std::complex<double> acc(0.0, 0.0);
      for (int i = 0; i < block; ++i) {
        const double t = (b * block + i) / fs;
        const double phase = -2.0 * std::numbers::pi * freq_hz * t;
        acc += static_cast<double>(ch[b * block + i]) *
               std::complex<double>(std::cos(phase), std::sin(phase));
      }
      power[b] += std::norm(acc);
    }
  }
  return power;
}

struct ToneBurst {
  double center_s = 0.0;
};

// Runs of above-threshold blocks with at least the minimum dwell.
std::vector<ToneBurst> detect_bursts(const std::vector<double>& power, double block_s,
                                     double threshold_factor, double min_dwell_s,
                                     double peak_fraction) {
  std::vector<double> sorted = power;
  std::sort(sorted.begin(), sorted.end());
  const double noise_floor = sorted[sorted.size() / 2];
  const double peak = sorted.back();
  const double threshold =
      std::max({threshold_factor * noise_floor, peak_fraction * peak, 1e-300});
  const int min_blocks = std::max(1, static_cast<int>(std::round(min_dwell_s / block_s)));

  std::vector<ToneBurst> bursts;
  int run_start = -1;
  for (int b = 0; b <= static_cast<int>(power.size()); ++b) {
    const bool on = b < static_cast<int>(power.size()) && power[b] > threshold;
    if (on && run_start < 0) run_start = b;
    if (!on && run_start >= 0) {
      if (b - run_start >= min_blocks)
        bursts.push_back({0.5 * (run_start + b) * block_s});
      run_start = -1;
    }
  }
  return bursts;
}

}  // namespace

SnapshotSet extract_coefficients(const Recording& rec, const ExtractOptions& opts) {
  rec.meta.validate();
  if (rec.channels.size() != rec.meta.hydrophone_depths.size())
    throw DimensionMismatch("extract_coefficients: channel count does not match meta");
  const double fs = rec.meta.sample_rate_hz;
  const std::size_t n_samples = rec.n_samples();

  SnapshotSet set;
  set.depths = rec.meta.hydrophone_depths;

  // Clip scan once per recording.
  bool clipped = false;
  for (const auto& ch : rec.channels)
    for (float s : ch)
      if (std::abs(s) >= rec.meta.clip_level) {
        clipped = true;
        break;
      }
  if (clipped) set.warnings.push_back("ClippedSignal: samples at the clip level");

  const int n_window = static_cast<int>(std::round(rec.meta.window_duration_s * fs));
  const std::vector<double> window = hann_window(n_window);
  const int block = std::max(1, static_cast<int>(std::round(opts.block_s * fs)));

  // Detect (or take) tone centers per frequency first, so missing repetitions
  // can be reported against the other tones of the train.
  std::vector<std::vector<double>> all_centers;
  for (double freq : rec.meta.frequencies_hz) {
    std::vector<double>& centers = all_centers.emplace_back();
    if (!rec.meta.tone_onsets_s.empty()) {
      for (double onset : rec.meta.tone_onsets_s)
        centers.push_back(onset + 0.5 * rec.meta.tone_duration_s);
    } else {
      const std::vector<double> power = block_band_power(rec, freq, block);
      for (const ToneBurst& burst :
           detect_bursts(power, static_cast<double>(block) / fs, opts.threshold_factor,
                         opts.min_dwell_s, opts.peak_fraction))
        centers.push_back(burst.center_s);
    }
  }
  std::size_t expected = 0;
  for (const auto& centers : all_centers) expected = std::max(expected, centers.size());

  for (std::size_t fi = 0; fi < rec.meta.frequencies_hz.size(); ++fi) {
    const double freq = rec.meta.frequencies_hz[fi];
    const std::vector<double>& centers = all_centers[fi];
    if (centers.size() < expected) {
      std::ostringstream msg;
      msg << "ToneNotFound: " << freq << " Hz, found " << centers.size() << " of "
          << expected << " repetitions";
      set.warnings.push_back(msg.str());
    }

    int rep = 0;
    for (double center : centers) {
      const long start = std::lround(center * fs) - n_window / 2;
      if (start < 0 || start + n_window > static_cast<long>(n_samples)) {
        std::ostringstream msg;
        msg << "ToneNotFound: " << freq << " Hz burst at " << center
            << " s does not fit the analysis window; skipped";
        set.warnings.push_back(msg.str());
        continue;
      }
      Snapshot snap;
      snap.freq_hz = freq;
      snap.rep = rep++;
      snap.p.resize(rec.channels.size());
      for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        std::complex<double> acc(0.0, 0.0);
        for (int i = 0; i < n_window; ++i) {
          const double t = (start + i) / fs;
          const double phase = -2.0 * std::numbers::pi * freq * t;
          acc += window[i] * static_cast<double>(rec.channels[c][start + i]) *
                 std::complex<double>(std::cos(phase), std::sin(phase));
        }
        snap.p[c] = acc;
      }
      set.snapshots.push_back(std::move(snap));
    }
  }
  return set;
}

EmpiricalCorrelation empirical_correlation(const SnapshotSet& snaps, double freq_hz,
                                           double bin_width) {
  const auto selected = snaps.at_frequency(freq_hz);
  if (selected.empty())
    throw InsufficientData("empirical_correlation: no snapshots at this frequency");
  const int n_h = snaps.n_hydrophones();
  if (n_h < 2) throw InsufficientData("empirical_correlation: need >= 2 hydrophones");

  if (bin_width <= 0.0) {
    bin_width = (snaps.depths.back() - snaps.depths.front()) / (n_h - 1);
  }
  const double max_lag = snaps.depths.back() - snaps.depths.front();
  const int n_bins = static_cast<int>(std::round(max_lag / bin_width)) + 1;

  std::vector<std::complex<double>> acc(n_bins, {0.0, 0.0});
  std::vector<long> counts(n_bins, 0);
  for (const Snapshot* snap : selected) {
    for (int a = 0; a < n_h; ++a) {
      for (int b = a; b < n_h; ++b) {
        const double lag = std::abs(snaps.depths[b] - snaps.depths[a]);
        const int bin = static_cast<int>(std::round(lag / bin_width));
        if (bin >= n_bins) continue;
        acc[bin] += std::conj(snap->p[a]) * snap->p[b];
        counts[bin] += 1;
      }
    }
  }

  EmpiricalCorrelation out;
  out.low_sample_warning = selected.size() < 8;
  out.pair_counts = counts;
  if (counts[0] == 0 || acc[0].real() <= 0.0)
    throw InsufficientData("empirical_correlation: empty zero-lag bin");
  const double zero_lag = acc[0].real() / static_cast<double>(counts[0]);
  out.curve.zero_lag = zero_lag;
  for (int b = 0; b < n_bins; ++b) {
    if (counts[b] == 0) continue;
    out.curve.y_grid.push_back(b * bin_width);
    out.curve.values.push_back(acc[b].real() / static_cast<double>(counts[b]) / zero_lag);
  }
  return out;
}

CorrelationRadius empirical_radius(const EmpiricalCorrelation& corr) {
  return correlation_radius(corr.curve);
}

double empirical_scintillation(const SnapshotSet& snaps, double freq_hz) {
  const auto selected = snaps.at_frequency(freq_hz);
  if (selected.size() < 2)
    throw InsufficientData("empirical_scintillation: need >= 2 snapshots");
  const int n_h = snaps.n_hydrophones();
  double acc = 0.0;
  for (int h = 0; h < n_h; ++h) {
    double m2 = 0.0, m4 = 0.0;
    for (const Snapshot* snap : selected) {
      const double intensity = std::norm(snap->p[h]);
      m2 += intensity;
      m4 += intensity * intensity;
    }
    m2 /= static_cast<double>(selected.size());
    m4 /= static_cast<double>(selected.size());
    acc += (m4 - m2 * m2) / (m2 * m2);
  }
  return acc / n_h;
}

}  // namespace swmode
