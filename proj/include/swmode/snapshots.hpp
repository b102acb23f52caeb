#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace swmode {

/// Acquisition metadata carried next to raw recordings (JSON sidecar) and
/// snapshot sets.
struct RecordingMeta {
  int format_version = 1;
  double sample_rate_hz = 0.0;
  std::vector<double> hydrophone_depths;  ///< one per channel, sorted
  std::vector<double> frequencies_hz;     ///< pinger tones present in the recording
  double repetition_period_s = 0.0;
  double tone_duration_s = 0.0;
  double window_duration_s = 0.0;         ///< Hann analysis window
  std::vector<double> tone_onsets_s;      ///< optional: known onset of each repetition
  double clip_level = 1.0;                ///< full-scale amplitude for clip detection

  void validate() const;
};

/// One extracted complex field sample per hydrophone for a given tone burst.
struct Snapshot {
  double freq_hz = 0.0;
  int rep = 0;
  std::vector<std::complex<double>> p;  ///< one coefficient per hydrophone
};

struct SnapshotSet {
  int format_version = 1;
  std::vector<double> depths;  ///< hydrophone depths (m)
  std::vector<Snapshot> snapshots;
  std::vector<std::string> warnings;

  int n_hydrophones() const { return static_cast<int>(depths.size()); }
  std::vector<const Snapshot*> at_frequency(double freq_hz, double tol_hz = 1e-6) const;
};

/// Snapshot CSV: "# swmode snapshot format_version 1" comment line, then
/// header freq_hz,rep,hydro_index,depth_m,re,im with full-precision floats
/// (round trips are bit-identical).
void write_snapshot_csv(const SnapshotSet& set, const std::string& path);
SnapshotSet read_snapshot_csv(const std::string& path);

/// Raw multichannel recording: little-endian float32, channel-interleaved,
/// "SWRC" magic + version + channel count + sample count header. The JSON
/// sidecar (same path + ".json") carries RecordingMeta.
struct Recording {
  RecordingMeta meta;
  std::vector<std::vector<float>> channels;  ///< [channel][sample]

  std::size_t n_samples() const { return channels.empty() ? 0 : channels[0].size(); }
};

void write_recording(const Recording& rec, const std::string& path);
Recording read_recording(const std::string& path);

}  // namespace swmode
