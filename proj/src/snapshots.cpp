#include "swmode/snapshots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace swmode {

void RecordingMeta::validate() const {
  if (!(sample_rate_hz > 0.0))
    throw std::invalid_argument("RecordingMeta: sample_rate must be positive");
  if (hydrophone_depths.empty())
    throw std::invalid_argument("RecordingMeta: hydrophone_depths must be nonempty");
  if (frequencies_hz.empty())
    throw std::invalid_argument("RecordingMeta: frequencies must be nonempty");
  for (double f : frequencies_hz)
    if (!(sample_rate_hz > 2.0 * f))
      throw std::invalid_argument("RecordingMeta: sample rate must exceed twice every tone");
  if (!(window_duration_s > 0.0) || !(tone_duration_s >= window_duration_s))
    throw std::invalid_argument("RecordingMeta: need 0 < window duration <= tone duration");
}

std::vector<const Snapshot*> SnapshotSet::at_frequency(double freq_hz, double tol_hz) const {
  std::vector<const Snapshot*> out;
  for (const auto& s : snapshots)
    if (std::abs(s.freq_hz - freq_hz) <= tol_hz) out.push_back(&s);
  return out;
}

void write_snapshot_csv(const SnapshotSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_snapshot_csv: cannot open " + path);
  out << "# swmode snapshot format_version " << set.format_version << "\n";
  out << "freq_hz,rep,hydro_index,depth_m,re,im\n";
  char buf[256];
  for (const auto& s : set.snapshots) {
    for (std::size_t h = 0; h < s.p.size(); ++h) {
      std::snprintf(buf, sizeof(buf), "%.17g,%d,%zu,%.17g,%.17g,%.17g\n", s.freq_hz, s.rep, h,
                    set.depths[h], s.p[h].real(), s.p[h].imag());
      out << buf;
    }
  }
}

SnapshotSet read_snapshot_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_snapshot_csv: cannot open " + path);
  SnapshotSet set;
  std::string line;
  bool header_seen = false;
  // (freq, rep) pairs arrive grouped; rebuild snapshots in file order.
  Snapshot* cur = nullptr;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "format_version ";
      auto pos = line.find(tag);
      if (pos != std::string::npos)
        set.format_version = std::stoi(line.substr(pos + tag.size()));
      continue;
    }
    if (!header_seen) {
      if (line.rfind("freq_hz,", 0) != 0)
        throw std::runtime_error("read_snapshot_csv: unexpected header in " + path);
      header_seen = true;
      continue;
    }
    double freq, depth, re, im;
    int rep;
    std::size_t hydro;
    if (std::sscanf(line.c_str(), "%lg,%d,%zu,%lg,%lg,%lg", &freq, &rep, &hydro, &depth, &re,
                    &im) != 6)
      throw std::runtime_error("read_snapshot_csv: malformed row: " + line);
    if (!cur || cur->freq_hz != freq || cur->rep != rep) {
      set.snapshots.push_back(Snapshot{freq, rep, {}});
      cur = &set.snapshots.back();
    }
    if (hydro != cur->p.size())
      throw std::runtime_error("read_snapshot_csv: non-contiguous hydrophone index");
    cur->p.emplace_back(re, im);
    if (hydro >= set.depths.size()) set.depths.push_back(depth);
  }
  for (const auto& s : set.snapshots)
    if (s.p.size() != set.depths.size())
      throw std::runtime_error("read_snapshot_csv: inconsistent hydrophone count");
  return set;
}

namespace {

nlohmann::json meta_to_json(const RecordingMeta& meta) {
  nlohmann::json j;
  j["format_version"] = meta.format_version;
  j["sample_rate_hz"] = meta.sample_rate_hz;
  j["hydrophone_depths"] = meta.hydrophone_depths;
  j["frequencies_hz"] = meta.frequencies_hz;
  j["repetition_period_s"] = meta.repetition_period_s;
  j["tone_duration_s"] = meta.tone_duration_s;
  j["window_duration_s"] = meta.window_duration_s;
  j["tone_onsets_s"] = meta.tone_onsets_s;
  j["clip_level"] = meta.clip_level;
  return j;
}

RecordingMeta meta_from_json(const nlohmann::json& j) {
  RecordingMeta meta;
  meta.format_version = j.at("format_version").get<int>();
  meta.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  meta.hydrophone_depths = j.at("hydrophone_depths").get<std::vector<double>>();
  meta.frequencies_hz = j.at("frequencies_hz").get<std::vector<double>>();
  meta.repetition_period_s = j.at("repetition_period_s").get<double>();
  meta.tone_duration_s = j.at("tone_duration_s").get<double>();
  meta.window_duration_s = j.at("window_duration_s").get<double>();
  meta.tone_onsets_s = j.at("tone_onsets_s").get<std::vector<double>>();
  meta.clip_level = j.at("clip_level").get<double>();
  return meta;
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_recording(const Recording& rec, const std::string& path) {
  rec.meta.validate();
  if (rec.channels.size() != rec.meta.hydrophone_depths.size())
    throw std::invalid_argument("write_recording: channel count does not match meta");
  const std::size_t n_samples = rec.n_samples();
  for (const auto& ch : rec.channels)
    if (ch.size() != n_samples)
      throw std::invalid_argument("write_recording: ragged channel lengths");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_recording: cannot open " + path);
  out.write("SWRC", 4);
  put_u32(out, 1u);  // container version
  put_u32(out, static_cast<std::uint32_t>(rec.channels.size()));
  put_u32(out, static_cast<std::uint32_t>(n_samples));
  put_u32(out, static_cast<std::uint32_t>(n_samples >> 32));
  // Interleaved little-endian float32 samples.
  std::vector<float> frame(rec.channels.size());
  for (std::size_t t = 0; t < n_samples; ++t) {
    for (std::size_t c = 0; c < rec.channels.size(); ++c) frame[c] = rec.channels[c][t];
    out.write(reinterpret_cast<const char*>(frame.data()),
              static_cast<std::streamsize>(frame.size() * sizeof(float)));
  }
  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("write_recording: cannot open sidecar for " + path);
  side << meta_to_json(rec.meta).dump(2) << "\n";
}

Recording read_recording(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_recording: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "SWRC", 4) != 0)
    throw std::runtime_error("read_recording: bad magic in " + path);
  const std::uint32_t version = get_u32(in);
  if (version != 1u) throw std::runtime_error("read_recording: unsupported container version");
  const std::uint32_t n_channels = get_u32(in);
  const std::uint64_t lo = get_u32(in), hi = get_u32(in);
  const std::uint64_t n_samples = lo | (hi << 32);

  Recording rec;
  rec.channels.assign(n_channels, std::vector<float>(n_samples));
  std::vector<float> frame(n_channels);
  for (std::uint64_t t = 0; t < n_samples; ++t) {
    in.read(reinterpret_cast<char*>(frame.data()),
            static_cast<std::streamsize>(frame.size() * sizeof(float)));
    if (!in) throw std::runtime_error("read_recording: truncated sample data");
    for (std::uint32_t c = 0; c < n_channels; ++c) rec.channels[c][t] = frame[c];
  }
  std::ifstream side(path + ".json");
  if (!side) throw std::runtime_error("read_recording: missing sidecar " + path + ".json");
  nlohmann::json j;
  side >> j;
  rec.meta = meta_from_json(j);
  if (rec.meta.hydrophone_depths.size() != n_channels)
    throw std::runtime_error("read_recording: sidecar channel count mismatch");
  return rec;
}

}  // namespace swmode
