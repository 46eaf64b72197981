#include "drumsim/musician.hpp"

#include "drumsim/csv.hpp"
#include "drumsim/kernels.hpp"
#include "drumsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace drumsim::musician {

namespace {
void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

RhythmPattern quantize(const std::vector<onset::OnsetEvent>& onsets, double tempo, int resolution,
                       bool anchor_first) {
  require(tempo > 0.0, "quantize: tempo must be > 0");
  require(resolution >= 1, "quantize: resolution must be >= 1");
  for (std::size_t i = 1; i < onsets.size(); ++i) {
    require(onsets[i].time >= onsets[i - 1].time, "quantize: onsets must be sorted");
  }

  RhythmPattern out;
  out.resolution = resolution;
  if (onsets.empty()) return out;

  const double slot_duration = 60.0 / (tempo * resolution);
  const double origin = anchor_first ? onsets.front().time : 0.0;

  std::map<int, double> by_slot;
  for (const auto& o : onsets) {
    const int slot = static_cast<int>(std::llround((o.time - origin) / slot_duration));
    require(slot >= 0, "quantize: onset before grid origin");
    auto [it, inserted] = by_slot.emplace(slot, o.velocity);
    if (!inserted) it->second = std::max(it->second, o.velocity);  // keep the louder
  }

  const int slots_per_measure = 4 * resolution;
  const int last_slot = by_slot.rbegin()->first;
  out.measures = last_slot / slots_per_measure + 1;

  std::vector<double> velocities;
  velocities.reserve(by_slot.size());
  for (const auto& [slot, v] : by_slot) velocities.push_back(v);
  const double peak = kernels::max_value(velocities.data(), velocities.size());
  const double norm = peak > 0.0 ? 1.0 / peak : 1.0;

  for (const auto& [slot, v] : by_slot) {
    const double vel = std::clamp(v * norm, 0.01, 1.0);
    out.events.push_back({slot, peak > 0.0 ? vel : 1.0});
  }
  return out;
}
} // namespace

void RhythmPattern::validate() const {
  require(resolution >= 1, "RhythmPattern.resolution must be >= 1");
  require(measures >= 0, "RhythmPattern.measures must be >= 0");
  int prev = -1;
  for (const auto& e : events) {
    require(e.slot > prev, "RhythmPattern events must be sorted with unique slots");
    require(e.slot < total_slots(), "RhythmPattern event slot outside pattern length");
    require(e.velocity > 0.0 && e.velocity <= 1.0, "RhythmPattern velocity must be in (0,1]");
    prev = e.slot;
  }
}

RhythmPattern extract_pattern(const std::vector<onset::OnsetEvent>& onsets, double tempo,
                              int resolution) {
  return quantize(onsets, tempo, resolution, false);
}

RhythmPattern quantize_seed(const std::vector<onset::OnsetEvent>& onsets, double tempo,
                            int resolution) {
  return quantize(onsets, tempo, resolution, true);
}

std::vector<stick::ScheduledStrike> schedule_playback(const RhythmPattern& pattern, double tempo,
                                                      int loops) {
  pattern.validate();
  require(tempo > 0.0, "schedule_playback: tempo must be > 0");
  require(loops >= 1, "schedule_playback: loops must be >= 1");

  const double slot_duration = 60.0 / (tempo * pattern.resolution);
  const double loop_span = pattern.total_slots() * slot_duration;
  std::vector<stick::ScheduledStrike> out;
  out.reserve(pattern.events.size() * static_cast<std::size_t>(loops));
  for (int l = 0; l < loops; ++l) {
    for (const auto& e : pattern.events) {
      out.push_back({l * loop_span + e.slot * slot_duration, e.velocity});
    }
  }
  return out;
}

double chord_to_rate(const ChordEvent& chord, double rate_min, double rate_max) {
  require(chord.tonal_center >= 0 && chord.tonal_center <= 11,
          "chord_to_rate: tonal_center must be a pitch class 0-11");
  require(rate_min > 0.0 && rate_min < rate_max && rate_max <= 20.0,
          "chord_to_rate: need 0 < min < max <= 20 Hz");
  return rate_min + (chord.tonal_center / 11.0) * (rate_max - rate_min);
}

std::vector<stick::ScheduledStrike> schedule_chord_rates(const std::vector<ChordEvent>& chords,
                                                         double rate_min, double rate_max,
                                                         double end_time, double velocity) {
  require(!chords.empty(), "schedule_chord_rates: empty chord stream");
  for (std::size_t i = 1; i < chords.size(); ++i) {
    require(chords[i].time > chords[i - 1].time, "schedule_chord_rates: chords must be sorted");
  }
  require(end_time > chords.back().time, "schedule_chord_rates: end_time before last chord");

  std::vector<stick::ScheduledStrike> out;
  for (std::size_t i = 0; i < chords.size(); ++i) {
    const double rate = chord_to_rate(chords[i], rate_min, rate_max);
    const double period = 1.0 / rate;
    const double segment_end = i + 1 < chords.size() ? chords[i + 1].time : end_time;
    for (double t = chords[i].time; t < segment_end - 1e-12; t += period) {
      out.push_back({t, velocity});
    }
  }
  return out;
}

RhythmPattern densify(const RhythmPattern& pattern, const DensityControl& control,
                      std::uint64_t seed) {
  pattern.validate();
  require(control.level >= 0.0 && control.level <= 1.0, "densify: level must be in [0,1]");

  RhythmPattern out = pattern;
  if (control.level <= 0.0 || pattern.total_slots() == 0) return out;

  std::vector<bool> occupied(static_cast<std::size_t>(pattern.total_slots()), false);
  for (const auto& e : pattern.events) occupied[static_cast<std::size_t>(e.slot)] = true;

  Rng rng(derive_seed(seed, 0xdE51u));
  for (int slot = 0; slot < pattern.total_slots(); ++slot) {
    if (occupied[static_cast<std::size_t>(slot)]) continue;
    if (rng.bernoulli(control.level)) {
      out.events.push_back({slot, rng.uniform(0.3, 0.7)});
    }
  }
  std::sort(out.events.begin(), out.events.end(),
            [](const PatternEvent& a, const PatternEvent& b) { return a.slot < b.slot; });
  return out;
}

DensityControl density_from_activation(const emg::ActivationSignal& signal, double window_seconds,
                                       double full_scale) {
  require(window_seconds > 0.0, "density_from_activation: window must be > 0");
  require(full_scale > 0.0, "density_from_activation: full_scale must be > 0");
  if (signal.samples.empty()) return {0.0};

  const std::size_t want =
      static_cast<std::size_t>(std::llround(window_seconds * signal.sample_rate));
  const std::size_t n = std::min(std::max<std::size_t>(want, 1), signal.samples.size());
  const double* tail = signal.samples.data() + (signal.samples.size() - n);
  const double mean = kernels::sum(tail, n) / static_cast<double>(n);
  return {std::clamp(mean / full_scale, 0.0, 1.0)};
}

std::vector<stick::ScheduledStrike> gate_by_pose(const std::vector<stick::ScheduledStrike>& schedule,
                                                 const std::vector<PoseSample>& poses) {
  require(!poses.empty(), "gate_by_pose: empty pose trajectory");
  for (std::size_t i = 1; i < poses.size(); ++i) {
    require(poses[i].time > poses[i - 1].time, "gate_by_pose: poses must be sorted");
  }
  if (!schedule.empty()) {
    require(poses.front().time <= schedule.front().time + 1e-12,
            "gate_by_pose: pose trajectory starts after the first strike");
  }

  std::vector<stick::ScheduledStrike> out;
  std::size_t pi = 0;
  for (const auto& s : schedule) {
    while (pi + 1 < poses.size() && poses[pi + 1].time <= s.time) ++pi;
    const ArmPose& pose = poses[pi].pose;
    if (pose.hover_height >= 1.0) continue;
    out.push_back({s.time, s.velocity * pose.velocity_scale * (1.0 - pose.hover_height)});
  }
  return out;
}

std::string pattern_to_csv(const RhythmPattern& pattern) {
  pattern.validate();
  std::string out = "# resolution=" + std::to_string(pattern.resolution) +
                    ",measures=" + std::to_string(pattern.measures) + "\n";
  out += "slot,velocity\n";
  for (const auto& e : pattern.events) {
    out += std::to_string(e.slot);
    out += ',';
    out += csv::format_double(e.velocity);
    out += '\n';
  }
  return out;
}

RhythmPattern pattern_from_csv(const std::string& content) {
  auto parsed = csv::parse_csv(content);
  RhythmPattern pattern;
  bool meta = false;
  for (const auto& c : parsed.comments) {
    if (c.rfind("resolution=", 0) != 0) continue;
    for (const auto& field : csv::split(c, ',')) {
      const auto kv = csv::split(field, '=');
      if (kv.size() != 2) continue;
      if (kv[0] == "resolution") pattern.resolution = static_cast<int>(csv::parse_long(kv[1]));
      if (kv[0] == "measures") pattern.measures = static_cast<int>(csv::parse_long(kv[1]));
    }
    meta = true;
  }
  if (!meta) throw std::runtime_error("pattern CSV missing '# resolution=...,measures=...' line");
  if (parsed.header != std::vector<std::string>{"slot", "velocity"}) {
    throw std::runtime_error("pattern CSV expected header slot,velocity");
  }
  for (const auto& row : parsed.rows) {
    pattern.events.push_back(
        {static_cast<int>(csv::parse_long(row[0])), csv::parse_double(row[1])});
  }
  pattern.validate();
  return pattern;
}

std::string chords_to_csv(const std::vector<ChordEvent>& chords) {
  std::string out = "time,pitch_class\n";
  for (const auto& c : chords) {
    out += csv::format_double(c.time);
    out += ',';
    out += std::to_string(c.tonal_center);
    out += '\n';
  }
  return out;
}

std::vector<ChordEvent> chords_from_csv(const std::string& content) {
  auto parsed = csv::parse_csv(content);
  if (parsed.header != std::vector<std::string>{"time", "pitch_class"}) {
    throw std::runtime_error("chord CSV expected header time,pitch_class");
  }
  std::vector<ChordEvent> out;
  for (const auto& row : parsed.rows) {
    ChordEvent c{csv::parse_double(row[0]), static_cast<int>(csv::parse_long(row[1]))};
    if (c.tonal_center < 0 || c.tonal_center > 11) {
      throw std::runtime_error("chord CSV pitch class outside 0-11");
    }
    out.push_back(c);
  }
  return out;
}

std::string schedule_to_csv(const std::vector<stick::ScheduledStrike>& schedule) {
  csv::TimedValueSeries series;
  for (const auto& s : schedule) {
    series.times.push_back(s.time);
    series.values.push_back(s.velocity);
  }
  return csv::to_time_value_csv(series, "velocity");
}

std::vector<stick::ScheduledStrike> schedule_from_csv(const std::string& content) {
  const auto series = csv::from_time_value_csv(content);
  std::vector<stick::ScheduledStrike> out(series.times.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {series.times[i], series.values[i]};
  return out;
}

std::string poses_to_csv(const std::vector<PoseSample>& poses) {
  std::string out = "time,hover_height,velocity_scale\n";
  for (const auto& p : poses) {
    out += csv::format_double(p.time);
    out += ',';
    out += csv::format_double(p.pose.hover_height);
    out += ',';
    out += csv::format_double(p.pose.velocity_scale);
    out += '\n';
  }
  return out;
}

std::vector<PoseSample> poses_from_csv(const std::string& content) {
  auto parsed = csv::parse_csv(content);
  if (parsed.header.size() != 3 || parsed.header[0] != "time") {
    throw std::runtime_error("pose CSV expected header time,hover_height,velocity_scale");
  }
  std::vector<PoseSample> out;
  for (const auto& row : parsed.rows) {
    out.push_back({csv::parse_double(row[0]),
                   {csv::parse_double(row[1]), csv::parse_double(row[2])}});
  }
  return out;
}

} // namespace drumsim::musician
