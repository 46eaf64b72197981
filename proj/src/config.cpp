#include "drumsim/config.hpp"

#include "drumsim/csv.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace drumsim::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct IniEntry {
  std::string value;
  int line;
};

// section -> key -> value. Sections keep insertion order for motifs.
struct Ini {
  std::map<std::string, std::map<std::string, IniEntry>> sections;
  std::vector<std::string> section_order;
};

Ini parse_ini(const std::string& content) {
  Ini ini;
  std::string section;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t nl = content.find('\n', pos);
    std::string line = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!ini.sections.count(section)) ini.section_order.push_back(section);
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    }
    ini.sections[section][key] = {value, lineno};
  }
  return ini;
}

class SectionReader {
 public:
  SectionReader(const Ini& ini, std::string section) : section_(std::move(section)) {
    auto it = ini.sections.find(section_);
    if (it != ini.sections.end()) entries_ = &it->second;
  }

  bool present() const { return entries_ != nullptr; }

  void read(const std::string& key, double& out) {
    if (const auto* e = take(key)) out = parse(key, e->value);
  }
  void read(const std::string& key, int& out) {
    if (const auto* e = take(key)) out = static_cast<int>(parse_int(key, e->value));
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (const auto* e = take(key)) out = static_cast<std::uint64_t>(parse_int(key, e->value));
  }
  void read(const std::string& key, std::string& out) {
    if (const auto* e = take(key)) out = e->value;
  }
  void read_list(const std::string& key, std::vector<double>& out) {
    if (const auto* e = take(key)) {
      std::vector<double> values;
      for (const auto& item : csv::split(e->value, ',')) {
        values.push_back(parse(key, trim(item)));
      }
      out = std::move(values);
    }
  }

  // Any keys never taken are unknown: report the first one.
  void finish() const {
    if (!entries_) return;
    for (const auto& [key, entry] : *entries_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw std::invalid_argument("config line " + std::to_string(entry.line) +
                                    ": unknown key '" + section_ + "." + key + "'");
      }
    }
  }

 private:
  const IniEntry* take(const std::string& key) {
    if (!entries_) return nullptr;
    auto it = entries_->find(key);
    if (it == entries_->end()) return nullptr;
    used_.insert(used_.end(), key);
    return &it->second;
  }
  double parse(const std::string& key, const std::string& value) const {
    try {
      return csv::parse_double(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("config field '" + section_ + "." + key +
                                  "': not a number: '" + value + "'");
    }
  }
  long parse_int(const std::string& key, const std::string& value) const {
    try {
      return csv::parse_long(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("config field '" + section_ + "." + key +
                                  "': not an integer: '" + value + "'");
    }
  }

  std::string section_;
  const std::map<std::string, IniEntry>* entries_ = nullptr;
  std::vector<std::string> used_;
};

performer::Motif parse_motif(const Ini& ini, const std::string& section) {
  performer::Motif m;
  m.name = section.substr(std::string("motif.").size());
  SectionReader r(ini, section);
  int subdivision = m.subdivision;
  std::string pattern;
  std::vector<double> accents;
  r.read("subdivision", subdivision);
  r.read("pattern", pattern);
  r.read_list("accents", accents);
  r.finish();
  if (pattern.empty()) {
    throw std::invalid_argument("config field '" + section + ".pattern': required");
  }
  m.subdivision = subdivision;
  for (char c : pattern) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("config field '" + section +
                                  ".pattern': expected a 0/1 hit grid");
    }
    m.pattern.push_back(c == '1');
  }
  m.accents = std::move(accents);
  return m;
}

} // namespace

const performer::Motif& ScenarioConfig::motif_by_name(const std::string& name) const {
  for (const auto& m : motifs) {
    if (m.name == name) return m;
  }
  std::string known;
  for (const auto& m : motifs) known += (known.empty() ? "" : ", ") + m.name;
  throw std::invalid_argument("unknown motif '" + name + "' (known: " + known + ")");
}

void ScenarioConfig::validate() const {
  if (version != 1) {
    throw std::invalid_argument("config field 'version': unsupported value " +
                                std::to_string(version));
  }
  chain.validate(synth.sample_rate);
  detector.validate();
  stick_params.validate();
  gains.validate();
  elbow.validate();
  if (score_tolerance <= 0.0) {
    throw std::invalid_argument("config field 'detector.score_tolerance': must be > 0");
  }
  if (emg_tune_steps < 1) {
    throw std::invalid_argument("config field 'gains.emg_tune_steps': must be >= 1");
  }
  if (motifs.empty()) throw std::invalid_argument("config: at least one motif required");
  for (const auto& m : motifs) m.validate();
  for (double t : grid.tempi) {
    if (t < 90.0 || t > 210.0) {
      throw std::invalid_argument("config field 'grid.tempi': tempo " + csv::format_double(t) +
                                  " outside the 90-210 bpm study grid");
    }
  }
  if (grid.trials < 2) throw std::invalid_argument("config field 'grid.trials': must be >= 2");
  if (grid.envelope_rate <= 0.0) {
    throw std::invalid_argument("config field 'grid.envelope_rate': must be > 0");
  }
  if (grid.measures < 1) throw std::invalid_argument("config field 'grid.measures': must be >= 1");
  if (synth.recordings < 1 || synth.bursts_per_recording < 1) {
    throw std::invalid_argument("config field 'synth.recordings/bursts_per_recording': must be >= 1");
  }
  if (synth.spacing_min < synth.burst.duration) {
    throw std::invalid_argument("config field 'synth.spacing_min': bursts would overlap");
  }
  if (synth.spacing_max < synth.spacing_min) {
    throw std::invalid_argument("config field 'synth.spacing_max': must be >= spacing_min");
  }
  if (synth.sample_rate < 2000) {
    throw std::invalid_argument("config field 'synth.sample_rate': must be >= 2000");
  }
  if (behavior.resolution < 1 || behavior.loops < 1) {
    throw std::invalid_argument("config field 'behavior.resolution/loops': must be >= 1");
  }
  if (behavior.density_level < 0.0 || behavior.density_level > 1.0) {
    throw std::invalid_argument("config field 'behavior.density_level': must be in [0,1]");
  }
  if (!(behavior.rate_min > 0.0 && behavior.rate_min < behavior.rate_max &&
        behavior.rate_max <= 20.0)) {
    throw std::invalid_argument("config field 'behavior.rate_min/rate_max': need 0 < min < max <= 20");
  }
  if (behavior.tempo <= 0.0) {
    throw std::invalid_argument("config field 'behavior.tempo': must be > 0");
  }
}

ScenarioConfig parse_config(const std::string& content) {
  const Ini ini = parse_ini(content);
  ScenarioConfig cfg;

  {
    SectionReader r(ini, "");
    r.read("version", cfg.version);
    r.finish();
  }
  {
    SectionReader r(ini, "chain");
    r.read("diff_gain", cfg.chain.diff_gain);
    r.read("maf_window", cfg.chain.maf_window);
    r.read("lpf_cutoff", cfg.chain.lpf_cutoff);
    r.read("notch_center", cfg.chain.notch_center);
    r.read("notch_q", cfg.chain.notch_q);
    r.read("hpf_cutoff", cfg.chain.hpf_cutoff);
    r.read("gate_threshold", cfg.chain.gate_threshold);
    r.read("gate_release", cfg.chain.gate_release);
    r.finish();
  }
  {
    SectionReader r(ini, "detector");
    r.read("num_bands", cfg.detector.num_bands);
    r.read("frame_size", cfg.detector.frame_size);
    r.read("hop", cfg.detector.hop);
    r.read("min_velocity", cfg.detector.min_velocity);
    r.read("min_gap", cfg.detector.min_gap);
    r.read("score_tolerance", cfg.score_tolerance);
    r.finish();
  }
  {
    SectionReader r(ini, "stick");
    r.read("inertia", cfg.stick_params.inertia);
    r.read("length", cfg.stick_params.length);
    r.read("gravity_torque_coeff", cfg.stick_params.gravity_torque_coeff);
    r.read("restitution", cfg.stick_params.restitution);
    r.read("motor_torque_limit", cfg.stick_params.motor_torque_limit);
    r.read("drum_angle", cfg.stick_params.drum_angle);
    r.read("rest_angle", cfg.stick_params.rest_angle);
    r.read("timestep", cfg.stick_params.timestep);
    r.finish();
  }
  {
    SectionReader r(ini, "gains");
    r.read("kp", cfg.gains.kp);
    r.read("ki", cfg.gains.ki);
    r.read("kd", cfg.gains.kd);
    r.read("kp_min", cfg.gains.kp_min);
    r.read("kp_max", cfg.gains.kp_max);
    r.read("emg_tune_steps", cfg.emg_tune_steps);
    r.finish();
  }
  {
    SectionReader r(ini, "elbow");
    r.read("max_stroke_rate", cfg.elbow.max_stroke_rate);
    r.read("timing_jitter_sigma", cfg.elbow.timing_jitter_sigma);
    r.read("velocity_jitter_sigma", cfg.elbow.velocity_jitter_sigma);
    r.finish();
  }
  {
    SectionReader r(ini, "grid");
    r.read_list("tempi", cfg.grid.tempi);
    r.read("trials", cfg.grid.trials);
    r.read("seed", cfg.grid.seed);
    r.read("envelope_rate", cfg.grid.envelope_rate);
    r.read("alpha", cfg.grid.alpha);
    r.read("measures", cfg.grid.measures);
    r.finish();
  }
  {
    SectionReader r(ini, "synth");
    r.read("recordings", cfg.synth.recordings);
    r.read("bursts_per_recording", cfg.synth.bursts_per_recording);
    r.read("spacing_min", cfg.synth.spacing_min);
    r.read("spacing_max", cfg.synth.spacing_max);
    r.read("sample_rate", cfg.synth.sample_rate);
    r.read("noise_floor", cfg.synth.noise_floor);
    r.read("seed", cfg.synth.seed);
    r.read("burst_duration", cfg.synth.burst.duration);
    r.read("burst_amplitude", cfg.synth.burst.amplitude);
    r.read("burst_band_lo", cfg.synth.burst.band_lo);
    r.read("burst_band_hi", cfg.synth.burst.band_hi);
    r.read("burst_amplitude_jitter", cfg.synth.burst.amplitude_jitter);
    r.read("line_hz", cfg.synth.interference.line_hz);
    r.read_list("harmonic_amps", cfg.synth.interference.harmonic_amps);
    r.read("imbalance", cfg.synth.interference.imbalance);
    r.finish();
  }
  {
    SectionReader r(ini, "behavior");
    r.read("tempo", cfg.behavior.tempo);
    r.read("resolution", cfg.behavior.resolution);
    r.read("loops", cfg.behavior.loops);
    r.read("density_level", cfg.behavior.density_level);
    r.read("seed", cfg.behavior.seed);
    r.read("rate_min", cfg.behavior.rate_min);
    r.read("rate_max", cfg.behavior.rate_max);
    r.read("chord_tail", cfg.behavior.chord_tail);
    r.read("hover_height", cfg.behavior.hover_height);
    r.read("velocity_scale", cfg.behavior.velocity_scale);
    r.finish();
  }

  bool any_motif = false;
  std::vector<performer::Motif> motifs;
  for (const auto& section : ini.section_order) {
    if (section.rfind("motif.", 0) == 0) {
      motifs.push_back(parse_motif(ini, section));
      any_motif = true;
    }
  }
  if (any_motif) cfg.motifs = std::move(motifs);

  for (const auto& section : ini.section_order) {
    static const char* known[] = {"chain", "detector", "stick", "gains",
                                  "elbow", "grid",     "synth", "behavior"};
    const bool is_known =
        section.empty() || section.rfind("motif.", 0) == 0 ||
        std::any_of(std::begin(known), std::end(known),
                    [&](const char* k) { return section == k; });
    if (!is_known) {
      throw std::invalid_argument("config: unknown section [" + section + "]");
    }
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  return parse_config(csv::read_file(path));
}

} // namespace drumsim::config
