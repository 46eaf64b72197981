#include "drumsim/cli.hpp"

#include "drumsim/csv.hpp"
#include "drumsim/musician.hpp"
#include "drumsim/rng.hpp"
#include "drumsim/sync.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace drumsim::cli {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

std::string recording_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "recording_%03d.csv", index);
  return buf;
}

} // namespace

int cmd_synth_dataset(const config::ScenarioConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const auto& s = cfg.synth;

  std::string manifest = "file,labels\n";
  int total_bursts = 0;
  for (int r = 0; r < s.recordings; ++r) {
    Rng rng(derive_seed(s.seed, 0x5eedu, r));
    std::vector<double> bursts;
    double t = rng.uniform(s.spacing_min, s.spacing_max);
    for (int b = 0; b < s.bursts_per_recording; ++b) {
      bursts.push_back(t);
      t += rng.uniform(s.spacing_min, s.spacing_max);
    }
    const auto rec = emg::synth_emg(bursts, s.burst, s.interference, s.noise_floor,
                                    derive_seed(s.seed, 0xda7au, r), s.sample_rate);
    const std::string name = recording_name(r);
    emg::write_recording_csv(rec, join(out_dir, name));
    manifest += name + "," + std::to_string(bursts.size()) + "\n";
    total_bursts += static_cast<int>(bursts.size());
  }
  csv::write_file_atomic(join(out_dir, "manifest.csv"), manifest);
  std::printf("synth-dataset: %d recordings, %d labeled bursts -> %s\n", s.recordings,
              total_bursts, out_dir.c_str());
  return kExitOk;
}

int cmd_eval_onsets(const config::ScenarioConfig& cfg, const std::string& corpus_dir,
                    const std::string& out_dir, bool check) {
  cfg.validate();
  ensure_dir(out_dir);

  std::vector<std::string> files;
  const std::string manifest_path = join(corpus_dir, "manifest.csv");
  if (fs::exists(manifest_path)) {
    const auto manifest = csv::parse_csv(csv::read_file(manifest_path));
    for (const auto& row : manifest.rows) files.push_back(row[0]);
  } else if (fs::is_directory(corpus_dir)) {
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("recording_", 0) == 0 && entry.path().extension() == ".csv") {
        files.push_back(name);
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    throw std::runtime_error("corpus directory not found: " + corpus_dir);
  }
  if (files.empty()) {
    throw std::runtime_error("empty corpus: no recordings in " + corpus_dir);
  }

  std::string report = "file,precision,recall,f1,tp,fp,fn\n";
  int tp = 0, fp = 0, fn = 0;
  int bad_files = 0;
  for (const auto& name : files) {
    try {
      const auto rec = emg::read_recording_csv(join(corpus_dir, name));
      const auto detected = onset::detect_from_recording(rec, cfg.chain, cfg.detector);
      const auto score = onset::score_detection(detected, rec.labels, cfg.score_tolerance);
      tp += score.true_positives;
      fp += score.false_positives;
      fn += score.false_negatives;
      report += name + "," + csv::format_double(score.precision) + "," +
                csv::format_double(score.recall) + "," + csv::format_double(score.f1) + "," +
                std::to_string(score.true_positives) + "," +
                std::to_string(score.false_positives) + "," +
                std::to_string(score.false_negatives) + "\n";
    } catch (const std::exception& e) {
      ++bad_files;
      std::fprintf(stderr, "eval-onsets: %s: %s\n", name.c_str(), e.what());
    }
  }

  const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  const double f1 =
      precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  report += "aggregate," + csv::format_double(precision) + "," + csv::format_double(recall) +
            "," + csv::format_double(f1) + "," + std::to_string(tp) + "," + std::to_string(fp) +
            "," + std::to_string(fn) + "\n";
  csv::write_file_atomic(join(out_dir, "report.csv"), report);

  std::printf("eval-onsets: %zu files, precision %.4f, recall %.4f, F1 %.4f\n", files.size(),
              precision, recall, f1);
  if (bad_files > 0) return kExitRuntime;
  if (check && f1 < 0.90) {
    std::fprintf(stderr, "eval-onsets: aggregate F1 %.4f below the 0.90 threshold\n", f1);
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_trial(const config::ScenarioConfig& cfg, const std::string& motif_name, double tempo,
              const std::string& condition, std::uint64_t seed, const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);

  performer::TrialSpec spec;
  spec.motif = cfg.motif_by_name(motif_name);
  spec.tempo = tempo;
  spec.condition = performer::condition_from_name(condition);
  spec.measures_performed = cfg.grid.measures;
  spec.seed = seed;
  spec.validate();

  const auto ref = performer::render_reference_events(spec.motif, spec.tempo,
                                                      spec.measures_performed);
  std::vector<stick::StrikeEvent> ref_events;
  for (std::size_t i = 0; i < ref.times.size(); ++i) {
    ref_events.push_back({ref.times[i], ref.accents[i] * performer::kNominalStrikeSpeed});
  }
  csv::write_file_atomic(join(out_dir, "reference.csv"), stick::strikes_to_csv(ref_events));

  try {
    const auto strikes = performer::perform_trial(spec, cfg.elbow, cfg.stick_params, cfg.gains,
                                                  cfg.emg_tune_steps);
    csv::write_file_atomic(join(out_dir, "strikes.csv"), stick::strikes_to_csv(strikes));

    const double distance = sync::trial_distance(spec, cfg.elbow, cfg.stick_params, cfg.gains,
                                                 cfg.grid.envelope_rate, cfg.emg_tune_steps);
    std::string dist_csv = "motif,bpm,condition,normalized_distance\n";
    dist_csv += spec.motif.name + "," + csv::format_double(tempo) + "," +
                performer::condition_name(spec.condition) + "," + csv::format_double(distance) +
                "\n";
    csv::write_file_atomic(join(out_dir, "distance.csv"), dist_csv);

    std::printf("trial: motif=%s tempo=%g condition=%s distance=%.6g\n",
                spec.motif.name.c_str(), tempo, performer::condition_name(spec.condition),
                distance);
    return kExitOk;
  } catch (const stick::UnachievableIntervalError& e) {
    std::fprintf(stderr,
                 "trial: required rebound interval %.4f s outside achievable [%.4f, %.4f] s\n",
                 e.target(), e.min_interval(), e.max_interval());
    return kExitRuntime;
  } catch (const performer::InfeasiblePlanError& e) {
    std::fprintf(stderr, "trial: interval %.4f s below the elbow floor %.4f s\n",
                 e.required_interval(), e.floor_interval());
    return kExitRuntime;
  }
}

namespace {

// Trend checks mirroring the study's significance structure.
int check_grid_trends(const sync::GridResult& grid) {
  int failures = 0;
  const sync::TempoRow* row210 = nullptr;
  int significant_150_200 = 0;
  for (const auto& row : grid.rows) {
    if (row.tempo <= 130.0 && row.significant) {
      std::fprintf(stderr, "grid check: unexpected significance at %g bpm (p_adj=%g)\n",
                   row.tempo, row.p_adjusted);
      ++failures;
    }
    if (row.tempo >= 150.0 && row.tempo <= 200.0) {
      if (row.electro_mean > row.spring_mean) {
        std::fprintf(stderr,
                     "grid check: electromechanical mean %.6g above spring %.6g at %g bpm\n",
                     row.electro_mean, row.spring_mean, row.tempo);
        ++failures;
      }
      if (row.significant) ++significant_150_200;
    }
    if (row.tempo == 210.0) row210 = &row;
  }
  int tempi_150_200 = 0;
  for (const auto& row : grid.rows) {
    if (row.tempo >= 150.0 && row.tempo <= 200.0) ++tempi_150_200;
  }
  const int need = std::min(4, tempi_150_200);
  if (significant_150_200 < need) {
    std::fprintf(stderr, "grid check: only %d significant tempi in 150-200 bpm (need >= %d)\n",
                 significant_150_200, need);
    ++failures;
  }
  if (row210) {
    const double ref = std::max(row210->spring_mean, 1e-12);
    if (std::abs(row210->spring_mean - row210->electro_mean) >= 0.10 * ref) {
      std::fprintf(stderr, "grid check: means at 210 bpm differ by >= 10%% (%.6g vs %.6g)\n",
                   row210->spring_mean, row210->electro_mean);
      ++failures;
    }
  }
  return failures;
}

} // namespace

int cmd_grid(const config::ScenarioConfig& cfg, const std::string& out_dir, int jobs,
             bool check) {
  cfg.validate();
  ensure_dir(out_dir);

  sync::GridSpec spec;
  spec.motifs = cfg.motifs;
  spec.tempi = cfg.grid.tempi;
  spec.trials_per_cell = cfg.grid.trials;
  spec.base_seed = cfg.grid.seed;
  spec.envelope_rate = cfg.grid.envelope_rate;
  spec.alpha = cfg.grid.alpha;
  spec.measures_performed = cfg.grid.measures;
  spec.emg_tune_steps = cfg.emg_tune_steps;
  spec.jobs = std::max(1, jobs);

  const auto grid = sync::run_grid(spec, cfg.elbow, cfg.stick_params, cfg.gains,
                                   [](std::size_t done, std::size_t total) {
                                     if (done == total || done % 10 == 0) {
                                       std::fprintf(stderr, "grid: %zu/%zu cells\r", done, total);
                                       if (done == total) std::fprintf(stderr, "\n");
                                     }
                                   });

  csv::write_file_atomic(join(out_dir, "grid.csv"), sync::grid_to_csv(grid));
  csv::write_file_atomic(join(out_dir, "trials.csv"), sync::trials_to_csv(grid, spec.motifs));

  for (const auto& row : grid.rows) {
    std::printf("%6g bpm  spring %.6f  electro %.6f  p_adj %.4g%s\n", row.tempo,
                row.spring_mean, row.electro_mean, row.p_adjusted,
                row.significant ? "  *" : "");
  }
  if (grid.failures > 0) {
    std::fprintf(stderr, "grid: %d trial failures (excluded from means)\n", grid.failures);
    return kExitRuntime;
  }
  if (check && check_grid_trends(grid) > 0) return kExitCheckFailed;
  return kExitOk;
}

int cmd_behavior(const config::ScenarioConfig& cfg, const std::string& behavior_name,
                 const std::string& inputs_path, const std::string& pose_path,
                 const std::string& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const auto& b = cfg.behavior;

  std::vector<stick::ScheduledStrike> schedule;
  if (behavior_name == "playback") {
    const auto pattern = musician::pattern_from_csv(csv::read_file(inputs_path));
    schedule = musician::schedule_playback(pattern, b.tempo, b.loops);
  } else if (behavior_name == "chordrate") {
    const auto chords = musician::chords_from_csv(csv::read_file(inputs_path));
    if (chords.empty()) throw std::runtime_error("chordrate: empty chord stream");
    schedule = musician::schedule_chord_rates(chords, b.rate_min, b.rate_max,
                                              chords.back().time + b.chord_tail);
  } else if (behavior_name == "densify") {
    const auto onsets = onset::onsets_from_csv(csv::read_file(inputs_path));
    const auto seed_pattern = musician::quantize_seed(onsets, b.tempo, b.resolution);
    const auto dense = musician::densify(seed_pattern, {b.density_level}, b.seed);
    schedule = musician::schedule_playback(dense, b.tempo, b.loops);
  } else {
    throw std::invalid_argument("unknown behavior '" + behavior_name +
                                "' (valid: playback, chordrate, densify)");
  }

  std::vector<musician::PoseSample> poses;
  if (!pose_path.empty()) {
    poses = musician::poses_from_csv(csv::read_file(pose_path));
  } else {
    poses.push_back({0.0, {b.hover_height, b.velocity_scale}});
  }
  const auto gated = musician::gate_by_pose(schedule, poses);

  csv::write_file_atomic(join(out_dir, "schedule.csv"), musician::schedule_to_csv(gated));
  std::printf("behavior %s: %zu scheduled strikes (%zu after pose gating) -> %s\n",
              behavior_name.c_str(), schedule.size(), gated.size(), out_dir.c_str());
  return kExitOk;
}

} // namespace drumsim::cli
