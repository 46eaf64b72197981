#include "drumsim/cli.hpp"

#include "drumsim/csv.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

using drumsim::cli::kExitRuntime;
using drumsim::cli::kExitValidation;

int main(int argc, char** argv) {
  CLI::App app{"Variable-impedance drumming prosthesis simulator"};
  app.require_subcommand(1);
  app.fallthrough();  // inherited: --config/--out/--seed parse after the subcommand too

  std::string config_path;
  std::string out_dir = "out";
  std::int64_t seed_override = -1;
  app.add_option("--config", config_path, "Scenario config file (INI)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed_override, "Override the command's seed");

  auto* synth = app.add_subcommand("synth-dataset", "Generate the labeled EMG corpus");

  std::string corpus_dir;
  bool check = false;
  auto* eval = app.add_subcommand("eval-onsets", "Score onset detection on a corpus");
  eval->add_option("--corpus", corpus_dir, "Corpus directory")->required();
  eval->add_flag("--check", check, "Exit 3 when aggregate F1 < 0.90");

  std::string motif_name = "straight_16ths";
  double tempo = 120.0;
  std::string condition = "electromechanical";
  auto* trial = app.add_subcommand("trial", "Run one synchronization trial");
  trial->add_option("--motif", motif_name, "Motif name");
  trial->add_option("--tempo", tempo, "Tempo, bpm")->required();
  trial->add_option("--condition", condition, "spring | electromechanical");

  int jobs = 1;
  bool grid_check = false;
  std::string tempi_csv;
  auto* grid = app.add_subcommand("grid", "Run the full tempo x motif x condition grid");
  grid->add_option("--jobs", jobs, "Parallel cell evaluation threads");
  grid->add_flag("--check", grid_check, "Exit 3 when condition trends are violated");
  grid->add_option("--tempi", tempi_csv, "Override the tempo list, e.g. 90,120,150");

  std::string behavior_name;
  std::string inputs_path;
  std::string pose_path;
  auto* behavior = app.add_subcommand("behavior", "Autonomous second-stick behaviors");
  behavior->add_option("--name", behavior_name, "playback | chordrate | densify")->required();
  behavior->add_option("--inputs", inputs_path, "Behavior input file")->required();
  behavior->add_option("--pose", pose_path, "Optional pose trajectory CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    drumsim::config::ScenarioConfig cfg;
    if (!config_path.empty()) {
      cfg = drumsim::config::load_config(config_path);
    }
    if (seed_override >= 0) {
      cfg.grid.seed = static_cast<std::uint64_t>(seed_override);
      cfg.synth.seed = static_cast<std::uint64_t>(seed_override);
      cfg.behavior.seed = static_cast<std::uint64_t>(seed_override);
    }

    if (synth->parsed()) return drumsim::cli::cmd_synth_dataset(cfg, out_dir);
    if (eval->parsed()) return drumsim::cli::cmd_eval_onsets(cfg, corpus_dir, out_dir, check);
    if (trial->parsed()) {
      return drumsim::cli::cmd_trial(cfg, motif_name, tempo, condition, cfg.grid.seed, out_dir);
    }
    if (grid->parsed()) {
      if (!tempi_csv.empty()) {
        cfg.grid.tempi.clear();
        for (const auto& item : drumsim::csv::split(tempi_csv, ',')) {
          cfg.grid.tempi.push_back(drumsim::csv::parse_double(item));
        }
      }
      return drumsim::cli::cmd_grid(cfg, out_dir, jobs, grid_check);
    }
    if (behavior->parsed()) {
      return drumsim::cli::cmd_behavior(cfg, behavior_name, inputs_path, pose_path, out_dir);
    }
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
