#pragma once

#include "drumsim/performer.hpp"
#include "drumsim/stick.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace drumsim::sync {

struct Envelope {
  double rate = 100.0;  // Hz
  std::vector<double> samples;
};

// Each strike adds a 20 ms half-cosine pulse centered on its time, scaled by
// velocity. Strikes must lie within [0, duration].
Envelope onset_envelope(const std::vector<stick::StrikeEvent>& strikes, double rate,
                        double duration);

// Amplitude envelope of the strikes rendered as a percussive voice: 10 ms
// half-cosine attack into a 60 ms exponential decay, 250 ms support. This is
// what the synchronization metric compares; unlike isolated 20 ms pulses,
// neighboring voices overlap, so the DTW cannot absorb a timing offset by
// warping through silence.
Envelope strike_voice_envelope(const std::vector<stick::StrikeEvent>& strikes, double rate,
                               double duration);

struct DtwResult {
  double total_cost = 0.0;
  std::vector<std::pair<int, int>> path;  // (0,0) .. (n-1,m-1)
  double normalized_distance = 0.0;       // total_cost / path length
};

// Classic DP alignment with |a-b| local cost and steps {(1,0),(0,1),(1,1)}.
DtwResult dtw_distance(const Envelope& a, const Envelope& b);

// Two-sided tail probability of Student's t with df degrees of freedom,
// via the regularized incomplete beta function.
double student_t_two_sided_p(double t, double df);

struct PairedTestResult {
  double p_value = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
  bool degenerate = false;  // zero-variance differences
  double t_statistic = 0.0;
};

// Two-sided paired t-test on matched samples; p is Bonferroni-multiplied by
// num_comparisons and capped at 1.
PairedTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b,
                              double alpha, int num_comparisons);

struct TrialRecord {
  int motif_index = 0;
  double tempo = 0.0;
  performer::Condition condition = performer::Condition::spring;
  int trial = 0;
  bool failed = false;
  double distance = 0.0;
  std::string error;
};

struct TempoRow {
  double tempo = 0.0;
  double spring_mean = 0.0;
  double electro_mean = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
  bool degenerate = false;
  int pairs = 0;
};

struct GridResult {
  std::vector<TempoRow> rows;
  std::vector<TrialRecord> trials;
  int failures = 0;
};

// Recomputes every row's paired t-test from the stored per-trial records,
// pairing spring/electromechanical by (motif, trial) and Bonferroni-adjusting
// across the rows. run_grid calls this; it can be re-applied at another alpha.
void paired_tests(GridResult& grid, double alpha);

struct GridSpec {
  std::vector<performer::Motif> motifs;
  std::vector<double> tempi;
  std::vector<performer::Condition> conditions = {performer::Condition::spring,
                                                  performer::Condition::electromechanical};
  int trials_per_cell = 20;
  std::uint64_t base_seed = 42;
  double envelope_rate = 200.0;
  double alpha = 0.05;
  int measures_performed = 4;
  int emg_tune_steps = 200;
  int jobs = 1;

  void validate() const;
};

// Full tempo x motif x condition experiment: per-trial DTW distance against
// the reference envelope, per-(tempo,condition) means across motifs and
// trials, paired t-tests per tempo with Bonferroni correction. Seeds derive
// per cell per trial, so results are independent of evaluation order and of
// trials_per_cell growth. Infeasible trials are counted as failures and
// excluded from the means.
GridResult run_grid(const GridSpec& spec, const performer::ElbowModel& elbow,
                    const stick::StickParams& params, const stick::PidGains& gains_template,
                    const std::function<void(std::size_t done, std::size_t total)>& progress = {});

// One trial's normalized DTW distance against its reference (used by the
// trial command; identical math to the grid path).
double trial_distance(const performer::TrialSpec& spec, const performer::ElbowModel& elbow,
                      const stick::StickParams& params, const stick::PidGains& gains_template,
                      double envelope_rate, int emg_tune_steps);

// Table-style export: bpm,spring_mean,electro_mean,p_adjusted,significant.
std::string grid_to_csv(const GridResult& grid);
// Per-trial export: bpm,motif,condition,trial,distance (failures excluded).
std::string trials_to_csv(const GridResult& grid, const std::vector<performer::Motif>& motifs);

} // namespace drumsim::sync
