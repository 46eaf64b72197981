#include "drumsim/sync.hpp"

#include "drumsim/csv.hpp"
#include "drumsim/kernels.hpp"
#include "drumsim/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace drumsim::sync {

namespace {
constexpr double kPulseWidth = 0.020;  // seconds
constexpr double kPi = 3.141592653589793238462643;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
} // namespace

Envelope onset_envelope(const std::vector<stick::StrikeEvent>& strikes, double rate,
                        double duration) {
  require(rate > 0.0, "onset_envelope: rate must be > 0");
  require(duration > 0.0, "onset_envelope: duration must be > 0");

  Envelope env;
  env.rate = rate;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * rate)) + 1;
  env.samples.assign(n, 0.0);

  const double half = kPulseWidth / 2.0;
  for (const auto& s : strikes) {
    require(s.time >= 0.0 && s.time <= duration, "onset_envelope: strike outside duration");
    const long k0 = std::max<long>(0, static_cast<long>(std::ceil((s.time - half) * rate)));
    const long k1 = std::min<long>(static_cast<long>(n) - 1,
                                   static_cast<long>(std::floor((s.time + half) * rate)));
    for (long k = k0; k <= k1; ++k) {
      const double tau = static_cast<double>(k) / rate - s.time;
      env.samples[static_cast<std::size_t>(k)] +=
          s.velocity * std::cos(kPi * tau / kPulseWidth);
    }
  }
  return env;
}

Envelope strike_voice_envelope(const std::vector<stick::StrikeEvent>& strikes, double rate,
                               double duration) {
  require(rate > 0.0, "strike_voice_envelope: rate must be > 0");
  require(duration > 0.0, "strike_voice_envelope: duration must be > 0");

  constexpr double kAttack = 0.010;   // s
  constexpr double kDecayTau = 0.060; // s
  constexpr double kSupport = 0.250;  // s

  Envelope env;
  env.rate = rate;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * rate)) + 1;
  env.samples.assign(n, 0.0);

  for (const auto& s : strikes) {
    require(s.time >= 0.0 && s.time <= duration, "strike_voice_envelope: strike outside duration");
    const long k0 = std::max<long>(0, static_cast<long>(std::ceil(s.time * rate)));
    const long k1 = std::min<long>(static_cast<long>(n) - 1,
                                   static_cast<long>(std::floor((s.time + kSupport) * rate)));
    for (long k = k0; k <= k1; ++k) {
      const double tau = static_cast<double>(k) / rate - s.time;
      double shape;
      if (tau < kAttack) {
        shape = 0.5 * (1.0 - std::cos(kPi * tau / kAttack));
      } else {
        shape = std::exp(-(tau - kAttack) / kDecayTau);
      }
      env.samples[static_cast<std::size_t>(k)] += s.velocity * shape;
    }
  }
  return env;
}

DtwResult dtw_distance(const Envelope& a, const Envelope& b) {
  require(!a.samples.empty() && !b.samples.empty(), "dtw_distance: empty envelope");
  require(a.rate == b.rate, "dtw_distance: envelope rates differ");

  const std::size_t n = a.samples.size();
  const std::size_t m = b.samples.size();
  std::vector<double> d(n * m);
  std::vector<double> cost_row(m);
  std::vector<double> relaxed(m);

  // Row 0: only horizontal steps.
  kernels::abs_diff(a.samples[0], b.samples.data(), cost_row.data(), m);
  d[0] = cost_row[0];
  for (std::size_t j = 1; j < m; ++j) d[j] = d[j - 1] + cost_row[j];

  for (std::size_t i = 1; i < n; ++i) {
    double* row = d.data() + i * m;
    const double* prev = d.data() + (i - 1) * m;
    kernels::abs_diff(a.samples[i], b.samples.data(), cost_row.data(), m);
    // relaxed[j] = cost[j] + min(prev[j-1], prev[j]); the in-row horizontal
    // dependency is resolved by the scalar pass below.
    kernels::add_shifted_min(cost_row.data(), prev, relaxed.data(), m);
    row[0] = relaxed[0];
    for (std::size_t j = 1; j < m; ++j) {
      row[j] = std::min(relaxed[j], cost_row[j] + row[j - 1]);
    }
  }

  DtwResult out;
  out.total_cost = d[n * m - 1];

  // Traceback, diagonal preferred on ties.
  std::size_t i = n - 1, j = m - 1;
  out.path.emplace_back(static_cast<int>(i), static_cast<int>(j));
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = d[(i - 1) * m + (j - 1)];
      const double up = d[(i - 1) * m + j];
      const double left = d[i * m + (j - 1)];
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    out.path.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  std::reverse(out.path.begin(), out.path.end());
  out.normalized_distance = out.total_cost / static_cast<double>(out.path.size());
  return out;
}

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double dd = 1.0 - qab * x / qap;
  if (std::abs(dd) < kTiny) dd = kTiny;
  dd = 1.0 / dd;
  double h = dd;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    dd = 1.0 + aa * dd;
    if (std::abs(dd) < kTiny) dd = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    dd = 1.0 / dd;
    h *= dd * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    dd = 1.0 + aa * dd;
    if (std::abs(dd) < kTiny) dd = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    dd = 1.0 / dd;
    const double del = dd * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt =
      std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * betacf(a, b, x) / a;
  }
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

} // namespace

double student_t_two_sided_p(double t, double df) {
  require(df > 0.0, "student_t_two_sided_p: df must be > 0");
  return reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
}

PairedTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b,
                              double alpha, int num_comparisons) {
  require(a.size() == b.size(), "paired_ttest: sample size mismatch");
  require(a.size() >= 2, "paired_ttest: need at least 2 pairs");
  require(num_comparisons >= 1, "paired_ttest: num_comparisons must be >= 1");

  const std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);

  PairedTestResult out;
  if (var <= 0.0) {
    out.degenerate = true;
    out.p_value = 1.0;
    out.p_adjusted = 1.0;
    return out;
  }
  out.t_statistic = mean / std::sqrt(var / static_cast<double>(n));
  out.p_value = student_t_two_sided_p(out.t_statistic, static_cast<double>(n - 1));
  out.p_adjusted = std::min(1.0, out.p_value * num_comparisons);
  out.significant = out.p_adjusted < alpha;
  return out;
}

void GridSpec::validate() const {
  require(!motifs.empty(), "GridSpec.motifs must be non-empty");
  require(!tempi.empty(), "GridSpec.tempi must be non-empty");
  require(!conditions.empty(), "GridSpec.conditions must be non-empty");
  require(trials_per_cell >= 2, "GridSpec.trials_per_cell must be >= 2 for statistics");
  require(envelope_rate > 0.0, "GridSpec.envelope_rate must be > 0");
  require(jobs >= 1, "GridSpec.jobs must be >= 1");
  for (const auto& m : motifs) m.validate();
}

namespace {

// Both envelopes are shifted by this much so negative timing jitter on the
// first hit stays inside the envelope span.
constexpr double kEnvelopePad = 0.1;

double evaluate_trial(const performer::TrialSpec& spec, const performer::ElbowModel& elbow,
                      const stick::StickParams& params, const stick::PidGains& gains_template,
                      double envelope_rate, int emg_tune_steps) {
  const auto ref = performer::render_reference_events(spec.motif, spec.tempo,
                                                      spec.measures_performed);
  const double measure = 4.0 * 60.0 / spec.tempo;
  const double duration = spec.measures_performed * measure + 2.0 * kEnvelopePad;

  std::vector<stick::StrikeEvent> ref_strikes;
  ref_strikes.reserve(ref.times.size());
  for (std::size_t i = 0; i < ref.times.size(); ++i) {
    ref_strikes.push_back(
        {ref.times[i] + kEnvelopePad, ref.accents[i] * performer::kNominalStrikeSpeed});
  }

  auto performed = performer::perform_trial(spec, elbow, params, gains_template, emg_tune_steps);
  for (auto& s : performed) s.time += kEnvelopePad;

  const auto env_ref = strike_voice_envelope(ref_strikes, envelope_rate, duration);
  const auto env_perf = strike_voice_envelope(performed, envelope_rate, duration);
  return dtw_distance(env_ref, env_perf).normalized_distance;
}

} // namespace

double trial_distance(const performer::TrialSpec& spec, const performer::ElbowModel& elbow,
                      const stick::StickParams& params, const stick::PidGains& gains_template,
                      double envelope_rate, int emg_tune_steps) {
  return evaluate_trial(spec, elbow, params, gains_template, envelope_rate, emg_tune_steps);
}

GridResult run_grid(const GridSpec& spec, const performer::ElbowModel& elbow,
                    const stick::StickParams& params, const stick::PidGains& gains_template,
                    const std::function<void(std::size_t, std::size_t)>& progress) {
  spec.validate();
  elbow.validate();
  params.validate();
  gains_template.validate();

  struct Cell {
    int motif_index;
    std::size_t tempo_index;
    std::size_t condition_index;
  };
  std::vector<Cell> cells;
  for (std::size_t ti = 0; ti < spec.tempi.size(); ++ti) {
    for (std::size_t mi = 0; mi < spec.motifs.size(); ++mi) {
      for (std::size_t ci = 0; ci < spec.conditions.size(); ++ci) {
        cells.push_back({static_cast<int>(mi), ti, ci});
      }
    }
  }

  GridResult result;
  result.trials.resize(cells.size() * static_cast<std::size_t>(spec.trials_per_cell));

  std::atomic<std::size_t> next_cell{0};
  std::atomic<std::size_t> done_cells{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t ci = next_cell.fetch_add(1);
      if (ci >= cells.size()) return;
      const Cell& cell = cells[ci];
      const double tempo = spec.tempi[cell.tempo_index];
      const performer::Condition condition = spec.conditions[cell.condition_index];
      for (int trial = 0; trial < spec.trials_per_cell; ++trial) {
        TrialRecord rec;
        rec.motif_index = cell.motif_index;
        rec.tempo = tempo;
        rec.condition = condition;
        rec.trial = trial;
        performer::TrialSpec ts;
        ts.motif = spec.motifs[static_cast<std::size_t>(cell.motif_index)];
        ts.tempo = tempo;
        ts.condition = condition;
        ts.measures_performed = spec.measures_performed;
        ts.seed = derive_seed(spec.base_seed, cell.motif_index,
                              static_cast<std::uint64_t>(std::llround(tempo * 1000.0)),
                              static_cast<std::uint64_t>(condition), trial);
        try {
          rec.distance = evaluate_trial(ts, elbow, params, gains_template, spec.envelope_rate,
                                        spec.emg_tune_steps);
        } catch (const std::exception& e) {
          rec.failed = true;
          rec.error = e.what();
        }
        result.trials[ci * static_cast<std::size_t>(spec.trials_per_cell) +
                      static_cast<std::size_t>(trial)] = std::move(rec);
      }
      const std::size_t done = done_cells.fetch_add(1) + 1;
      if (progress) progress(done, cells.size());
    }
  };

  if (spec.jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int threads = std::min<int>(spec.jobs, static_cast<int>(cells.size()));
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& rec : result.trials) {
    if (rec.failed) ++result.failures;
  }

  result.rows.resize(spec.tempi.size());
  for (std::size_t ti = 0; ti < spec.tempi.size(); ++ti) {
    result.rows[ti].tempo = spec.tempi[ti];
  }
  paired_tests(result, spec.alpha);
  return result;
}

void paired_tests(GridResult& grid, double alpha) {
  const int num_tempi = static_cast<int>(grid.rows.size());
  for (auto& row : grid.rows) {
    // (motif, trial) -> per-condition record, successful trials only.
    std::map<std::pair<int, int>, std::pair<const TrialRecord*, const TrialRecord*>> cells;
    double spring_sum = 0.0, electro_sum = 0.0;
    int spring_n = 0, electro_n = 0;
    for (const auto& rec : grid.trials) {
      if (rec.tempo != row.tempo || rec.failed) continue;
      auto& slot = cells[{rec.motif_index, rec.trial}];
      if (rec.condition == performer::Condition::spring) {
        slot.first = &rec;
        spring_sum += rec.distance;
        ++spring_n;
      } else {
        slot.second = &rec;
        electro_sum += rec.distance;
        ++electro_n;
      }
    }

    std::vector<double> spring_paired, electro_paired;
    for (const auto& [key, slot] : cells) {
      if (slot.first && slot.second) {
        spring_paired.push_back(slot.first->distance);
        electro_paired.push_back(slot.second->distance);
      }
    }

    row.spring_mean = spring_n > 0 ? spring_sum / spring_n : 0.0;
    row.electro_mean = electro_n > 0 ? electro_sum / electro_n : 0.0;
    row.pairs = static_cast<int>(spring_paired.size());
    row.p_value = 1.0;
    row.p_adjusted = 1.0;
    row.significant = false;
    row.degenerate = false;
    if (row.pairs >= 2) {
      const auto test = paired_ttest(spring_paired, electro_paired, alpha, num_tempi);
      row.p_value = test.p_value;
      row.p_adjusted = test.p_adjusted;
      row.significant = test.significant;
      row.degenerate = test.degenerate;
    }
  }
}

std::string grid_to_csv(const GridResult& grid) {
  std::string out = "bpm,spring_mean,electro_mean,p_adjusted,significant\n";
  for (const auto& row : grid.rows) {
    out += csv::format_double(row.tempo);
    out += ',';
    out += csv::format_double(row.spring_mean);
    out += ',';
    out += csv::format_double(row.electro_mean);
    out += ',';
    out += csv::format_double(row.p_adjusted);
    out += ',';
    out += row.significant ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string trials_to_csv(const GridResult& grid, const std::vector<performer::Motif>& motifs) {
  std::string out = "bpm,motif,condition,trial,distance\n";
  for (const auto& rec : grid.trials) {
    if (rec.failed) continue;
    out += csv::format_double(rec.tempo);
    out += ',';
    out += motifs[static_cast<std::size_t>(rec.motif_index)].name;
    out += ',';
    out += performer::condition_name(rec.condition);
    out += ',';
    out += std::to_string(rec.trial);
    out += ',';
    out += csv::format_double(rec.distance);
    out += '\n';
  }
  return out;
}

} // namespace drumsim::sync
