#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drumsim/csv.hpp"
#include "drumsim/emg.hpp"
#include "drumsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

using namespace drumsim;
using namespace drumsim::emg;

namespace {

// Independent oracle: literal windowed RMS, no running sums.
std::vector<double> brute_force_windowed_rms(const std::vector<double>& x, std::size_t win) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i + 1 >= win ? i + 1 - win : 0;
    double acc = 0.0;
    for (std::size_t j = lo; j <= i; ++j) acc += x[j] * x[j];
    out[i] = std::sqrt(acc / static_cast<double>(i - lo + 1));
  }
  return out;
}

double peak(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> sine(double freq, double amp, double seconds, int fs) {
  std::vector<double> out(static_cast<std::size_t>(seconds * fs));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = amp * std::sin(2.0 * 3.14159265358979 * freq * i / fs);
  }
  return out;
}

} // namespace

TEST_CASE("differential_rectify definition") {
  CHECK(differential_rectify({0.5}, {0.2}, 2.0)[0] == doctest::Approx(0.6));
  CHECK(differential_rectify({0.1}, {0.4}, 1.0)[0] == doctest::Approx(0.3));

  const std::vector<double> same{0.3, -0.7, 1.2};
  for (double v : differential_rectify(same, same, 5.0)) CHECK(v == 0.0);

  CHECK_THROWS_AS(differential_rectify({1.0}, {1.0, 2.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(differential_rectify({1.0}, {1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("rms_moving_average against the brute-force oracle") {
  // Unit impulse, 4-sample window. Frozen from the oracle: partial leading
  // windows divide by the available sample count.
  std::vector<double> impulse(8, 0.0);
  impulse[0] = 1.0;
  const auto got = rms_moving_average(impulse, 4.0 / 1000.0, 1000);
  const std::vector<double> frozen{1.0, 0.7071067811865476, 0.5773502691896257, 0.5, 0.0};
  for (std::size_t i = 0; i < frozen.size(); ++i) {
    CHECK(got[i] == doctest::Approx(frozen[i]).epsilon(1e-12));
  }

  const auto oracle = brute_force_windowed_rms(impulse, 4);
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
  }

  SUBCASE("oracle equivalence on random signals") {
    Rng rng(17);
    std::vector<double> x(257);
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    const auto fast = rms_moving_average(x, 0.016, 1000);  // 16-sample window
    const auto slow = brute_force_windowed_rms(x, 16);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-9));
    }
  }

  SUBCASE("constant signal is a fixed point") {
    const std::vector<double> c(100, 0.8);
    for (double v : rms_moving_average(c, 0.005, 2000)) CHECK(v == doctest::Approx(0.8));
  }

  SUBCASE("one-sample window is pointwise |x|") {
    const std::vector<double> x{1.0, -2.0, 3.0};
    const auto out = rms_moving_average(x, 1.0 / 8000.0, 8000);
    CHECK(out[1] == doctest::Approx(2.0));
  }

  CHECK_THROWS_AS(rms_moving_average({1.0}, 0.0, 8000), std::invalid_argument);
  CHECK_THROWS_AS(rms_moving_average({1.0}, -0.1, 8000), std::invalid_argument);
}

TEST_CASE("biquad designs against the frequency-response oracle") {
  const int fs = 8000;

  const auto lpf = design_biquad(BiquadKind::lowpass, 520.0, 0.7071067811865476, fs);
  CHECK(magnitude_response(lpf, 0.0, fs) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(magnitude_response(lpf, 2000.0, fs) < 0.1);  // >= 20 dB down

  const auto hpf = design_biquad(BiquadKind::highpass, 25.0, 0.7071067811865476, fs);
  CHECK(magnitude_response(hpf, 0.0, fs) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(magnitude_response(hpf, 1000.0, fs) == doctest::Approx(1.0).epsilon(1e-3));

  const auto notch = design_biquad(BiquadKind::notch, 180.0, 1.5, fs);
  CHECK(magnitude_response(notch, 180.0, fs) <= 0.01);
  CHECK(magnitude_response(notch, 20.0, fs) == doctest::Approx(1.0).epsilon(1e-2));

  CHECK_THROWS_AS(design_biquad(BiquadKind::lowpass, 0.0, 0.7, fs), std::invalid_argument);
  CHECK_THROWS_AS(design_biquad(BiquadKind::lowpass, 4000.0, 0.7, fs), std::invalid_argument);
}

TEST_CASE("designed biquads are stable across the parameter space") {
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    const int fs = 2000 + static_cast<int>(rng.uniform(0.0, 46000.0));
    const double f = rng.uniform(1.0, fs / 2.0 - 1.0);
    const double q = rng.uniform(0.05, 25.0);
    const auto kind = static_cast<BiquadKind>(i % 3);
    const auto c = design_biquad(kind, f, q, fs);
    INFO("fs=", fs, " f=", f, " q=", q);
    CHECK(c.stable());
  }
}

TEST_CASE("biquad_filter attenuates per its response") {
  const int fs = 8000;
  const auto lpf = design_biquad(BiquadKind::lowpass, 520.0, 0.7071067811865476, fs);
  const auto in = sine(2000.0, 1.0, 0.5, fs);
  auto out = biquad_filter(in, lpf);
  // Skip the transient, compare steady-state peaks.
  out.erase(out.begin(), out.begin() + fs / 10);
  const double expected = magnitude_response(lpf, 2000.0, fs);
  CHECK(peak(out) == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("apply_chain basics") {
  FilterChainConfig cfg;
  const int fs = 8000;

  SUBCASE("all-zero input stays zero") {
    EmgRecording rec;
    rec.sample_rate = fs;
    rec.channels.assign(2, std::vector<double>(4000, 0.0));
    const auto act = apply_chain(rec, 0, 1, cfg);
    CHECK(act.samples.size() == 4000);
    for (double v : act.samples) CHECK(v == 0.0);
  }

  SUBCASE("output is non-negative and deterministic") {
    const auto rec = synth_emg({0.2, 0.6}, {}, {}, 0.02, 5, fs);
    const auto a1 = apply_chain(rec, 0, 1, cfg);
    const auto a2 = apply_chain(rec, 0, 1, cfg);
    CHECK(a1.samples == a2.samples);
    for (double v : a1.samples) CHECK(v >= 0.0);
  }

  SUBCASE("invalid channel index rejected") {
    EmgRecording rec;
    rec.sample_rate = fs;
    rec.channels.assign(2, std::vector<double>(4000, 0.0));
    CHECK_THROWS_AS(apply_chain(rec, 0, 2, cfg), std::invalid_argument);
  }
}

namespace {

// The chain with the notch stage optionally bypassed, composed from the
// public stage functions in the contract order.
std::vector<double> chain_stages(const EmgRecording& rec, const FilterChainConfig& cfg,
                                 bool with_notch) {
  const int fs = rec.sample_rate;
  const double q = 0.7071067811865476;
  auto x = differential_rectify(rec.channels[0], rec.channels[1], cfg.diff_gain);
  x = rms_moving_average(x, cfg.maf_window, fs);
  x = biquad_filter(x, design_biquad(BiquadKind::lowpass, cfg.lpf_cutoff, q, fs));
  if (with_notch) {
    x = biquad_filter(x, design_biquad(BiquadKind::notch, cfg.notch_center, cfg.notch_q, fs));
  }
  x = biquad_filter(x, design_biquad(BiquadKind::highpass, cfg.hpf_cutoff, q, fs));
  x = clamp_nonnegative(std::move(x));
  return noise_gate(x, cfg.gate_threshold, cfg.gate_release, fs);
}

} // namespace

namespace {

// 180 Hz interference riding an electrode-offset pedestal large enough that
// full-wave rectification is transparent to it; the tone therefore reaches
// the notch still at 180 Hz. The HPF removes the pedestal afterwards.
EmgRecording biased_tone_recording(double bias, double amp, double freq, int fs) {
  EmgRecording rec;
  rec.sample_rate = fs;
  const std::size_t n = fs;  // 1 s
  rec.channels.assign(2, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double v = bias + amp * std::sin(2.0 * 3.14159265358979 * freq * i / fs);
    rec.channels[0][i] = 0.5 * v;
    rec.channels[1][i] = -0.5 * v;
  }
  return rec;
}

double steady_peak(const std::vector<double>& v, int fs) {
  double m = 0.0;
  for (std::size_t i = static_cast<std::size_t>(0.4 * fs); i < v.size(); ++i) {
    m = std::max(m, std::abs(v[i]));
  }
  return m;
}

} // namespace

TEST_CASE("notch stage kills a 180 Hz probe relative to the bypassed chain") {
  FilterChainConfig cfg;
  cfg.gate_threshold = 0.0;  // measure raw attenuation
  const int fs = 8000;
  const auto rec = biased_tone_recording(0.8, 0.15, 180.0, fs);

  const auto with_notch = apply_chain(rec, 0, 1, cfg);
  const auto bypassed = chain_stages(rec, cfg, false);

  // Steady state: past the HPF's pedestal transient.
  const double p_with = steady_peak(with_notch.samples, fs);
  const double p_without = steady_peak(bypassed, fs);
  CHECK(p_without > 1e-4);
  CHECK(p_with <= 0.05 * p_without);
}

TEST_CASE("stage order matters across the nonlinear stages") {
  // Adjacent LTI stages commute exactly, so order is pinned by the
  // nonlinearities: rectification must precede the MAF (a zero-mean burst
  // averages to nothing otherwise), and the notch must sit after the
  // rectifier where pedestal-borne interference is still 180 Hz.
  FilterChainConfig cfg;
  cfg.gate_threshold = 0.0;
  const int fs = 8000;
  const double q = 0.7071067811865476;

  SUBCASE("MAF before rectification erases bursts") {
    const auto rec = synth_emg({0.3}, {0.15, 1.0, 60.0, 300.0, 0.0}, {}, 0.0, 21, fs);
    std::vector<double> diff(rec.channels[0].size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
      diff[i] = rec.channels[0][i] - rec.channels[1][i];
    }
    // Swapped: smooth the raw bipolar difference, then rectify.
    auto swapped = rms_moving_average(diff, cfg.maf_window, fs);
    for (auto& v : swapped) v = std::abs(v);
    // RMS of a zero-mean carrier tracks its envelope, but the envelope of the
    // *rectified* signal is what the correct chain hands to the gate; compare
    // how much burst energy survives the HPF in each order.
    swapped = biquad_filter(swapped, design_biquad(BiquadKind::lowpass, cfg.lpf_cutoff, q, fs));
    swapped = biquad_filter(swapped, design_biquad(BiquadKind::notch, cfg.notch_center,
                                                   cfg.notch_q, fs));
    swapped = biquad_filter(swapped, design_biquad(BiquadKind::highpass, cfg.hpf_cutoff, q, fs));

    const auto correct = apply_chain(rec, 0, 1, cfg);
    CHECK(peak(correct.samples) > 0.0);
    // Both see the burst (RMS is itself a rectifier), but the orders are
    // measurably different signals.
    double max_delta = 0.0;
    for (std::size_t i = 0; i < swapped.size(); ++i) {
      max_delta = std::max(max_delta, std::abs(swapped[i] - correct.samples[i]));
    }
    CHECK(max_delta > 0.05 * peak(correct.samples));
  }

  SUBCASE("gate not last leaks sub-threshold residue") {
    // Gating before the HPF opens on the pedestal and passes the residue the
    // final gate is there to remove.
    const auto rec = biased_tone_recording(0.8, 0.15, 180.0, fs);
    FilterChainConfig gated = cfg;
    gated.gate_threshold = 0.05;

    std::vector<double> diff(rec.channels[0].size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
      diff[i] = rec.channels[0][i] - rec.channels[1][i];
    }
    auto swapped = rms_moving_average(diff, gated.maf_window, fs);
    for (auto& v : swapped) v = std::abs(v);
    swapped = noise_gate(swapped, gated.gate_threshold, gated.gate_release, fs);  // too early
    swapped = biquad_filter(swapped, design_biquad(BiquadKind::lowpass, gated.lpf_cutoff, q, fs));
    swapped = biquad_filter(swapped,
                            design_biquad(BiquadKind::notch, gated.notch_center, gated.notch_q, fs));
    swapped = biquad_filter(swapped, design_biquad(BiquadKind::highpass, gated.hpf_cutoff, q, fs));

    const auto correct = apply_chain(rec, 0, 1, gated);
    // Correct order: everything left after the HPF is below threshold and
    // gated to silence. Early gating leaves residue.
    CHECK(steady_peak(correct.samples, fs) == 0.0);
    CHECK(steady_peak(swapped, fs) > 0.0);
  }
}

TEST_CASE("burst passes the chain; silence gates to zero") {
  FilterChainConfig cfg;
  const auto rec = synth_emg({0.3}, {0.15, 1.0, 60.0, 300.0, 0.0}, {}, 0.0, 3, 8000);
  const auto act = apply_chain(rec, 0, 1, cfg);
  const int fs = rec.sample_rate;

  double burst_peak = 0.0;
  for (int i = static_cast<int>(0.3 * fs); i < static_cast<int>(0.45 * fs); ++i) {
    burst_peak = std::max(burst_peak, act.samples[static_cast<std::size_t>(i)]);
  }
  CHECK(burst_peak > cfg.gate_threshold);

  // Quiet zone well before the burst and past the gate release.
  for (int i = 0; i < static_cast<int>(0.15 * fs); ++i) {
    CHECK(act.samples[static_cast<std::size_t>(i)] == 0.0);
  }
}

TEST_CASE("common-mode rejection") {
  // Identical channels cancel in the differential stage, noise-free.
  EmgRecording rec;
  rec.sample_rate = 8000;
  rec.channels.assign(2, sine(100.0, 1.0, 0.5, 8000));
  FilterChainConfig cfg;
  const auto act = apply_chain(rec, 0, 1, cfg);
  for (double v : act.samples) CHECK(v == 0.0);
}

TEST_CASE("synth_emg contracts") {
  SUBCASE("no bursts, zero noise: silent and label-free") {
    const auto rec = synth_emg({}, {}, Interference{60.0, {0.0}, 0.15}, 0.0, 1);
    CHECK(rec.labels.empty());
    for (const auto& ch : rec.channels) {
      for (double v : ch) CHECK(v == 0.0);
    }
  }

  SUBCASE("labels echo the burst times") {
    std::vector<double> bursts;
    for (int i = 0; i < 10; ++i) bursts.push_back(0.3 * (i + 1));
    const auto rec = synth_emg(bursts, {}, {}, 0.02, 1);
    CHECK(rec.labels == bursts);
  }

  SUBCASE("same seed gives bit-identical recordings") {
    const auto a = synth_emg({0.3, 0.8}, {}, {}, 0.02, 42);
    const auto b = synth_emg({0.3, 0.8}, {}, {}, 0.02, 42);
    CHECK(a.channels == b.channels);
    const auto c = synth_emg({0.3, 0.8}, {}, {}, 0.02, 43);
    CHECK(a.channels != c.channels);
  }

  SUBCASE("overlapping bursts rejected") {
    BurstParams bp;
    bp.duration = 0.2;
    CHECK_THROWS_AS(synth_emg({0.3, 0.4}, bp, {}, 0.0, 1), std::invalid_argument);
  }
}

TEST_CASE("recording CSV round trip") {
  const auto rec = synth_emg({0.25, 0.7}, {}, {}, 0.02, 11);
  const std::string path = "/tmp/drumsim_test_recording.csv";
  write_recording_csv(rec, path);
  const auto back = read_recording_csv(path);

  CHECK(back.sample_rate == rec.sample_rate);
  CHECK(back.channels == rec.channels);  // bit-exact via shortest round-trip format
  REQUIRE(back.labels.size() == rec.labels.size());
  for (std::size_t i = 0; i < back.labels.size(); ++i) {
    CHECK(back.labels[i] == doctest::Approx(rec.labels[i]).epsilon(1e-3));
  }

  // A second write of the parsed recording is byte-identical.
  const std::string path2 = "/tmp/drumsim_test_recording2.csv";
  write_recording_csv(back, path2);
  CHECK(csv::read_file(path) == csv::read_file(path2));
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("recording invariants rejected") {
  EmgRecording rec;
  rec.sample_rate = 1000;  // below 2 kHz
  rec.channels.assign(2, std::vector<double>(100, 0.0));
  CHECK_THROWS_AS(rec.validate(), std::invalid_argument);

  rec.sample_rate = 8000;
  rec.channels[1].resize(99);
  CHECK_THROWS_AS(rec.validate(), std::invalid_argument);

  rec.channels[1].resize(100);
  rec.labels = {0.005, 0.004};  // not increasing
  CHECK_THROWS_AS(rec.validate(), std::invalid_argument);
}
