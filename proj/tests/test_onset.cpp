#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drumsim/emg.hpp"
#include "drumsim/onset.hpp"
#include "drumsim/rng.hpp"

#include <cmath>
#include <vector>

using namespace drumsim;
using namespace drumsim::onset;

TEST_CASE("bounded_q_decompose frame arithmetic") {
  DetectorConfig cfg;
  cfg.frame_size = 128;
  cfg.hop = 128;

  emg::ActivationSignal s;
  s.sample_rate = 8000;
  s.samples.assign(256, 0.0);
  const auto m = bounded_q_decompose(s, cfg);
  CHECK(m.num_frames == 2);
  CHECK(m.num_bands == 8);
  for (double p : m.power) CHECK(p == 0.0);
  CHECK(m.frame_times[0] == 0.0);
  CHECK(m.frame_times[1] == doctest::Approx(128.0 / 8000.0));

  s.samples.resize(100);  // shorter than one frame
  CHECK_THROWS_AS(bounded_q_decompose(s, cfg), std::invalid_argument);
}

TEST_CASE("pure tone concentrates in its band") {
  DetectorConfig cfg;
  cfg.frame_size = 512;  // 15.625 Hz bins keep band-edge leakage contained
  cfg.hop = 128;
  const int fs = 8000;
  // Band edges: 0, 62.5, 187.5, 437.5, 937.5, 1937.5, 3937.5, capped.
  struct Probe {
    double freq;
    std::size_t band;
  };
  for (const auto& probe : {Probe{31.25, 0}, Probe{125.0, 1}, Probe{312.5, 2}, Probe{687.5, 3},
                            Probe{1437.5, 4}, Probe{2937.5, 5}}) {
    emg::ActivationSignal sig;
    sig.sample_rate = fs;
    sig.samples.resize(4000);
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
      sig.samples[i] = std::sin(2.0 * 3.14159265358979 * probe.freq * i / fs);
    }
    const auto m = bounded_q_decompose(sig, cfg);
    // Steady-state frame away from edges.
    const std::size_t f = m.num_frames / 2;
    double total = 0.0;
    for (std::size_t b = 0; b < m.num_bands; ++b) total += m.at(b, f);
    const double in_band = m.at(probe.band, f);
    INFO("freq ", probe.freq, " band ", probe.band);
    CHECK(in_band >= 0.90 * total);
  }
}

TEST_CASE("detect_onsets on synthetic growth patterns") {
  DetectorConfig cfg;
  cfg.min_velocity = 0.1;
  cfg.min_gap = 0.05;

  EnvelopeMatrix m;
  m.num_bands = 1;
  m.num_frames = 12;
  m.frame_times = {0.0,   0.008, 0.016, 0.024, 0.032, 0.040,
                   0.048, 0.056, 0.064, 0.072, 0.080, 0.088};

  SUBCASE("all-zero matrix gives no onsets") {
    m.power.assign(12, 0.0);
    CHECK(detect_onsets(m, cfg).empty());
  }

  SUBCASE("single step rise gives one onset with its growth as velocity") {
    m.power = {0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    const auto ev = detect_onsets(m, cfg);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].time == doctest::Approx(0.024));
    CHECK(ev[0].velocity == doctest::Approx(1.0));
  }

  SUBCASE("two rises inside min_gap are suppressed to one") {
    m.power = {0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    // Rises at frames 2 and 4 (16 ms apart), min_gap 50 ms.
    const auto ev = detect_onsets(m, cfg);
    CHECK(ev.size() == 1);
  }

  SUBCASE("raising min_velocity never adds detections") {
    Rng rng(5);
    m.power.resize(12);
    for (auto& p : m.power) p = rng.uniform(0.0, 2.0);
    std::size_t prev = 1e9;
    for (double mv : {0.0, 0.2, 0.5, 1.0, 2.0, 5.0}) {
      DetectorConfig c2 = cfg;
      c2.min_velocity = mv;
      c2.min_gap = 0.0;
      const std::size_t n = detect_onsets(m, c2).size();
      CHECK(n <= prev);
      prev = n;
    }
  }

  SUBCASE("onset times strictly increasing with min_gap spacing") {
    Rng rng(7);
    EnvelopeMatrix big;
    big.num_bands = 1;
    big.num_frames = 400;
    big.power.resize(400);
    big.frame_times.resize(400);
    for (std::size_t i = 0; i < 400; ++i) {
      big.power[i] = rng.uniform(0.0, 1.0);
      big.frame_times[i] = 0.008 * static_cast<double>(i);
    }
    DetectorConfig c2 = cfg;
    c2.min_velocity = 0.05;
    const auto ev = detect_onsets(big, c2);
    for (std::size_t i = 1; i < ev.size(); ++i) {
      CHECK(ev[i].time - ev[i - 1].time >= c2.min_gap);
    }
  }
}

TEST_CASE("score_detection definition cases") {
  const std::vector<double> labels{1.0, 2.0, 3.0};

  SUBCASE("exact match is perfect") {
    std::vector<OnsetEvent> det{{1.0, 1}, {2.0, 1}, {3.0, 1}};
    const auto s = score_detection(det, labels, 0.025);
    CHECK(s.f1 == doctest::Approx(1.0));
    CHECK(s.true_positives == 3);
  }

  SUBCASE("empty detections give zero recall") {
    const auto s = score_detection({}, labels, 0.025);
    CHECK(s.recall == 0.0);
    CHECK(s.f1 == 0.0);
    CHECK(s.false_negatives == 3);
  }

  SUBCASE("9 of 10 matched with 1 false positive") {
    std::vector<double> many;
    std::vector<OnsetEvent> det;
    for (int i = 0; i < 10; ++i) many.push_back(1.0 + i);
    for (int i = 0; i < 9; ++i) det.push_back({1.0 + i, 1.0});
    det.push_back({100.0, 1.0});  // spurious
    const auto s = score_detection(det, many, 0.025);
    CHECK(s.precision == doctest::Approx(0.9));
    CHECK(s.recall == doctest::Approx(0.9));
    CHECK(s.f1 == doctest::Approx(0.9));
  }

  SUBCASE("matching is one-to-one") {
    std::vector<OnsetEvent> det{{1.0, 1}, {1.01, 1}};
    const auto s = score_detection(det, {1.0}, 0.05);
    CHECK(s.true_positives == 1);
    CHECK(s.false_positives == 1);
  }

  CHECK_THROWS_AS(score_detection({}, labels, 0.0), std::invalid_argument);
}

TEST_CASE("end to end: synthetic burst detected within 25 ms") {
  emg::FilterChainConfig chain;
  DetectorConfig det;

  const auto rec = emg::synth_emg({0.4}, {}, {}, 0.02, 1234);
  const auto onsets = detect_from_recording(rec, chain, det);
  REQUIRE(onsets.size() == 1);
  CHECK(std::abs(onsets[0].time - 0.4) <= 0.025);
}

TEST_CASE("end to end: 40-burst labeled recording scores F1 >= 0.90") {
  emg::FilterChainConfig chain;
  DetectorConfig det;

  Rng rng(2024);
  std::vector<double> bursts;
  double t = 0.5;
  for (int i = 0; i < 40; ++i) {
    bursts.push_back(t);
    t += rng.uniform(0.35, 0.7);
  }
  const auto rec = emg::synth_emg(bursts, {}, {}, 0.02, 77);
  const auto onsets = detect_from_recording(rec, chain, det);
  const auto score = score_detection(onsets, rec.labels, 0.025);
  INFO("precision ", score.precision, " recall ", score.recall);
  CHECK(score.f1 >= 0.90);
}

TEST_CASE("detection determinism") {
  emg::FilterChainConfig chain;
  DetectorConfig det;
  const auto rec = emg::synth_emg({0.3, 0.8, 1.3}, {}, {}, 0.02, 55);
  const auto a = detect_from_recording(rec, chain, det);
  const auto b = detect_from_recording(rec, chain, det);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].time == b[i].time);
    CHECK(a[i].velocity == b[i].velocity);
  }
}

TEST_CASE("onset CSV round trip") {
  std::vector<OnsetEvent> ev{{0.125, 0.5}, {1.0, 2.25}};
  const auto text = onsets_to_csv(ev);
  const auto back = onsets_from_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].time == 0.125);
  CHECK(back[1].velocity == 2.25);
}
