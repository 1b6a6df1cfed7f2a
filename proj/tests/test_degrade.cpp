// Copyright 2026 The ParaGSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/degrade.hpp"
#include "core/fft.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace paragse;
using doctest::Approx;

namespace {

double measured_snr_db(const std::vector<double>& clean,
                       const std::vector<double>& noisy) {
  double pc = 0, pn = 0;
  for (size_t i = 0; i < clean.size(); ++i) {
    double r = noisy[i] - clean[i];
    pc += clean[i] * clean[i];
    pn += r * r;
  }
  return 10.0 * std::log10(pc / pn);
}

}  // namespace

TEST_CASE("add_noise hits the requested SNR exactly") {
  auto clean = testutil::sine(440.0, 16000, 1.0, 0.5);
  auto noise = degrade::synth_noise("white", 16000, 16000, 7);

  for (double snr : {0.0, 5.0, 10.0, 15.0, 2.5, 7.5, 12.5, 17.5, -3.0}) {
    auto noisy = degrade::add_noise(clean, noise, snr, 11);
    CHECK(std::fabs(measured_snr_db(clean.samples, noisy.samples) - snr) <
          0.01);
  }
}

TEST_CASE("add_noise at 0 dB balances clean and noise power") {
  auto clean = testutil::sine(200.0, 16000, 0.5, 0.7);
  auto noise = degrade::synth_noise("pink", 8000, 16000, 9);
  auto noisy = degrade::add_noise(clean, noise, 0.0, 3);
  CHECK(std::fabs(measured_snr_db(clean.samples, noisy.samples)) < 0.01);
}

TEST_CASE("add_noise tiles short noise deterministically") {
  auto clean = testutil::sine(300.0, 16000, 1.0, 0.5);
  auto noise = degrade::synth_noise("white", 4000, 16000, 13);  // shorter
  auto a = degrade::add_noise(clean, noise, 10.0, 21);
  auto b = degrade::add_noise(clean, noise, 10.0, 21);
  CHECK(a.samples == b.samples);
  CHECK(std::fabs(measured_snr_db(clean.samples, a.samples) - 10.0) < 0.01);

  auto c = degrade::add_noise(clean, noise, 10.0, 22);
  CHECK(a.samples != c.samples);  // different offset
}

TEST_CASE("add_noise rejects degenerate inputs") {
  AudioBuffer silence;
  silence.samples.assign(1000, 0.0);
  auto noise = degrade::synth_noise("white", 1000, 16000, 5);
  CHECK_THROWS_AS(degrade::add_noise(silence, noise, 10.0, 1),
                  InvalidInputError);
  auto clean = testutil::sine(100.0, 16000, 0.1);
  CHECK_THROWS_AS(degrade::add_noise(clean, silence, 10.0, 1),
                  InvalidInputError);
  AudioBuffer wrong_rate = noise;
  wrong_rate.sample_rate = 8000;
  CHECK_THROWS_AS(degrade::add_noise(clean, wrong_rate, 10.0, 1),
                  InvalidInputError);
}

TEST_CASE("convolution with a unit impulse is the identity") {
  auto clean = testutil::chirp(100.0, 3000.0, 16000, 0.4);
  degrade::Rir rir;
  rir.impulse.sample_rate = 16000;
  rir.impulse.samples.assign(64, 0.0);
  rir.impulse.samples[0] = 1.0;
  auto out = degrade::convolve_rir(clean, rir);
  CHECK(testutil::max_abs_diff(out.samples, clean.samples) < 1e-12);
}

TEST_CASE("convolution with a delayed impulse shifts the signal") {
  auto clean = testutil::noise(16000, 0.25, 17, 0.5);
  degrade::Rir rir;
  rir.impulse.sample_rate = 16000;
  rir.impulse.samples.assign(256, 0.0);
  rir.impulse.samples[100] = 1.0;
  auto out = degrade::convolve_rir(clean, rir);
  // Peak normalization maps the shifted copy back to unit gain as long as
  // the clean peak is not inside the truncated tail.
  double worst = 0.0;
  for (size_t i = 100; i < out.samples.size(); ++i) {
    worst = std::max(worst, std::fabs(out.samples[i] - clean.samples[i - 100]));
  }
  CHECK(worst < 1e-9);
  for (size_t i = 0; i < 100; ++i) CHECK(std::fabs(out.samples[i]) < 1e-12);
}

TEST_CASE("convolution matches the naive time-domain oracle") {
  auto clean = testutil::noise(16000, 0.5, 19, 0.5);
  auto rir = degrade::synth_rir(0.25, 0.3, 16000, 23);
  auto out = degrade::convolve_rir(clean, rir);

  auto raw = oracle::convolve_direct(clean.samples, rir.impulse.samples);
  // Apply the documented post-processing: truncate (already same length)
  // and rescale to the clean peak.
  double peak_in = 0, peak_raw = 0;
  for (double v : clean.samples) peak_in = std::max(peak_in, std::fabs(v));
  for (double v : raw) peak_raw = std::max(peak_raw, std::fabs(v));
  for (double& v : raw) v *= peak_in / peak_raw;

  CHECK(testutil::max_abs_diff(out.samples, raw) < 1e-9);
}

TEST_CASE("convolution is linear in the clean signal") {
  auto a = testutil::noise(16000, 0.2, 29, 0.4);
  auto b = testutil::noise(16000, 0.2, 31, 0.4);
  auto rir = degrade::synth_rir(0.2, 0.25, 16000, 37);

  // Undo the output peak normalization so the raw linear responses are
  // compared.
  auto conv = [&](const AudioBuffer& x) {
    auto y = degrade::convolve_rir(x, rir);
    double peak_in = 0, p = 0;
    for (double v : x.samples) peak_in = std::max(peak_in, std::fabs(v));
    auto raw = oracle::convolve_direct(x.samples, rir.impulse.samples);
    for (double v : raw) p = std::max(p, std::fabs(v));
    for (double& v : y.samples) v *= p / peak_in;
    return y.samples;
  };
  AudioBuffer sum;
  sum.sample_rate = 16000;
  sum.samples.resize(a.samples.size());
  for (size_t i = 0; i < sum.samples.size(); ++i) {
    sum.samples[i] = a.samples[i] + b.samples[i];
  }
  auto ca = conv(a);
  auto cb = conv(b);
  auto cs = conv(sum);
  double worst = 0.0;
  for (size_t i = 0; i < cs.size(); ++i) {
    worst = std::max(worst, std::fabs(cs[i] - ca[i] - cb[i]));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("band_limit keeps the passband and rejects the stopband") {
  auto s2k = testutil::sine(2000.0, 16000, 1.0);
  auto out = degrade::band_limit(s2k, 8000);
  CHECK(out.samples.size() == s2k.samples.size());
  CHECK(out.sample_rate == 16000);
  CHECK(testutil::correlation(out.samples, s2k.samples) > 0.999);

  auto s6k = testutil::sine(6000.0, 16000, 1.0);
  auto cut = degrade::band_limit(s6k, 8000);
  CHECK(testutil::rms(cut.samples) < 0.01 * testutil::rms(s6k.samples));
}

TEST_CASE("band_limit rejects target rates at or above the sample rate") {
  auto a = testutil::sine(440.0, 16000, 0.1);
  CHECK_THROWS_AS(degrade::band_limit(a, 16000), InvalidInputError);
  CHECK_THROWS_AS(degrade::band_limit(a, 20000), InvalidInputError);
  CHECK_THROWS_AS(degrade::band_limit(a, 0), InvalidInputError);
}

TEST_CASE("apply_spec with an empty stage list is the identity") {
  auto clean = degrade::synth_speech(0.5, 16000, 41);
  degrade::Assets assets;  // none needed
  degrade::DegradationSpec spec;
  spec.seed = 9;
  auto [degraded, clean_out] = degrade::apply_spec(clean, spec, assets);
  CHECK(degraded.samples == clean.samples);
  CHECK(clean_out.samples == clean.samples);
}

TEST_CASE("apply_spec runs the mixed recipe in order and deterministically") {
  auto clean = degrade::synth_speech(1.0, 16000, 43);
  auto assets = degrade::synth_assets(5, 16000);

  degrade::DegradationSpec spec;
  spec.seed = 77;
  spec.stages.push_back({degrade::StageKind::reverb, "rir1", 0.0, 0});
  spec.stages.push_back({degrade::StageKind::noise, "white0", 7.5, 0});
  spec.stages.push_back({degrade::StageKind::bandlimit, "", 0.0, 8000});
  CHECK(degrade::format_spec(spec) ==
        "reverb(rir1);noise(white0,7.5);bandlimit(8000);seed=77");

  auto [d1, c1] = degrade::apply_spec(clean, spec, assets);
  auto [d2, c2] = degrade::apply_spec(clean, spec, assets);
  CHECK(d1.samples == d2.samples);
  CHECK(d1.samples.size() == clean.samples.size());

  degrade::DegradationSpec other = spec;
  other.seed = 78;
  auto [d3, c3] = degrade::apply_spec(clean, other, assets);
  CHECK(d1.samples != d3.samples);
}

TEST_CASE("apply_spec reports missing assets as lookup errors") {
  auto clean = degrade::synth_speech(0.3, 16000, 47);
  degrade::Assets assets;
  degrade::DegradationSpec spec;
  spec.stages.push_back({degrade::StageKind::noise, "nope", 5.0, 0});
  CHECK_THROWS_AS(degrade::apply_spec(clean, spec, assets), LookupError);
  spec.stages[0] = {degrade::StageKind::reverb, "gone", 0.0, 0};
  CHECK_THROWS_AS(degrade::apply_spec(clean, spec, assets), LookupError);
}

TEST_CASE("degradation spec text round-trips") {
  degrade::DegradationSpec spec;
  spec.seed = 123;
  spec.stages.push_back({degrade::StageKind::reverb, "rir0", 0.0, 0});
  spec.stages.push_back({degrade::StageKind::noise, "babble0", 12.5, 0});
  spec.stages.push_back({degrade::StageKind::bandlimit, "", 0.0, 8000});
  auto parsed = degrade::parse_spec(degrade::format_spec(spec));
  CHECK(parsed.seed == 123);
  REQUIRE(parsed.stages.size() == 3);
  CHECK(parsed.stages[0].kind == degrade::StageKind::reverb);
  CHECK(parsed.stages[0].asset_id == "rir0");
  CHECK(parsed.stages[1].snr_db == 12.5);
  CHECK(parsed.stages[2].target_hz == 8000);

  auto identity = degrade::parse_spec("identity;seed=4");
  CHECK(identity.stages.empty());
  CHECK(identity.seed == 4);

  CHECK_THROWS_AS(degrade::parse_spec("noise(white0)"), InvalidInputError);
  CHECK_THROWS_AS(degrade::parse_spec("warp(x)"), InvalidInputError);
}

TEST_CASE("pink noise falls close to -3 dB per octave") {
  const size_t n = 1 << 17;
  auto pink = degrade::synth_noise("pink", n, 16000, 51);

  // Averaged periodogram over non-overlapping 4096-sample segments.
  const size_t seg = 4096;
  std::vector<double> psd(seg / 2 + 1, 0.0);
  for (size_t s = 0; s < n / seg; ++s) {
    auto spec = dsp::rfft(pink.samples.data() + s * seg, seg, seg);
    for (size_t k = 0; k < psd.size(); ++k) {
      psd[k] += std::norm(spec[k]);
    }
  }

  // Least-squares slope of 10*log10(psd) against log2(f) over 100 Hz-4 kHz.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t count = 0;
  for (size_t k = 1; k < psd.size(); ++k) {
    double f = 16000.0 * static_cast<double>(k) / seg;
    if (f < 100.0 || f > 4000.0) continue;
    double x = std::log2(f);
    double y = 10.0 * std::log10(psd[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  double slope = (static_cast<double>(count) * sxy - sx * sy) /
                 (static_cast<double>(count) * sxx - sx * sx);
  CHECK(std::fabs(slope - (-3.0103)) < 0.5);
}

TEST_CASE("synthetic RIRs decay at the requested RT60") {
  for (double rt60 : {0.15, 0.3, 0.5}) {
    auto rir = degrade::synth_rir(rt60, rt60 * 1.6, 16000, 61);
    const auto& h = rir.impulse.samples;

    // Schroeder backward integral, then the -5 dB to -35 dB slope.
    std::vector<double> edc(h.size());
    double acc = 0.0;
    for (size_t i = h.size(); i-- > 0;) {
      acc += h[i] * h[i];
      edc[i] = acc;
    }
    size_t t5 = 0, t35 = 0;
    for (size_t i = 0; i < edc.size(); ++i) {
      double db = 10.0 * std::log10(edc[i] / edc[0]);
      if (t5 == 0 && db <= -5.0) t5 = i;
      if (db <= -35.0) {
        t35 = i;
        break;
      }
    }
    REQUIRE(t35 > t5);
    double est = 2.0 * static_cast<double>(t35 - t5) / 16000.0;
    CHECK(est == Approx(rt60).epsilon(0.10));
  }
}

TEST_CASE("synthetic assets are deterministic under the seed") {
  auto a = degrade::synth_assets(71, 16000);
  auto b = degrade::synth_assets(71, 16000);
  CHECK(a.noise.at("white0").samples == b.noise.at("white0").samples);
  CHECK(a.noise.at("pink1").samples == b.noise.at("pink1").samples);
  CHECK(a.noise.at("babble0").samples == b.noise.at("babble0").samples);
  CHECK(a.rirs.at("rir2").impulse.samples == b.rirs.at("rir2").impulse.samples);

  auto c = degrade::synth_assets(72, 16000);
  CHECK(a.noise.at("white0").samples != c.noise.at("white0").samples);

  auto s1 = degrade::synth_speech(1.0, 16000, 81);
  auto s2 = degrade::synth_speech(1.0, 16000, 81);
  CHECK(s1.samples == s2.samples);
}

TEST_CASE("unknown noise kinds are rejected") {
  CHECK_THROWS_AS(degrade::synth_noise("brown", 100, 16000, 1),
                  InvalidInputError);
}
