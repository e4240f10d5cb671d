// Copyright 2026 The Sketchvoice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sketchvoice/acoustic.h"
#include "sketchvoice/errors.h"
#include "sketchvoice/nn/ops.h"

using namespace sketchvoice;

namespace {

ModelConfig small_config() {
  ModelConfig c = ModelConfig::desk();
  c.vae_channels = 8;
  c.unet_channels = 16;
  c.unet_time_dim = 32;
  return c;
}

Matrix ramp_mel(int frames, int bins) {
  Matrix m(frames, bins);
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < bins; ++f) m(t, f) = -4.0f + 0.05f * f + 0.3f * std::sin(0.2f * t);
  }
  return m;
}

// alpha_bar straight from the linear beta definition.
double oracle_alpha_bar(int t, int steps, double b0, double b1) {
  double ab = 1.0;
  for (int i = 0; i <= t; ++i) ab *= 1.0 - (b0 + (b1 - b0) * i / (steps - 1));
  return ab;
}

bool same_values(const nn::Tensor& a, const nn::Tensor& b) {
  return std::equal(a.data().begin(), a.data().end(), b.data().begin(), b.data().end());
}

bool all_finite(const nn::Tensor& t) {
  for (float v : t.data()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("vae latent shape for T=64") {
  const ModelConfig c = small_config();
  nn::Rng rng(1);
  Vae vae(c, rng);
  const nn::Tensor img = mel_to_image(ramp_mel(64, 80), MelStats{}, 4);
  const Posterior p = vae.encode(img);
  CHECK(p.mean.shape() == nn::Shape{8, 16, 20});
  CHECK(p.logvar.shape() == nn::Shape{8, 16, 20});
  CHECK(vae.decode(p.mean).shape() == nn::Shape{1, 64, 80});
}

TEST_CASE("vae shape round trip for unaligned lengths") {
  const ModelConfig c = small_config();
  nn::Rng rng(2);
  Vae vae(c, rng);
  for (int frames : {4, 5, 37, 63, 64, 65}) {
    const Matrix mel = ramp_mel(frames, 80);
    CHECK(padded_frames(frames, 4) % 4 == 0);
    CHECK(padded_frames(frames, 4) >= frames);
    const nn::Tensor img = mel_to_image(mel, MelStats{}, 4);
    const Matrix back = image_to_mel(vae.decode(vae.encode(img).mean), MelStats{}, frames);
    CHECK(back.rows() == frames);
    CHECK(back.cols() == 80);
  }
}

TEST_CASE("mel padding uses the minimum and survives the image round trip") {
  const Matrix mel = ramp_mel(6, 80);
  const MelStats stats{-2.0, 1.5};
  const nn::Tensor img = mel_to_image(mel, stats, 4);
  REQUIRE(img.shape() == nn::Shape{1, 8, 80});
  const float low = mel.minCoeff();
  CHECK(img.data()[7 * 80 + 3] * 1.5f - 2.0f == doctest::Approx(low).epsilon(1e-6));
  const Matrix back = image_to_mel(img, stats, 6);
  CHECK((back - mel).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("vae mean path is deterministic and rejects bad input") {
  const ModelConfig c = small_config();
  nn::Rng rng(3);
  Vae vae(c, rng);
  const nn::Tensor img = mel_to_image(ramp_mel(16, 80), MelStats{}, 4);
  CHECK(same_values(vae.encode(img).mean, vae.encode(img).mean));

  Matrix bad = ramp_mel(16, 80);
  bad(3, 3) = std::nanf("");
  CHECK_THROWS_AS(vae.encode(mel_to_image(bad, MelStats{}, 4)), NumericalError);
  CHECK_THROWS_AS(vae.decode(nn::Tensor::zeros({3, 4, 20})), InvalidArgument);
  CHECK(all_finite(vae.decode(nn::Tensor::zeros({8, 4, 20}))));
}

TEST_CASE("kl term is non-negative") {
  const ModelConfig c = small_config();
  nn::Rng rng(4);
  Vae vae(c, rng);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix mel = ramp_mel(32, 80);
    std::normal_distribution<float> n(0.0f, 1.0f + trial);
    for (int i = 0; i < mel.size(); ++i) mel.data()[i] += n(rng);
    const Posterior p = vae.encode(mel_to_image(mel, MelStats{}, 4));
    CHECK(nn::gaussian_kl(p.mean, p.logvar).item() >= 0.0f);
  }
}

TEST_CASE("value code table and embedder ranges") {
  const std::vector<float> table = value_code_table(256, 80);
  REQUIRE(table.size() == 256u * 80u);
  for (float v : table) CHECK(std::abs(v) <= 1.0f);
  // distinct levels get distinct codes
  CHECK(table[0] != table[255 * 80]);

  const ModelConfig c = small_config();
  nn::Rng rng(5);
  ProsodyEmbedder embed(c, rng);
  const std::vector<double> values = {-3.0, 0.0, 3.0, 10.0};
  const nn::Tensor e = embed.embed_pitch(values);
  CHECK(e.shape() == nn::Shape{4, 80});
  // 10.0 clamps to the top bin, same as 3.0
  for (int f = 0; f < 80; ++f) CHECK(e.data()[3 * 80 + f] == e.data()[2 * 80 + f]);
  CHECK_FALSE(same_values(embed.embed_energy(values), e));
}

TEST_CASE("quantization ranges from stats") {
  StatsPair stats;
  stats.pitch = {200.0, 50.0, 100.0, 400.0};
  stats.energy = {-30.0, 10.0, -60.0, -10.0};
  const QuantRanges q = QuantRanges::from_stats(stats, 0.1);
  // normalised extremes are -2 and 4, span 6, margin 0.6
  CHECK(q.pitch_low == doctest::Approx(-2.6));
  CHECK(q.pitch_high == doctest::Approx(4.6));
  CHECK(q.energy_low == doctest::Approx(-3.5));
  CHECK(q.energy_high == doctest::Approx(2.5));
  const QuantRanges back = QuantRanges::from_json(q.to_json());
  CHECK(back.pitch_high == q.pitch_high);
  CHECK(back.energy_low == q.energy_low);
}

TEST_CASE("condition assembly") {
  const int m = 3;
  const std::vector<float> proj_values = [] {
    std::vector<float> v(3 * 80);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.01f * static_cast<float>(i);
    return v;
  }();
  const nn::Tensor projected = nn::Tensor::from({m, 80}, proj_values);
  const nn::Tensor zero = nn::Tensor::zeros({m, 80});
  const DurationAlignment d = DurationAlignment::from_frames({2, 1, 3});

  const ConditionBundle b = assemble_conditions(projected, zero, zero, zero, zero, d);
  CHECK(b.frames() == 6);
  CHECK(b.pitch_sketch_frame.dim(0) == 6);
  CHECK(b.energy_sketch_frame.dim(0) == 6);
  const int rows[6] = {0, 0, 1, 2, 2, 2};
  for (int t = 0; t < 6; ++t) {
    for (int f = 0; f < 80; ++f) {
      CHECK(b.text_frame.data()[t * 80 + f] == proj_values[rows[t] * 80 + f]);
    }
  }

  const nn::Tensor p = nn::Tensor::full({m, 80}, 0.5f);
  const nn::Tensor e = nn::Tensor::full({m, 80}, -0.25f);
  const ConditionBundle sum = assemble_conditions(projected, p, e, zero, zero, d);
  CHECK(sum.text_frame.data()[5] == doctest::Approx(proj_values[5] + 0.25f));

  CHECK_THROWS_AS(assemble_conditions(projected, nn::Tensor::zeros({2, 80}), zero, zero, zero, d),
                  InvalidArgument);
  CHECK_THROWS_AS(
      assemble_conditions(projected, zero, zero, zero, zero, DurationAlignment::from_frames({1, 1})),
      InvalidArgument);
}

TEST_CASE("denoiser input channel arithmetic") {
  const ModelConfig c = small_config();
  CHECK(c.denoiser_in_channels() == 11);

  nn::Rng rng(6);
  const nn::Tensor z = gaussian_noise({8, 16, 20}, rng);
  const nn::Tensor cond = nn::Tensor::zeros({3, 16, 20});
  const nn::Tensor in = build_denoiser_input(z, cond);
  REQUIRE(in.shape() == nn::Shape{11, 16, 20});
  for (int i = 0; i < 8 * 16 * 20; ++i) CHECK(in.data()[i] == z.data()[i]);
  for (int i = 8 * 16 * 20; i < 11 * 16 * 20; ++i) CHECK(in.data()[i] == 0.0f);
  CHECK_THROWS_AS(build_denoiser_input(z, nn::Tensor::zeros({3, 15, 20})), InvalidArgument);

  // bundle of 61 frames pads to 64 and pools to 16 x 20
  ConditionBundle b;
  b.text_frame = nn::Tensor::full({61, 80}, 1.0f);
  b.pitch_sketch_frame = nn::Tensor::zeros({61, 80});
  b.energy_sketch_frame = nn::Tensor::zeros({61, 80});
  const nn::Tensor ch = condition_channels(b, 4);
  REQUIRE(ch.shape() == nn::Shape{3, 16, 20});
  CHECK(ch.data()[0] == doctest::Approx(1.0f));
  // last row holds one real frame out of four
  CHECK(ch.data()[15 * 20] == doctest::Approx(0.25f));
  CHECK(build_denoiser_input(z, b, 4).shape() == nn::Shape{11, 16, 20});

  Denoiser net(c, rng);
  const nn::Tensor eps = net.forward(in, 500);
  CHECK(eps.shape() == nn::Shape{8, 16, 20});
  CHECK(all_finite(eps));
  CHECK(net.forward(build_denoiser_input(gaussian_noise({8, 5, 20}, rng), nn::Tensor::zeros({3, 5, 20})), 3)
            .shape() == nn::Shape{8, 5, 20});
}

TEST_CASE("linear schedule matches the closed form") {
  const DiffusionSchedule s(1000, 1e-4, 0.02);
  for (int t : {0, 1, 10, 250, 999}) {
    CHECK(s.alpha_bar(t) == doctest::Approx(oracle_alpha_bar(t, 1000, 1e-4, 0.02)).epsilon(1e-12));
  }
  const std::vector<int> ts = s.sampling_timesteps(50);
  REQUIRE(ts.size() == 50u);
  CHECK(ts.back() == 999);
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] > ts[i - 1]);
  CHECK(s.sampling_timesteps(1000).front() == 0);
}

TEST_CASE("zero noise prediction scales the latent") {
  const DiffusionSchedule s(1000, 1e-4, 0.02);
  nn::Rng rng(7);
  const nn::Tensor z = gaussian_noise({2, 3, 4}, rng);
  const NoisePredictor zero = [](const nn::Tensor& x, int) { return nn::Tensor::zeros(x.shape()); };
  for (auto [t, tp] : {std::pair{999, 979}, std::pair{500, 480}, std::pair{19, -1}}) {
    const nn::Tensor out = ldm_step(z, t, tp, zero, s, SamplerKind::kDeterministic, nullptr);
    const double ab = oracle_alpha_bar(t, 1000, 1e-4, 0.02);
    const double abp = tp >= 0 ? oracle_alpha_bar(tp, 1000, 1e-4, 0.02) : 1.0;
    const double k = std::sqrt(abp / ab);
    for (std::size_t i = 0; i < z.data().size(); ++i) {
      CHECK(out.data()[i] == doctest::Approx(k * z.data()[i]).epsilon(1e-5));
    }
  }
  CHECK_THROWS_AS(ldm_step(z, 1000, 10, zero, s, SamplerKind::kDeterministic, nullptr),
                  InvalidArgument);
  CHECK_THROWS_AS(ldm_step(z, -1, -1, zero, s, SamplerKind::kDeterministic, nullptr),
                  InvalidArgument);
  CHECK_THROWS_AS(ldm_step(z, 10, 10, zero, s, SamplerKind::kDeterministic, nullptr),
                  InvalidArgument);
  CHECK_THROWS_AS(ldm_step(z, 10, 5, zero, s, SamplerKind::kAncestral, nullptr), InvalidArgument);
}

TEST_CASE("diffuse matches the forward marginal") {
  const DiffusionSchedule s(1000, 1e-4, 0.02);
  const nn::Tensor z0 = nn::Tensor::full({1, 1, 2}, 2.0f);
  const nn::Tensor noise = nn::Tensor::full({1, 1, 2}, -1.0f);
  const double ab = oracle_alpha_bar(300, 1000, 1e-4, 0.02);
  const nn::Tensor zt = diffuse(z0, noise, s, 300);
  CHECK(zt.data()[0] == doctest::Approx(2.0 * std::sqrt(ab) - std::sqrt(1.0 - ab)).epsilon(1e-6));
}

TEST_CASE("velocity target and noise recovery agree") {
  const DiffusionSchedule s(1000, 1e-4, 0.02);
  nn::Rng rng(9);
  const nn::Tensor z0 = gaussian_noise({2, 3, 4}, rng);
  const nn::Tensor noise = gaussian_noise({2, 3, 4}, rng);
  for (int t : {0, 400, 999}) {
    const nn::Tensor zt = diffuse(z0, noise, s, t);
    const double ab = oracle_alpha_bar(t, 1000, 1e-4, 0.02);
    const nn::Tensor v = prediction_target(z0, noise, s, t, Prediction::kVelocity);
    CHECK(v.data()[5] ==
          doctest::Approx(std::sqrt(ab) * noise.data()[5] - std::sqrt(1 - ab) * z0.data()[5])
              .epsilon(1e-5));
    const nn::Tensor back = noise_from_prediction(v, zt, s, t, Prediction::kVelocity);
    for (std::size_t i = 0; i < back.data().size(); ++i) {
      CHECK(back.data()[i] == doctest::Approx(noise.data()[i]).epsilon(1e-4));
    }
    CHECK(same_values(prediction_target(z0, noise, s, t, Prediction::kEpsilon), noise));
  }
  CHECK(prediction_from_string("v") == Prediction::kVelocity);
  CHECK_THROWS_AS(prediction_from_string("x0"), InvalidArgument);
}

TEST_CASE("sampling is seeded and finite") {
  const ModelConfig c = small_config();
  nn::Rng init(8);
  Denoiser net(c, init);
  const DiffusionSchedule s = DiffusionSchedule::from_config(c);
  const nn::Tensor cond = nn::Tensor::full({3, 4, 20}, 0.1f);
  const NoisePredictor predict = conditioned_predictor(net, cond, s, Prediction::kVelocity);
  for (SamplerKind kind : {SamplerKind::kDeterministic, SamplerKind::kAncestral}) {
    nn::Rng a(11), b(11), other(12);
    const nn::Tensor za = sample_latent({8, 4, 20}, 5, predict, s, kind, a);
    const nn::Tensor zb = sample_latent({8, 4, 20}, 5, predict, s, kind, b);
    const nn::Tensor zc = sample_latent({8, 4, 20}, 5, predict, s, kind, other);
    CHECK(za.shape() == nn::Shape{8, 4, 20});
    CHECK(all_finite(za));
    CHECK(same_values(za, zb));
    CHECK_FALSE(same_values(za, zc));
  }
  CHECK(sampler_kind_from_string("ddim") == SamplerKind::kDeterministic);
  CHECK(sampler_kind_from_string("ancestral") == SamplerKind::kAncestral);
  CHECK_THROWS_AS(sampler_kind_from_string("euler"), InvalidArgument);
}
