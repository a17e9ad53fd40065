#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "ads/nn/batch.hpp"
#include "ads/nn/layers.hpp"
#include "ads/wta/autoencoder.hpp"
#include "fixtures.hpp"

using namespace ads;

namespace {

struct Trained {
  data::Dataset train;
  data::Dataset held_out;
  wta::WtaAutoencoder ae;
  double mse_init = 0.0;
};

const Trained& trained() {
  static const Trained t = [] {
    const auto nb = testing::normalized_benchmark(testing::small_generator(5));
    std::vector<data::SampleId> train, held;
    for (auto id : nb.normalized.ids()) (id % 5 == 0 ? held : train).push_back(id);
    Trained r;
    r.train = nb.normalized.subset(train);
    r.held_out = nb.normalized.subset(held);
    wta::WtaConfig cfg;
    cfg.epochs = 10;
    r.mse_init = wta::WtaAutoencoder(r.train.window(), cfg.latent_dim, cfg.sparsity, 9)
                     .reconstruction_mse(nn::to_batch(r.held_out));
    r.ae = wta::train_wta(r.train, cfg, 9);
    return r;
  }();
  return t;
}

}  // namespace

TEST_SUITE("wta-augment") {
  TEST_CASE("training halves the held-out reconstruction error") {
    const auto& t = trained();
    CHECK(t.ae.reconstruction_mse(nn::to_batch(t.held_out)) < 0.5 * t.mse_init);
  }

  TEST_CASE("sparsity 1.0 keeps every activation") {
    auto layer = nn::make_layer(nn::winner_take_all(1.0));
    nn::Tensor x({4, 32});
    Rng rng(1);
    std::normal_distribution<double> g;
    for (auto& v : x.values()) v = g(rng);
    CHECK(layer->infer(x) == x);
    CHECK(nn::wta_winners(32, 1.0) == 32);
  }

  TEST_CASE("encoded samples respect the winner bound") {
    const auto& t = trained();
    const auto z = t.ae.encode(nn::to_batch(t.held_out));
    const auto bound = static_cast<std::size_t>(std::ceil(t.ae.sparsity() * static_cast<double>(t.ae.latent_dim())));
    for (std::size_t b = 0; b < z.batch(); ++b) {
      std::size_t nonzero = 0;
      for (double v : z.row(b)) nonzero += v != 0.0;
      CHECK(nonzero <= bound);
    }
  }

  TEST_CASE("gaussian augmentation of a constant embedding is the identity") {
    const std::vector<double> y(8, 0.7);
    CHECK(wta::augment_gaussian(y, 3) == y);
  }

  TEST_CASE("components at or below the threshold are untouched") {
    const std::vector<double> y{0.0, 2.0, 0.1, 5.0, -1.0, 0.3, 0.0, 4.0};
    const double sd = wta::latent_sd(y);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto out = wta::augment_gaussian(y, seed);
      for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j] <= sd) CHECK(out[j] == y[j]);
        else CHECK(out[j] != y[j]);
      }
    }
  }

  TEST_CASE("masked noise has standard deviation sigma_e / 5") {
    const std::vector<double> y{0.0, 2.0, 0.1, 5.0, -1.0, 0.3, 0.0, 4.0};
    const double sd = wta::latent_sd(y);
    Rng rng(42);
    std::vector<double> sum(y.size(), 0.0), sq(y.size(), 0.0);
    constexpr int kDraws = 10000;
    for (int i = 0; i < kDraws; ++i) {
      const auto out = wta::augment_gaussian(y, rng);
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double d = out[j] - y[j];
        sum[j] += d;
        sq[j] += d * d;
      }
    }
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] <= sd) continue;
      const double mean = sum[j] / kDraws;
      const double est = std::sqrt(sq[j] / kDraws - mean * mean);
      CHECK(est == doctest::Approx(sd / 5.0).epsilon(0.05));
    }
  }

  TEST_CASE("prose mask perturbs components far from the mean") {
    const std::vector<double> y{-3.0, 0.0, 0.1, 0.2, 3.0};
    const double sd = wta::latent_sd(y);
    const auto out = wta::augment_gaussian(y, 5, wta::MaskMode::Prose);
    const double mean = 0.06;
    for (std::size_t j = 0; j < y.size(); ++j) CHECK((out[j] != y[j]) == (std::abs(y[j] - mean) > sd));
  }

  TEST_CASE("threshold augmentation examples") {
    CHECK(wta::augment_threshold(std::vector<double>{0, 0, 0}) == std::vector<double>{0, 0, 0});
    CHECK(wta::augment_threshold(std::vector<double>{10, 0.1, -0.1, 0.05}) == std::vector<double>{1, 0, 0, 0});
  }

  TEST_CASE("threshold augmentation is binary") {
    Rng rng(3);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int i = 0; i < 200; ++i) {
      std::vector<double> y(32);
      for (auto& v : y) v = g(rng);
      for (double v : wta::augment_threshold(y)) CHECK((v == 0.0 || v == 1.0));
    }
  }

  TEST_CASE("positive pairs keep the sample shape and are deterministic") {
    const auto& t = trained();
    const auto& s = t.held_out[0];
    const auto a = wta::make_positive_pair(s, t.ae, 17);
    const auto b = wta::make_positive_pair(s, t.ae, 17);
    CHECK(a.gaussian.signal.size() == s.signal.size());
    CHECK(a.threshold.signal.size() == s.signal.size());
    CHECK(a.gaussian.signal == b.gaussian.signal);
    CHECK(a.threshold.signal == b.threshold.signal);
  }

  TEST_CASE("augmented samples stay close to the data manifold") {
    const auto& t = trained();
    const auto batch = nn::to_batch(t.held_out);
    const double base = t.ae.reconstruction_mse(batch);
    for (auto kind : {wta::Augmentation::Gaussian, wta::Augmentation::Threshold}) {
      std::vector<wta::Augmentation> kinds(batch.batch(), kind);
      std::vector<std::uint64_t> seeds(batch.batch());
      for (std::size_t b = 0; b < seeds.size(); ++b) seeds[b] = b;
      const auto aug = wta::augment_batch(t.ae, batch, kinds, seeds);
      CHECK(t.ae.reconstruction_mse(aug) <= 3.0 * base);
    }
  }

  TEST_CASE("checkpoint round-trip") {
    const auto& t = trained();
    const auto stem = std::filesystem::temp_directory_path() / "ads_test_wta" / "wta";
    std::filesystem::remove_all(stem.parent_path());
    wta::save_wta(stem, t.ae);
    const auto back = wta::load_wta(stem);
    const auto batch = nn::to_batch(t.held_out);
    CHECK(back.reconstruct(batch) == t.ae.reconstruct(batch));
    CHECK(back.sparsity() == t.ae.sparsity());
    std::filesystem::remove_all(stem.parent_path());
  }
}
