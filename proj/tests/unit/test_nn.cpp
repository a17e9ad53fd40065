#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

#include "ads/audit/gradient_audit.hpp"
#include "ads/error.hpp"
#include "ads/nn/adam.hpp"
#include "ads/nn/checkpoint.hpp"
#include "ads/nn/gradcheck.hpp"
#include "ads/nn/layers.hpp"
#include "ads/nn/losses.hpp"
#include "ads/nn/model.hpp"
#include "ads/random.hpp"

using namespace ads;
using namespace ads::nn;

namespace {

Tensor gaussian(Shape shape, std::uint64_t seed, double sd = 1.0) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = g(rng);
  return t;
}

std::vector<double> unit2(double cos_angle) { return {cos_angle, std::sqrt(1.0 - cos_angle * cos_angle)}; }

}  // namespace

TEST_SUITE("tensor-nn") {
  TEST_CASE("zero-weight linear model gives zero logits") {
    Model m(ModelSpec{{5}, {dense(5, 2)}}, 1);
    m.set_flat_values(std::vector<double>(m.num_params(), 0.0));
    const auto out = m.infer(gaussian({7, 5}, 2));
    for (double v : out.values()) CHECK(v == 0.0);
  }

  TEST_CASE("softmax rows sum to one and stay finite") {
    auto logits = gaussian({50, 2}, 3, 20.0);
    logits[0] = 700.0;
    logits[1] = -700.0;
    const auto p = softmax(logits);
    for (std::size_t b = 0; b < p.batch(); ++b) {
      CHECK(std::abs(p.row(b)[0] + p.row(b)[1] - 1.0) <= 1e-9);
      CHECK(std::isfinite(p.row(b)[0]));
    }
  }

  TEST_CASE("conv output length follows the stride arithmetic") {
    for (std::size_t k : {1, 3, 5}) {
      for (std::size_t s : {1, 2, 3}) {
        for (std::size_t T : {16, 31, 64}) {
          const auto layer = make_layer(conv1d(3, 4, k, s));
          CHECK(layer->output_shape({3, T}) == Shape{4, (T - k) / s + 1});
          Model m(ModelSpec{{3, T}, {conv1d(3, 4, k, s)}}, 1);
          CHECK(m.infer(gaussian({2, 3, T}, 1)).shape() == Shape{2, 4, (T - k) / s + 1});
        }
      }
    }
  }

  TEST_CASE("mismatched layer stacks are rejected") {
    const ModelSpec bad{{3, 64}, {conv1d(3, 8, 5), dense(4, 2)}};
    CHECK_THROWS_AS(bad.output_shape(), Error);
  }

  TEST_CASE("cross-entropy closed-form values") {
    const Tensor saturated({1, 2}, {10.0, -10.0});
    const int label0[] = {0};
    CHECK(cross_entropy_loss(saturated, label0).loss == doctest::Approx(std::log1p(std::exp(-20.0))).epsilon(1e-6));
    CHECK(cross_entropy_loss(saturated, label0).loss == doctest::Approx(2.06e-9).epsilon(0.01));
    const Tensor uniform({1, 2}, {0.0, 0.0});
    for (int label : {0, 1}) {
      const int l[] = {label};
      CHECK(cross_entropy_loss(uniform, l).loss == doctest::Approx(std::log(2.0)));
    }
  }

  TEST_CASE("cross-entropy gradient matches finite differences") {
    auto logits = gaussian({6, 2}, 4);
    const std::vector<int> labels{0, 1, 1, 0, 1, 0};
    const auto analytic = cross_entropy_loss(logits, labels).grad;
    const double h = 1e-6;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      auto plus = logits, minus = logits;
      plus[i] += h;
      minus[i] -= h;
      const double numeric =
          (cross_entropy_loss(plus, labels).loss - cross_entropy_loss(minus, labels).loss) / (2.0 * h);
      CHECK(std::abs(numeric - analytic[i]) / std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8}) < 1e-5);
    }
  }

  TEST_CASE("cosine similarity values") {
    const std::vector<double> v{0.3, -1.2, 4.0};
    CHECK(cosine_similarity(v, v) == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> e1{1, 0}, e2{0, 1};
    CHECK(cosine_similarity(e1, e2) == 0.0);
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    CHECK(cosine_similarity(a, b) == doctest::Approx(0.974631846).epsilon(1e-9));
    const std::vector<double> zero{0, 0, 0};
    CHECK_THROWS_AS(cosine_similarity(zero, v), Error);
  }

  TEST_CASE("triplet loss examples") {
    const auto a = unit2(1.0);
    CHECK(triplet_cosine(a, unit2(1.0), unit2(-1.0), 0.1) == 0.0);
    CHECK(triplet_cosine(a, a, a, 0.1) == doctest::Approx(0.1));
    CHECK(triplet_cosine(a, unit2(0.3), unit2(0.8), 0.2) == doctest::Approx(0.7));
  }

  TEST_CASE("adam leaves parameters alone on a zero gradient") {
    ParamTensor p("w", {3});
    p.value = Tensor({3}, {1.0, -2.0, 0.5});
    ParamTensor* params[] = {&p};
    AdamState state;
    adam_step(params, state, {});
    CHECK(p.value == Tensor({3}, {1.0, -2.0, 0.5}));
  }

  TEST_CASE("adam's first step is lr times the gradient sign") {
    ParamTensor p("w", {4});
    p.grad = Tensor({4}, {3.0, -0.01, 250.0, -7.0});
    ParamTensor* params[] = {&p};
    AdamState state;
    const AdamConfig cfg{.lr = 0.01};
    adam_step(params, state, cfg);
    for (std::size_t i = 0; i < 4; ++i) {
      const double sign = p.grad[i] > 0 ? 1.0 : -1.0;
      CHECK(p.value[i] == doctest::Approx(-cfg.lr * sign).epsilon(1e-5));
    }
  }

  TEST_CASE("adam minimizes a scalar quadratic") {
    ParamTensor p("w", {1});
    ParamTensor* params[] = {&p};
    AdamState state;
    for (int i = 0; i < 200; ++i) {
      p.grad[0] = 2.0 * (p.value[0] - 3.0);
      adam_step(params, state, {.lr = 0.1});
    }
    CHECK(std::abs(p.value[0] - 3.0) < 0.05);
  }

  TEST_CASE("linear plus cross-entropy passes the gradient check") {
    Model m(ModelSpec{{6}, {dense(6, 2)}}, 3);
    const auto x = gaussian({8, 6}, 5);
    const std::vector<int> labels{0, 1, 0, 1, 1, 1, 0, 0};
    auto loss = [&](Model& model, bool backward) {
      const auto r = cross_entropy_loss(model.forward(x), labels);
      if (backward) model.backward(r.grad);
      return r.loss;
    };
    CHECK(grad_check(m, loss, 1e-4).passed);

    auto corrupted = analytic_gradients(m, loss);
    corrupted[0][2] *= 2.0;
    const auto report = finite_difference_check(m, loss, corrupted, 1e-4);
    CHECK_FALSE(report.passed);
    CHECK(report.worst_index == 2);
  }

  TEST_CASE("triplet loss through the embedding network passes the gradient check") {
    const auto spec = embedding_spec(32, 8);
    Model m(spec, 7);
    const auto x = gaussian({9, 3, 32}, 8);
    auto loss = [&](Model& model, bool backward) {
      const auto z = model.forward(x);
      const auto r = triplet_cosine_loss(z.slice_rows(0, 3), z.slice_rows(3, 6), z.slice_rows(6, 9), 2.5);
      if (backward) {
        const Tensor* parts[] = {&r.grad_anchor, &r.grad_positive, &r.grad_negative};
        model.backward(Tensor::concat_rows(parts));
      }
      return r.loss;
    };
    CHECK(grad_check(m, loss, 1e-3, 1e-6).passed);
  }

  TEST_CASE("every layer, loss and network passes the audit") {
    for (std::uint64_t seed : {0, 1, 2}) {
      for (const auto& e : audit::gradient_audit(seed)) {
        INFO(e.name << " seed " << seed << " error " << e.report.max_relative_error);
        CHECK(e.report.passed);
        CHECK(e.report.checked > 0);
      }
    }
  }

  TEST_CASE("model construction is deterministic per seed") {
    const Model a(classifier_spec(64), 11), b(classifier_spec(64), 11), c(classifier_spec(64), 12);
    CHECK(a.flat_values() == b.flat_values());
    CHECK(a.flat_values() != c.flat_values());
  }

  TEST_CASE("copies are independent") {
    Model a(classifier_spec(32), 1);
    Model b = a;
    auto v = b.flat_values();
    v[0] += 1.0;
    b.set_flat_values(v);
    CHECK(a.flat_values()[0] != b.flat_values()[0]);
  }

  TEST_CASE("checkpoint round-trip preserves parameters and outputs") {
    const Model m(classifier_spec(64), 21);
    const auto stem = std::filesystem::temp_directory_path() / "ads_test_ckpt" / "model";
    std::filesystem::remove_all(stem.parent_path());
    save_checkpoint(stem, m, {{"note", "x"}});
    const auto loaded = load_checkpoint(stem);
    CHECK(loaded.model.spec() == m.spec());
    CHECK(loaded.model.flat_values() == m.flat_values());
    CHECK(loaded.sidecar.at("note") == "x");
    const auto x = gaussian({3, 3, 64}, 2);
    CHECK(loaded.model.infer(x) == m.infer(x));
    CHECK(std::filesystem::file_size(stem.string() + ".bin") == 8 * m.num_params());
    std::filesystem::remove_all(stem.parent_path());
  }

  TEST_CASE("model spec JSON round-trip") {
    const auto spec = embedding_spec(48, 12);
    const nlohmann::json j = spec;
    CHECK(j.get<ModelSpec>() == spec);
  }

  TEST_CASE("reshape to a different size fails") {
    const Tensor t({2, 3});
    CHECK(t.reshaped({3, 2}).shape() == Shape{3, 2});
    CHECK_THROWS_AS(t.reshaped({4, 2}), Error);
  }
}
