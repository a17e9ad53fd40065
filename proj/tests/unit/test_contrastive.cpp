#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "ads/contrastive/similarity.hpp"
#include "ads/data/lhs.hpp"
#include "ads/error.hpp"
#include "ads/nn/losses.hpp"
#include "fixtures.hpp"

using namespace ads;
using contrastive::locmax;

namespace {

// Stable sort oracle: the n largest values, ties toward the lower index.
std::vector<int> sort_oracle(const std::vector<double>& v, std::size_t n) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  std::vector<int> out(v.size(), 0);
  for (std::size_t k = 0; k < std::min(n, v.size()); ++k) out[order[k]] = 1;
  return out;
}

nn::Tensor random_unit_rows(std::size_t rows, std::size_t d, Rng& rng) {
  std::normal_distribution<double> g;
  nn::Tensor t({rows, d});
  for (auto& v : t.values()) v = g(rng);
  return t;
}

// Initial annotation split by hidden machine, plus everything else.
struct Split {
  data::Dataset labeled_s, labeled_l, unlabeled;
  data::ProvenanceStore provenance;
};

const Split& split() {
  static const Split s = [] {
    auto nb = testing::normalized_benchmark(testing::small_generator(6));
    const auto init = data::lhs_initial_sample(nb.normalized, 0.2, 10, 3);
    const std::set<data::SampleId> chosen(init.begin(), init.end());
    std::vector<data::SampleId> ls, ll, un;
    for (auto id : nb.normalized.ids()) {
      if (!chosen.contains(id)) un.push_back(id);
      else if (nb.provenance.at(id).machine == data::Machine::L1) ll.push_back(id);
      else ls.push_back(id);
    }
    return Split{nb.normalized.subset(ls), nb.normalized.subset(ll), nb.normalized.subset(un), nb.provenance};
  }();
  return s;
}

struct TrainedSimilarity {
  wta::WtaAutoencoder ae;
  nn::Model model;
};

const TrainedSimilarity& trained() {
  static const TrainedSimilarity t = [] {
    const auto& s = split();
    wta::WtaConfig wcfg;
    wcfg.epochs = 8;
    auto ae = wta::train_wta(s.unlabeled, wcfg, 1);
    auto model = contrastive::train_similarity_model(s.labeled_s, s.labeled_l, ae, contrastive::SimilarityConfig{}, 2);
    return TrainedSimilarity{std::move(ae), std::move(model)};
  }();
  return t;
}

// Three samples re-numbered 0, 1, 2 so copies of one id can share a batch.
data::Dataset triple(data::Sample a, data::Sample b, data::Sample c) {
  a.id = 0;
  b.id = 1;
  c.id = 2;
  const std::size_t window = a.window();
  return data::Dataset(window, {std::move(a), std::move(b), std::move(c)});
}

}  // namespace

TEST_SUITE("contrastive-sim") {
  TEST_CASE("zero triplets requested") {
    const auto& s = split();
    const wta::WtaAutoencoder ae(s.labeled_s.window(), 16, 0.1, 1);
    CHECK(contrastive::build_triplets(s.labeled_s, s.labeled_l, ae, 0, 1).empty());
  }

  TEST_CASE("negatives come from labeled L only") {
    const auto& s = split();
    const wta::WtaAutoencoder ae(s.labeled_s.window(), 16, 0.1, 1);
    for (const auto& t : contrastive::build_triplets(s.labeled_s, s.labeled_l, ae, 200, 4)) {
      CHECK(s.labeled_l.contains(t.negative.id));
      CHECK(s.provenance.at(t.negative.id).machine == data::Machine::L1);
      CHECK(s.labeled_s.contains(t.anchor.id));
    }
  }

  TEST_CASE("80 anchors with 160 triplets covers each anchor once per augmentation") {
    const auto& s = split();
    REQUIRE(s.labeled_s.size() >= 80);
    const auto ids = s.labeled_s.ids();
    const auto anchors = s.labeled_s.subset(std::span(ids).first(80));
    const wta::WtaAutoencoder ae(s.labeled_s.window(), 16, 0.1, 1);
    std::map<data::SampleId, std::set<int>> kinds;
    std::map<data::SampleId, int> uses;
    for (const auto& t : contrastive::build_triplets(anchors, s.labeled_l, ae, 160, 2)) {
      ++uses[t.anchor.id];
      kinds[t.anchor.id].insert(static_cast<int>(t.kind));
    }
    CHECK(uses.size() == 80);
    for (const auto& [id, n] : uses) {
      CHECK(n == 2);
      CHECK(kinds[id].size() == 2);
    }
  }

  TEST_CASE("empty negative pool is an error") {
    const auto& s = split();
    const wta::WtaAutoencoder ae(s.labeled_s.window(), 16, 0.1, 1);
    try {
      contrastive::build_triplets(s.labeled_s, data::Dataset(s.labeled_s.window(), {}), ae, 10, 1);
      FAIL("expected EmptyNegativePool");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyNegativePool);
    }
  }

  TEST_CASE("a single repeated triplet is fitted to zero loss") {
    const auto& s = split();
    const wta::WtaAutoencoder ae(s.labeled_s.window(), 16, 0.1, 1);
    const auto one = contrastive::build_triplets(s.labeled_s, s.labeled_l, ae, 1, 3);
    contrastive::SimilarityConfig cfg;
    cfg.epochs = 300;
    const auto model = contrastive::train_similarity_model(one, cfg, 5);
    CHECK(contrastive::triplet_set_loss(model, one, cfg.margin) == 0.0);
  }

  TEST_CASE("training is reproducible per seed") {
    const auto& s = split();
    const wta::WtaAutoencoder ae(s.labeled_s.window(), 16, 0.1, 1);
    contrastive::SimilarityConfig cfg;
    cfg.epochs = 3;
    contrastive::SimilarityTrainLog a, b;
    const auto ma = contrastive::train_similarity_model(s.labeled_s, s.labeled_l, ae, cfg, 8, &a);
    const auto mb = contrastive::train_similarity_model(s.labeled_s, s.labeled_l, ae, cfg, 8, &b);
    REQUIRE(a.epoch_loss.size() == 3);
    CHECK(std::abs(a.epoch_loss.back() - b.epoch_loss.back()) <= 1e-12);
    CHECK(ma.flat_values() == mb.flat_values());
  }

  TEST_CASE("trained embeddings pull positives closer than negatives") {
    const auto& s = split();
    const auto& t = trained();
    const auto triplets = contrastive::build_triplets(s.labeled_s, s.labeled_l, t.ae, 2 * s.labeled_s.size(), 77);
    double pos = 0.0, neg = 0.0;
    for (const auto& tr : triplets) {
      const auto z = contrastive::embed(t.model, triple(tr.anchor, tr.positive, tr.negative));
      pos += nn::cosine_similarity(z.row(0), z.row(1));
      neg += nn::cosine_similarity(z.row(0), z.row(2));
    }
    CHECK(pos > neg);
  }

  TEST_CASE("anchors sit closer to their gaussian augmentation than to a random L sample") {
    const auto& s = split();
    const auto& t = trained();
    Rng rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, s.labeled_l.size() - 1);
    std::size_t wins = 0;
    for (const auto& anchor : s.labeled_s.samples()) {
      const auto pair = wta::make_positive_pair(anchor, t.ae, anchor.id);
      const auto z = contrastive::embed(t.model, triple(anchor, pair.gaussian, s.labeled_l[pick(rng)]));
      wins += nn::cosine_similarity(z.row(0), z.row(1)) > nn::cosine_similarity(z.row(0), z.row(2));
    }
    CHECK(static_cast<double>(wins) >= 0.9 * static_cast<double>(s.labeled_s.size()));
  }

  TEST_CASE("unlabeled S samples score higher than unlabeled L samples") {
    const auto& s = split();
    const auto scores = contrastive::similarity_scores(trained().model, s.labeled_s, s.unlabeled);
    double ms = 0.0, ml = 0.0;
    std::size_t ns = 0, nl = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool l = s.provenance.at(s.unlabeled[i].id).machine == data::Machine::L1;
      (l ? ml : ms) += scores[i];
      (l ? nl : ns)++;
    }
    CHECK(ms / static_cast<double>(ns) > ml / static_cast<double>(nl));
  }

  TEST_CASE("a copy of a labeled sample scores one") {
    const auto& s = split();
    const data::Dataset unlabeled(s.labeled_s.window(), {s.labeled_s[3], s.unlabeled[0]});
    const auto scores = contrastive::similarity_scores(trained().model, s.labeled_s, unlabeled);
    CHECK(scores[0] == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("similarity scores match a brute-force double loop") {
    Rng rng(9);
    const auto labeled = random_unit_rows(5, 4, rng);
    const auto unlabeled = random_unit_rows(3, 4, rng);
    const auto scores = contrastive::similarity_scores(labeled, unlabeled);
    REQUIRE(scores.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      double best = -2.0;
      for (std::size_t j = 0; j < 5; ++j) best = std::max(best, nn::cosine_similarity(labeled.row(j), unlabeled.row(i)));
      CHECK(scores[i] == best);
      CHECK(scores[i] >= -1.0);
      CHECK(scores[i] <= 1.0);
    }
  }

  TEST_CASE("empty labeled set and width mismatch are errors") {
    Rng rng(1);
    const auto u = random_unit_rows(3, 4, rng);
    CHECK_THROWS_AS(contrastive::similarity_scores(nn::Tensor({0, 4}), u), Error);
    CHECK_THROWS_AS(contrastive::similarity_scores(random_unit_rows(2, 5, rng), u), Error);
  }

  TEST_CASE("locmax examples") {
    CHECK(locmax(std::vector<double>{0.1, 0.9, 0.5}, 1) == std::vector<int>{0, 1, 0});
    CHECK(locmax(std::vector<double>{0.7, 0.7, 0.2}, 1) == std::vector<int>{1, 0, 0});
    CHECK(contrastive::binarize_topw(std::vector<double>{0.3, -0.2, 0.9, 0.1}, 1.0) == std::vector<int>{1, 1, 1, 1});
  }

  TEST_CASE("locmax matches the sort oracle") {
    Rng rng(12);
    std::uniform_int_distribution<int> coarse(0, 9);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t len = 1 + rng() % 120;
      std::vector<double> v(len);
      // Every other trial draws from ten values so ties are common.
      for (auto& x : v) x = trial % 2 ? coarse(rng) / 10.0 : g(rng);
      for (std::size_t n = 0; n <= len; ++n) {
        const auto flags = locmax(v, n);
        CHECK(flags == sort_oracle(v, n));
        CHECK(static_cast<std::size_t>(std::accumulate(flags.begin(), flags.end(), 0)) == n);
      }
    }
  }

  TEST_CASE("binarization budget is floor(w * d_u)") {
    Rng rng(2);
    std::normal_distribution<double> g;
    for (std::size_t len : {4, 10, 37, 200}) {
      std::vector<double> v(len);
      for (auto& x : v) x = g(rng);
      for (double w : {0.25, 0.5, 0.9}) {
        const auto b = contrastive::binarize_topw(v, w);
        CHECK(static_cast<double>(std::accumulate(b.begin(), b.end(), 0)) ==
              std::floor(w * static_cast<double>(len)));
      }
    }
  }

  TEST_CASE("an empty binarization budget is an error") {
    try {
      contrastive::binarize_topw(std::vector<double>{0.1, 0.2, 0.3}, 0.25);
      FAIL("expected ZeroBudget");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroBudget);
    }
    CHECK_THROWS_AS(contrastive::binarize_topw(std::vector<double>{0.1}, 1.5), Error);
  }

  TEST_CASE("raising a flagged score keeps it flagged, lowering an unflagged one keeps it out") {
    Rng rng(4);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> bump(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> v(40);
      for (auto& x : v) x = g(rng);
      const auto before = contrastive::binarize_topw(v, 0.25);
      const std::size_t i = rng() % v.size();
      auto changed = v;
      changed[i] += before[i] ? bump(rng) : -bump(rng);
      CHECK(contrastive::binarize_topw(changed, 0.25)[i] == before[i]);
    }
  }

  TEST_CASE("adjusted top fraction guarantees enough candidates") {
    CHECK(contrastive::adjusted_top_fraction(0.25, 1000, 80) == 0.25);
    for (std::size_t d_u : {100, 317, 999}) {
      for (std::size_t need : {1, 80, 99}) {
        const double w = contrastive::adjusted_top_fraction(0.25, d_u, need);
        CHECK(w >= 0.25);
        CHECK(w <= 1.0);
        CHECK(std::floor(w * static_cast<double>(d_u)) >= static_cast<double>(std::min(need, d_u)));
      }
    }
  }
}
