#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "ads/data/io.hpp"
#include "ads/data/lhs.hpp"
#include "ads/data/normalize.hpp"
#include "ads/data/pool.hpp"
#include "ads/error.hpp"
#include "fixtures.hpp"

using namespace ads;
using data::Dataset;
using data::Sample;

namespace {

// Window of length 3 whose channel c at time t is values[c][t].
Dataset three_step(std::array<std::array<double, 3>, 3> values) {
  Sample s;
  s.id = 0;
  s.signal.resize(9);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t c = 0; c < 3; ++c) s.at(t, c) = values[c][t];
  }
  return Dataset(3, {s});
}

Dataset random_dataset(std::size_t n, std::size_t window, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.id = i;
    s.signal.resize(window * data::kChannels);
    const double shift = g(rng);
    for (auto& v : s.signal) v = shift + g(rng);
    samples.push_back(std::move(s));
  }
  return Dataset(window, std::move(samples));
}

}  // namespace

TEST_SUITE("data-model") {
  TEST_CASE("min-max maps channel endpoints to 0 and 1") {
    const auto n = data::normalize_minmax(three_step({{{2, 4, 6}, {1, 2, 3}, {0, 5, 10}}}));
    const auto& s = n.dataset[0];
    CHECK(s.at(0, 0) == 0.0);
    CHECK(s.at(1, 0) == 0.5);
    CHECK(s.at(2, 0) == 1.0);
    CHECK_FALSE(n.degenerate());
  }

  TEST_CASE("constant channel maps to zeros and is flagged") {
    const auto n = data::normalize_minmax(three_step({{{5, 5, 5}, {1, 2, 3}, {0, 5, 10}}}));
    for (std::size_t t = 0; t < 3; ++t) CHECK(n.dataset[0].at(t, 0) == 0.0);
    CHECK(n.constant_channel[0]);
    CHECK_FALSE(n.constant_channel[1]);
    CHECK(n.degenerate());
  }

  TEST_CASE("inverse of normalize restores the signal") {
    const auto raw = random_dataset(50, 16, 3);
    const auto n = data::normalize_minmax(raw);
    const auto back = data::invert_minmax(n.dataset, n.ranges);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      for (std::size_t k = 0; k < raw[i].signal.size(); ++k) CHECK(back[i].signal[k] == doctest::Approx(raw[i].signal[k]).epsilon(1e-9));
    }
  }

  TEST_CASE("normalization is idempotent") {
    const auto once = data::normalize_minmax(random_dataset(40, 16, 5)).dataset;
    const auto twice = data::normalize_minmax(once).dataset;
    for (std::size_t i = 0; i < once.size(); ++i) {
      for (std::size_t k = 0; k < once[i].signal.size(); ++k) CHECK(std::abs(twice[i].signal[k] - once[i].signal[k]) <= 1e-12);
    }
  }

  TEST_CASE("normalized values lie in [0, 1]") {
    const auto n = data::normalize_minmax(random_dataset(30, 8, 9)).dataset;
    for (const auto& s : n.samples()) {
      for (double v : s.signal) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }

  TEST_CASE("LHS draws exactly the requested fraction") {
    const auto d = random_dataset(1000, 8, 1);
    const auto ids = data::lhs_initial_sample(d, 0.20, data::kDefaultStrata, 7);
    CHECK(ids.size() == 200);
    CHECK(std::set<data::SampleId>(ids.begin(), ids.end()).size() == 200);
  }

  TEST_CASE("LHS is deterministic per seed") {
    const auto d = random_dataset(500, 8, 2);
    CHECK(data::lhs_initial_sample(d, 0.2, 10, 11) == data::lhs_initial_sample(d, 0.2, 10, 11));
    CHECK(data::lhs_initial_sample(d, 0.2, 10, 11) != data::lhs_initial_sample(d, 0.2, 10, 12));
  }

  TEST_CASE("LHS stratum counts differ by at most one") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
      const auto d = random_dataset(600, 8, 100 + seed);
      for (double fraction : {0.15, 0.2, 0.37}) {
        const auto ids = data::lhs_initial_sample(d, fraction, 10, seed);
        const auto bins = data::quantile_bins(d, 10);
        std::map<int, int> per_bin;
        for (auto id : ids) ++per_bin[bins[d.index_of(id)][0]];
        int lo = per_bin.begin()->second, hi = lo;
        for (const auto& [bin, count] : per_bin) {
          lo = std::min(lo, count);
          hi = std::max(hi, count);
        }
        CHECK(per_bin.size() == 10);
        CHECK(hi - lo <= 1);
      }
    }
  }

  TEST_CASE("revealing 80 ids moves exactly 80") {
    const auto d = random_dataset(200, 4, 3);
    data::Pool pool(d);
    std::vector<data::SampleId> ids;
    for (data::SampleId i = 0; i < 80; ++i) ids.push_back(i * 2);
    pool.reveal_labels(ids, std::vector<data::ClassLabel>(80, data::ClassLabel::Abnormal));
    CHECK(pool.labeled_ids().size() == 80);
    CHECK(pool.unlabeled_ids().size() == 120);
    CHECK(pool.label(2) == data::ClassLabel::Abnormal);
  }

  TEST_CASE("revealing nothing leaves the pool unchanged") {
    data::Pool pool(random_dataset(10, 4, 3));
    const auto before = pool;
    pool.reveal_labels({}, {});
    CHECK(pool == before);
  }

  TEST_CASE("revealing a labeled id fails and leaves the pool untouched") {
    data::Pool pool(random_dataset(10, 4, 3));
    pool.reveal_labels(std::map<data::SampleId, data::ClassLabel>{{1, data::ClassLabel::Normal}});
    const auto before = pool;
    const std::map<data::SampleId, data::ClassLabel> again{{2, data::ClassLabel::Normal}, {1, data::ClassLabel::Abnormal}};
    try {
      pool.reveal_labels(again);
      FAIL("expected AlreadyLabeled");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AlreadyLabeled);
    }
    CHECK(pool == before);
  }

  TEST_CASE("unknown ids are rejected") {
    data::Pool pool(random_dataset(10, 4, 3));
    try {
      pool.reveal_labels(std::map<data::SampleId, data::ClassLabel>{{99, data::ClassLabel::Normal}});
      FAIL("expected UnknownId");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownId);
    }
  }

  TEST_CASE("pool size is conserved under random reveal sequences") {
    Rng rng(17);
    data::Pool pool(random_dataset(300, 4, 3));
    const auto total = pool.total();
    while (!pool.unlabeled_ids().empty()) {
      auto unlabeled = pool.unlabeled_vector();
      std::shuffle(unlabeled.begin(), unlabeled.end(), rng);
      const std::size_t k = std::min<std::size_t>(unlabeled.size(), 1 + rng() % 40);
      std::vector<data::SampleId> ids(unlabeled.begin(), unlabeled.begin() + static_cast<std::ptrdiff_t>(k));
      pool.reveal_labels(ids, std::vector<data::ClassLabel>(k, data::ClassLabel::Normal));
      CHECK(pool.total() == total);
      std::vector<data::SampleId> both;
      std::set_intersection(pool.labeled_ids().begin(), pool.labeled_ids().end(), pool.unlabeled_ids().begin(),
                            pool.unlabeled_ids().end(), std::back_inserter(both));
      CHECK(both.empty());
    }
  }

  TEST_CASE("dataset directory round-trip reproduces the normalized samples") {
    const auto bench = synth::generate_benchmark(testing::small_generator(4));
    const auto dir = std::filesystem::temp_directory_path() / "ads_test_dataset_io";
    std::filesystem::remove_all(dir);
    data::write_dataset(dir, bench.raw, bench.provenance);
    const auto loaded = data::load_normalized(dir);
    const auto expected = data::normalize_minmax(bench.raw).dataset;
    REQUIRE(loaded.normalized.size() == expected.size());
    CHECK(loaded.meta.window == bench.raw.window());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(loaded.normalized[i].id == expected[i].id);
      CHECK(loaded.normalized[i].signal == expected[i].signal);
    }
    const auto prov = data::read_provenance(dir);
    CHECK(prov.entries().size() == bench.provenance.size());
    for (const auto& [id, p] : bench.provenance.entries()) {
      CHECK(prov.at(id).machine == p.machine);
      CHECK(prov.at(id).label == p.label);
    }
    std::filesystem::remove_all(dir);
  }
}
