#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "ads/data/normalize.hpp"
#include "ads/error.hpp"
#include "ads/synth/generator.hpp"
#include "fixtures.hpp"

using namespace ads;
using data::Machine;

namespace {

std::vector<synth::LabeledSample> machine_samples(Machine m, int normal, int abnormal, std::uint64_t seed) {
  const auto c = synth::preset("default");
  return synth::generate_machine_data(c.machines.at(m), normal, abnormal, seed, c.anomaly, c.window);
}

// Mean over (t, channel) of |population mean of a - population mean of b|.
double profile_offset(const std::vector<synth::LabeledSample>& a, const std::vector<synth::LabeledSample>& b) {
  const std::size_t n = a.front().sample.signal.size();
  std::vector<double> ma(n, 0.0), mb(n, 0.0);
  for (const auto& s : a) {
    for (std::size_t k = 0; k < n; ++k) ma[k] += s.sample.signal[k] / static_cast<double>(a.size());
  }
  for (const auto& s : b) {
    for (std::size_t k = 0; k < n; ++k) mb[k] += s.sample.signal[k] / static_cast<double>(b.size());
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += std::abs(ma[k] - mb[k]);
  return sum / static_cast<double>(n);
}

// Per-channel variance over each of `segments` equal time segments.
std::vector<double> segment_variances(const data::Sample& s, std::size_t segments) {
  const std::size_t T = s.window(), len = T / segments;
  std::vector<double> f;
  for (std::size_t c = 0; c < data::kChannels; ++c) {
    for (std::size_t g = 0; g < segments; ++g) {
      double mean = 0.0, var = 0.0;
      for (std::size_t t = g * len; t < (g + 1) * len; ++t) mean += s.at(t, c) / static_cast<double>(len);
      for (std::size_t t = g * len; t < (g + 1) * len; ++t) var += (s.at(t, c) - mean) * (s.at(t, c) - mean);
      f.push_back(var / static_cast<double>(len));
    }
  }
  return f;
}

}  // namespace

TEST_SUITE("synth-bench") {
  TEST_CASE("no samples requested gives an empty list") {
    CHECK(machine_samples(Machine::S1, 0, 0, 1).empty());
  }

  TEST_CASE("generation is deterministic per seed") {
    const auto a = machine_samples(Machine::L1, 20, 20, 9);
    const auto b = machine_samples(Machine::L1, 20, 20, 9);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].sample.signal == b[i].sample.signal);
      CHECK(a[i].provenance.label == b[i].provenance.label);
    }
    CHECK(machine_samples(Machine::L1, 20, 20, 10)[0].sample.signal != a[0].sample.signal);
  }

  TEST_CASE("class counts and provenance follow the request") {
    const auto v = machine_samples(Machine::S2, 7, 5, 3);
    CHECK(v.size() == 12);
    const auto abnormal = std::count_if(v.begin(), v.end(), [](const auto& s) {
      return s.provenance.label == data::ClassLabel::Abnormal;
    });
    CHECK(abnormal == 5);
    for (const auto& s : v) CHECK(s.provenance.machine == Machine::S2);
  }

  TEST_CASE("L1 is offset from S1 far more than S2 is") {
    const auto s1 = machine_samples(Machine::S1, 250, 250, 1);
    const auto s2 = machine_samples(Machine::S2, 250, 250, 2);
    const auto l1 = machine_samples(Machine::L1, 250, 250, 3);
    const double ls = profile_offset(l1, s1);
    const double ss = profile_offset(s2, s1);
    CHECK(ls > 3.0 * ss);
  }

  TEST_CASE("S1=S2=400, L1=1200 gives 2000 samples, 60% from L") {
    auto c = synth::preset("default");
    c.counts[Machine::S1] = {240, 160};
    c.counts[Machine::S2] = {240, 160};
    c.counts[Machine::L1] = {600, 600};
    const auto bench = synth::generate_benchmark(c);
    CHECK(bench.raw.size() == 2000);
    std::size_t l = 0;
    for (const auto& [id, p] : bench.provenance.entries()) l += p.machine == Machine::L1;
    CHECK(static_cast<double>(l) / 2000.0 == doctest::Approx(0.6));
  }

  TEST_CASE("ratio constraint violation is rejected") {
    auto c = synth::preset("default");
    c.counts[Machine::L1] = {100, 100};
    try {
      c.validate();
      FAIL("expected InvalidConfig");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidConfig);
    }
    c.ratio_constraint = false;
    CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("default config is dominated by the dissimilar machine") {
    for (const char* name : {"default", "hard"}) {
      const auto c = synth::preset(name);
      CHECK(c.count(Machine::L1) > c.count(Machine::S1) + c.count(Machine::S2));
    }
  }

  TEST_CASE("ids and order do not reveal the machine") {
    const auto bench = synth::generate_benchmark(testing::small_generator(2));
    const auto ids = bench.raw.ids();
    CHECK(std::is_sorted(ids.begin(), ids.end()));
    // The first 200 ids would all be S1 if ids followed generation order.
    std::size_t l_in_head = 0;
    for (std::size_t i = 0; i < 200; ++i) l_in_head += bench.provenance.at(ids[i]).machine == Machine::L1;
    CHECK(l_in_head > 50);
    CHECK(l_in_head < 150);
  }

  TEST_CASE("generator config JSON round-trip") {
    auto c = synth::preset("hard");
    c.seed = 77;
    nlohmann::json j = c;
    const auto back = j.get<synth::GeneratorConfig>();
    CHECK(nlohmann::json(back) == j);
  }

  TEST_CASE("nearest centroid separates L1 from S machines") {
    const auto nb = testing::normalized_benchmark(synth::preset("default"));
    const auto& d = nb.normalized;
    const std::size_t n = d[0].signal.size();
    std::vector<double> cs(n, 0.0), cl(n, 0.0);
    std::size_t ns = 0, nl = 0;
    // Centroids from even ids, accuracy on odd ids.
    for (const auto& s : d.samples()) {
      if (s.id % 2) continue;
      const bool l = nb.provenance.at(s.id).machine == Machine::L1;
      auto& c = l ? cl : cs;
      for (std::size_t k = 0; k < n; ++k) c[k] += s.signal[k];
      (l ? nl : ns)++;
    }
    for (std::size_t k = 0; k < n; ++k) {
      cs[k] /= static_cast<double>(ns);
      cl[k] /= static_cast<double>(nl);
    }
    std::size_t correct = 0, total = 0;
    for (const auto& s : d.samples()) {
      if (s.id % 2 == 0) continue;
      double ds = 0.0, dl = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        ds += (s.signal[k] - cs[k]) * (s.signal[k] - cs[k]);
        dl += (s.signal[k] - cl[k]) * (s.signal[k] - cl[k]);
      }
      correct += (dl < ds) == (nb.provenance.at(s.id).machine == Machine::L1);
      ++total;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(total) >= 0.9);
  }

  TEST_CASE("logistic model on segment variances learns the S anomaly") {
    const auto nb = testing::normalized_benchmark(synth::preset("default"));
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (const auto& s : nb.normalized.samples()) {
      const auto& p = nb.provenance.at(s.id);
      if (p.machine == Machine::L1) continue;
      x.push_back(segment_variances(s, 8));
      y.push_back(p.label == data::ClassLabel::Abnormal ? 1.0 : 0.0);
    }
    const std::size_t dims = x[0].size(), n = x.size(), n_train = n * 7 / 10;
    // Standardize with training statistics.
    for (std::size_t k = 0; k < dims; ++k) {
      double mean = 0.0, sd = 0.0;
      for (std::size_t i = 0; i < n_train; ++i) mean += x[i][k] / static_cast<double>(n_train);
      for (std::size_t i = 0; i < n_train; ++i) sd += (x[i][k] - mean) * (x[i][k] - mean);
      sd = std::sqrt(sd / static_cast<double>(n_train)) + 1e-12;
      for (auto& row : x) row[k] = (row[k] - mean) / sd;
    }
    std::vector<double> w(dims, 0.0);
    double b = 0.0;
    for (int it = 0; it < 2000; ++it) {
      std::vector<double> gw(dims, 0.0);
      double gb = 0.0;
      for (std::size_t i = 0; i < n_train; ++i) {
        const double z = std::inner_product(w.begin(), w.end(), x[i].begin(), b);
        const double r = 1.0 / (1.0 + std::exp(-z)) - y[i];
        for (std::size_t k = 0; k < dims; ++k) gw[k] += r * x[i][k];
        gb += r;
      }
      for (std::size_t k = 0; k < dims; ++k) w[k] -= 0.5 * gw[k] / static_cast<double>(n_train);
      b -= 0.5 * gb / static_cast<double>(n_train);
    }
    std::size_t correct = 0;
    for (std::size_t i = n_train; i < n; ++i) {
      const double z = std::inner_product(w.begin(), w.end(), x[i].begin(), b);
      correct += (z > 0.0) == (y[i] > 0.5);
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(n - n_train) > 0.7);
  }
}
