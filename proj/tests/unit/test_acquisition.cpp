#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ads/acquisition/acquisition.hpp"
#include "ads/error.hpp"
#include "ads/random.hpp"

using namespace ads;
using namespace ads::acquisition;

namespace {

struct Scores {
  std::vector<int> s;
  std::vector<double> u;
};

// Random (s, u); u drawn from a coarse grid when `ties` so equal values occur.
Scores random_scores(std::size_t n, double p_one, bool ties, Rng& rng) {
  std::bernoulli_distribution one(p_one);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<int> grid(0, 8);
  Scores sc;
  for (std::size_t i = 0; i < n; ++i) {
    sc.s.push_back(one(rng) ? 1 : 0);
    sc.u.push_back(ties ? grid(rng) / 8.0 : uni(rng));
  }
  return sc;
}

// Brute force over all (selected, unselected) pairs.
bool dominated(const Scores& sc, const std::vector<std::size_t>& selected) {
  const std::set<std::size_t> chosen(selected.begin(), selected.end());
  for (auto i : selected) {
    for (std::size_t k = 0; k < sc.s.size(); ++k) {
      if (chosen.contains(k) || sc.u[k] == sc.u[i]) continue;
      if (sc.s[k] >= sc.s[i] && sc.u[k] >= sc.u[i] && (sc.s[k] > sc.s[i] || sc.u[k] > sc.u[i])) return true;
    }
  }
  return false;
}

}  // namespace

TEST_SUITE("acquisition") {
  TEST_CASE("joint score is the elementwise product") {
    CHECK(joint_scores(std::vector<int>{1, 0, 1}, std::vector<double>{0.2, 0.9, 0.8}) ==
          std::vector<double>{0.2, 0.0, 0.8});
    CHECK(joint_scores(std::vector<int>{0, 0, 0}, std::vector<double>{0.2, 0.9, 0.8}) ==
          std::vector<double>{0.0, 0.0, 0.0});
    CHECK_THROWS_AS(joint_scores(std::vector<int>{1}, std::vector<double>{0.1, 0.2}), Error);
  }

  TEST_CASE("joint scores stay in [0, 1] and are monotone in s and u") {
    Rng rng(1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto sc = random_scores(20, 0.5, false, rng);
      const auto j = joint_scores(sc.s, sc.u);
      const std::size_t i = rng() % 20;
      auto u_up = sc.u;
      u_up[i] = sc.u[i] + (1.0 - sc.u[i]) * uni(rng);
      auto s_up = sc.s;
      s_up[i] = 1;
      for (std::size_t k = 0; k < 20; ++k) {
        CHECK(j[k] >= 0.0);
        CHECK(j[k] <= 1.0);
        CHECK(j[k] == sc.s[k] * sc.u[k]);
      }
      CHECK(joint_scores(sc.s, u_up)[i] >= j[i]);
      CHECK(joint_scores(s_up, sc.u)[i] >= j[i]);
    }
  }

  TEST_CASE("top-t breaks ties toward the lower index") {
    CHECK(top_t(std::vector<double>{0.0, 0.3, 0.9, 0.3}, 2) == std::vector<std::size_t>{2, 1});
    CHECK(top_t(std::vector<double>{0.5, 0.1, 0.5}, 5) == std::vector<std::size_t>{0, 2, 1});
    CHECK_THROWS_AS(top_t(std::vector<double>{}, 1), Error);
    CHECK_THROWS_AS(top_t(std::vector<double>{0.1}, 0), Error);
  }

  TEST_CASE("top-t matches a stable sort oracle") {
    Rng rng(3);
    std::uniform_int_distribution<int> grid(0, 20);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + rng() % 80;
      std::vector<double> j(n);
      for (auto& v : j) v = grid(rng) / 20.0;
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return j[a] > j[b]; });
      const std::size_t t = 1 + rng() % n;
      order.resize(t);
      CHECK(top_t(j, t) == order);
    }
  }

  TEST_CASE("selection fills from s = 1 by uncertainty before touching s = 0") {
    const std::vector<int> s{1, 0, 1, 1, 0};
    const std::vector<double> u{0.0, 0.9, 0.4, 0.0, 0.5};
    const auto j = joint_scores(s, u);
    const auto sel = select_queries(j, s, u, 4);
    CHECK(sel.indices == std::vector<std::size_t>{2, 0, 3, 1});
    CHECK(sel.shortfall == 3);
    const auto ok = select_queries(j, s, u, 1);
    CHECK(ok.indices == std::vector<std::size_t>{2});
    CHECK(ok.shortfall == 0);
  }

  TEST_CASE("no s = 0 sample is selected while an s = 1 candidate remains") {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
      const auto sc = random_scores(60, 0.3, trial % 2 == 0, rng);
      const auto ones = static_cast<std::size_t>(std::count(sc.s.begin(), sc.s.end(), 1));
      const std::size_t t = 1 + rng() % 60;
      const auto sel = select_queries(joint_scores(sc.s, sc.u), sc.s, sc.u, t);
      CHECK(sel.indices.size() == t);
      std::size_t zeros = 0;
      for (auto i : sel.indices) zeros += sc.s[i] == 0;
      CHECK(zeros == (t > ones ? t - ones : 0));
    }
  }

  TEST_CASE("selections pass the Pareto audit and agree with brute force") {
    Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
      const auto sc = random_scores(50, 0.4, trial % 2 == 0, rng);
      const std::size_t t = 1 + rng() % 30;
      const auto sel = select_queries(joint_scores(sc.s, sc.u), sc.s, sc.u, t);
      CHECK(pareto_audit(sc.s, sc.u, sel.indices).passed);
      CHECK_FALSE(dominated(sc, sel.indices));
    }
  }

  TEST_CASE("a dominated selection fails with its counterexample") {
    const std::vector<int> s{1, 1};
    const std::vector<double> u{0.1, 0.9};
    const std::vector<std::size_t> selected{0};
    const auto audit = pareto_audit(s, u, selected);
    CHECK_FALSE(audit.passed);
    REQUIRE(audit.counterexamples.size() == 1);
    CHECK(audit.counterexamples[0].dominating == 1);
    CHECK(audit.counterexamples[0].dominated == 0);
  }

  TEST_CASE("all-equal uncertainty passes trivially") {
    const std::vector<int> s{0, 1, 0, 1};
    const std::vector<double> u(4, 0.5);
    const std::vector<std::size_t> selected{0};
    CHECK(pareto_audit(s, u, selected).passed);
  }

  TEST_CASE("random selections agree with the brute-force audit") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
      const auto sc = random_scores(25, 0.5, true, rng);
      std::vector<std::size_t> all(25);
      std::iota(all.begin(), all.end(), std::size_t{0});
      std::shuffle(all.begin(), all.end(), rng);
      all.resize(1 + rng() % 10);
      CHECK(pareto_audit(sc.s, sc.u, all).passed == !dominated(sc, all));
    }
  }
}
