#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "k3_oracle.hpp"
#include "ngsim/dynamics.hpp"
#include "ngsim/errors.hpp"

using namespace ngsim;

namespace {

Graph path2() {
  std::vector<Edge> e{{0, 1}};
  return Graph::from_edges(2, e);
}

bool duplicate_free(const Vocabulary& v) {
  std::set<Word> s(v.begin(), v.end());
  return s.size() == v.size();
}

// Recounts N_w and N_d from scratch.
std::pair<std::uint64_t, std::uint64_t> recount(const SimState& s) {
  std::uint64_t nw = 0;
  std::set<Word> distinct;
  for (NodeId u = 0; u < s.node_count(); ++u) {
    nw += s.vocabulary(u).size();
    distinct.insert(s.vocabulary(u).begin(), s.vocabulary(u).end());
  }
  return {nw, distinct.size()};
}

Graph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (uniform_unit(rng) < p) e.emplace_back(u, v);
  return Graph::from_edges(n, e);
}

}  // namespace

TEST_CASE("invent_word hands out a counter") {
  SimState s(3);
  CHECK(s.invent_word().token == 0);
  CHECK(s.invent_word().token == 1);
  CHECK(s.invent_word().token == 2);
  CHECK(s.inventions() == 3);
  CHECK(s.distinct_words() == 0);  // not yet held
}

TEST_CASE("is_consensus") {
  SimState s(3);
  const Word w1 = s.invent_word(), w2 = s.invent_word();
  CHECK_FALSE(s.is_consensus());
  for (NodeId u = 0; u < 3; ++u) s.set_vocabulary(u, std::vector{w1});
  CHECK(s.is_consensus());
  s.set_vocabulary(1, std::vector{w1, w2});
  CHECK_FALSE(s.is_consensus());
  s.set_vocabulary(1, std::vector{w2});
  CHECK_FALSE(s.is_consensus());
  CHECK_THROWS_AS(s.set_vocabulary(0, std::vector{w1, w1}), ParameterError);
  CHECK_THROWS_AS(s.set_vocabulary(0, std::vector{Word{9}}), ParameterError);
}

TEST_CASE("broadcast on a two-node path from empty") {
  Rng rng(1);
  SimState s(2);
  Graph g = path2();
  auto out = apply_event(s, g, InteractionMode::broadcast, 0, rng);
  CHECK(out.invented);
  CHECK(out.listener_count == 1);
  CHECK(out.success_count == 0);
  CHECK(s.vocabulary(0) == Vocabulary{out.transmitted});
  CHECK(s.vocabulary(1) == Vocabulary{out.transmitted});
  CHECK(s.is_consensus());
  CHECK(s.time() == 0.5);
}

TEST_CASE("broadcast success collapses the listener and the speaker") {
  Rng rng(1);
  SimState s(2);
  const Word w = s.invent_word(), v = s.invent_word();
  s.set_vocabulary(0, std::vector{w});
  s.set_vocabulary(1, std::vector{w, v});
  auto out = apply_event(s, path2(), InteractionMode::broadcast, 0, rng);
  CHECK(out.transmitted == w);
  CHECK(out.success_count == 1);
  CHECK_FALSE(out.invented);
  CHECK(s.vocabulary(1) == Vocabulary{w});
  CHECK(s.vocabulary(0) == Vocabulary{w});
  CHECK(s.total_words() == 2);
  CHECK(s.distinct_words() == 1);
}

TEST_CASE("broadcast failure appends and leaves the speaker alone") {
  Rng rng(1);
  std::vector<Edge> star{{0, 1}, {0, 2}};
  Graph g = Graph::from_edges(3, star);
  SimState s(3);
  const Word a = s.invent_word(), b = s.invent_word(), c = s.invent_word();
  s.set_vocabulary(0, std::vector{a, b});
  s.set_vocabulary(1, std::vector{c});
  s.set_vocabulary(2, std::vector{c});
  auto out = apply_event(s, g, InteractionMode::broadcast, 0, rng);
  CHECK(out.success_count == 0);
  CHECK(out.listener_count == 2);
  CHECK(s.vocabulary(0) == Vocabulary{a, b});
  CHECK(s.vocabulary(1) == Vocabulary{c, out.transmitted});
}

TEST_CASE("partial broadcast success") {
  Rng rng(1);
  std::vector<Edge> star{{0, 1}, {0, 2}};
  Graph g = Graph::from_edges(3, star);
  SimState s(3);
  const Word a = s.invent_word(), b = s.invent_word();
  s.set_vocabulary(0, std::vector{a, b});
  s.set_vocabulary(1, std::vector{a, b});
  s.set_vocabulary(2, std::vector<Word>{});
  auto out = apply_event(s, g, InteractionMode::broadcast, 0, rng);
  CHECK(out.success_count == 1);
  CHECK(s.vocabulary(0) == Vocabulary{out.transmitted});
  CHECK(s.vocabulary(1) == Vocabulary{out.transmitted});
  CHECK(s.vocabulary(2) == Vocabulary{out.transmitted});
}

TEST_CASE("isolated speakers") {
  Rng rng(1);
  std::vector<Edge> none;
  Graph g = Graph::from_edges(2, none);
  for (auto mode : {InteractionMode::broadcast, InteractionMode::pairwise}) {
    SimState s(2);
    auto out = apply_event(s, g, mode, 1, rng);
    CHECK(out.invented);
    CHECK(out.listener_count == 0);
    CHECK(out.success_count == 0);
    CHECK(s.vocabulary(1).size() == 1);
    CHECK(s.steps() == 1);
    out = apply_event(s, g, mode, 1, rng);
    CHECK_FALSE(out.invented);
    CHECK(s.vocabulary(1).size() == 1);
  }
}

TEST_CASE("pairwise success collapses both") {
  Rng rng(4);
  SimState s(2);
  const Word w = s.invent_word(), v = s.invent_word(), x = s.invent_word();
  s.set_vocabulary(0, std::vector{w});
  s.set_vocabulary(1, std::vector{v, w, x});
  auto out = apply_event(s, path2(), InteractionMode::pairwise, 0, rng);
  CHECK(out.listener_count == 1);
  CHECK(out.success_count == 1);
  CHECK(s.is_consensus());
}

TEST_CASE("one-step consensus on complete graphs under broadcast") {
  for (std::size_t n : {1u, 2u, 5u, 16u, 64u}) {
    Rng rng(n);
    Graph g = generate_complete(n);
    auto r = run(g, InteractionMode::broadcast, rng, 10.0);
    REQUIRE(r.converged);
    CHECK(*r.t_c == 1.0 / static_cast<double>(n));
    CHECK(r.final_state.steps() == 1);
  }
  Rng rng(0);
  auto r = run(path2(), InteractionMode::broadcast, rng, 10.0);
  CHECK(*r.t_c == 0.5);
}

TEST_CASE("run stops at max_time without consensus") {
  Rng rng(2);
  std::vector<Edge> none;
  auto r = run(Graph::from_edges(3, none), InteractionMode::broadcast, rng, 2.0);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.t_c);
  CHECK(r.final_state.steps() == 6);
  CHECK_THROWS_AS(run(path2(), InteractionMode::broadcast, rng, 0.0), ParameterError);
}

TEST_CASE("randomized stepping keeps every invariant") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + trial;
    Graph g = random_graph(n, 0.05 + 0.02 * (trial % 10), rng);
    const auto mode = trial % 2 ? InteractionMode::pairwise : InteractionMode::broadcast;
    SimState s(n);
    for (int k = 0; k < 400; ++k) {
      const auto before = s.vocabulary(0);
      auto out = step(s, g, mode, rng);
      CHECK(out.success_count <= out.listener_count);
      if (mode == InteractionMode::broadcast) {
        CHECK(out.listener_count == g.degree(out.speaker));
        if (out.success_count > 0) CHECK(s.vocabulary(out.speaker).size() == 1);
      }
      for (NodeId u = 0; u < n; ++u) {
        REQUIRE(duplicate_free(s.vocabulary(u)));
        for (Word w : s.vocabulary(u)) REQUIRE(w.token < s.inventions());
      }
      auto [nw, nd] = recount(s);
      REQUIRE(nw == s.total_words());
      REQUIRE(nd == s.distinct_words());
      REQUIRE(s.distinct_words() <= s.inventions());
      REQUIRE(s.inventions() <= s.steps());
      REQUIRE(s.inventions() <= n);
    }
  }
}

TEST_CASE("consensus is absorbing") {
  Rng rng(8);
  std::vector<Edge> ring;
  for (NodeId u = 0; u < 30; ++u) ring.emplace_back(u, (u + 1) % 30);
  ring.emplace_back(0, 15);
  Graph g = Graph::from_edges(30, ring);
  for (auto mode : {InteractionMode::broadcast, InteractionMode::pairwise}) {
    auto r = run(g, mode, rng, 1e5);
    REQUIRE(r.converged);
    SimState s = r.final_state;
    const Word w = s.vocabulary(0).front();
    for (int k = 0; k < 1000; ++k) {
      auto out = step(s, g, mode, rng);
      CHECK(out.success_count == out.listener_count);
      CHECK(out.transmitted == w);
      CHECK_FALSE(out.invented);
    }
    CHECK(s.is_consensus());
    for (NodeId u = 0; u < 30; ++u) CHECK(s.vocabulary(u) == Vocabulary{w});
  }
}

TEST_CASE("identical seeds give identical outcome sequences") {
  Rng grng(3);
  Graph g = random_graph(40, 0.15, grng);
  auto trace = [&](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::tuple<NodeId, std::uint32_t, std::uint32_t, std::uint32_t, bool>> out;
    run(g, InteractionMode::broadcast, rng,
        [&](const SimState&, const StepOutcome& o) {
          out.emplace_back(o.speaker, o.transmitted.token, o.listener_count, o.success_count, o.invented);
        },
        50.0);
    return out;
  };
  CHECK(trace(10) == trace(10));
  CHECK(trace(10) != trace(11));
}

TEST_CASE("early-time inventions shrink with degree") {
  // After n events (t = 1) the word count is of order n/(k+1); check the
  // ensemble mean falls as k goes from 12 to 50.
  const std::size_t n = 1024;
  auto mean_inventions = [&](double k) {
    Rng rng(static_cast<std::uint64_t>(k));
    double sum = 0.0;
    for (int r = 0; r < 20; ++r) {
      RggConfig c{n, 32.0, std::nullopt, k, Boundary::periodic};
      Graph g = generate_rgg(c, rng);
      SimState s(n);
      for (std::size_t e = 0; e < n; ++e) step(s, g, InteractionMode::broadcast, rng);
      CHECK(s.inventions() >= 1);
      CHECK(s.inventions() <= n);
      sum += static_cast<double>(s.inventions());
    }
    return sum / 20.0;
  };
  const double k12 = mean_inventions(12.0), k50 = mean_inventions(50.0);
  CHECK(k50 < k12);
}

TEST_CASE("K3 pairwise oracle value") {
  const auto m = k3_oracle::pairwise_triangle();
  // Frozen from the enumeration: 191/36 events, variance 665/48.
  CHECK(m.mean_steps == doctest::Approx(191.0 / 36.0).epsilon(1e-12));
  CHECK(m.second_moment_steps - m.mean_steps * m.mean_steps == doctest::Approx(665.0 / 48.0).epsilon(1e-12));
  CHECK(m.states == 32);
}

TEST_CASE("K3 pairwise mean convergence time matches the exact chain") {
  const auto m = k3_oracle::pairwise_triangle();
  const double exact_tc = m.mean_steps / 3.0;
  Graph g = generate_complete(3);
  Rng rng(2024);
  const int runs = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < runs; ++r) {
    auto res = run(g, InteractionMode::pairwise, rng, 1e4);
    REQUIRE(res.converged);
    sum += *res.t_c;
    sumsq += *res.t_c * *res.t_c;
  }
  const double mean = sum / runs;
  const double var = (sumsq - runs * mean * mean) / (runs - 1);
  const double se = std::sqrt(var / runs);
  CHECK(std::abs(mean - exact_tc) < 3.0 * se);
  // sample variance agrees with the oracle variance of t_c = steps / 3
  CHECK(var == doctest::Approx((665.0 / 48.0) / 9.0).epsilon(0.05));
}
