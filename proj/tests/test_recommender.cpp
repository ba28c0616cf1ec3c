#include "doctest.h"
#include "oracles.hpp"

#include <array>
#include <random>

#include "ldmp/recommender.hpp"

using namespace ldmp;

namespace {

QTable aligned_matrix() {
  QTable t(3, 3);
  t << -1.5, -2, -2, -2, -1.5, -2, -2, -2, -1.5;
  return t;
}

QTable misaligned_matrix() {
  QTable t(3, 3);
  t << -2, -1.5, -2, -2, -2, -1.5, -1.5, -2, -2;
  return t;
}

QTensor random_tensor(int n, int m, int k, Rng& rng, int levels = 4) {
  std::uniform_int_distribution<int> v(0, levels - 1);
  QTensor out(static_cast<std::size_t>(n), QTable(m, k));
  for (auto& t : out)
    for (int s = 0; s < m; ++s)
      for (int a = 0; a < k; ++a) t(s, a) = -2.0 + 0.25 * v(rng);
  return out;
}

ActionCounts counts3(int u, int d, int c) { return (ActionCounts(3) << u, d, c).finished(); }

bool in_range(const RecommendationVector& recs, int n, int m) {
  return recs.size() == n && (recs.array() >= 0).all() && (recs.array() < m).all();
}

SortedTable table_of(std::initializer_list<std::initializer_list<Candidate>> columns) {
  SortedTable out;
  for (const auto& col : columns) out.emplace_back(col);
  return out;
}

}  // namespace

TEST_SUITE("recommender") {

TEST_CASE("constant recommender") {
  CHECK(constant_recommender(4, 3) == (RecommendationVector(4) << 0, 1, 0, 1).finished());
  CHECK(constant_recommender(1, 1) == RecommendationVector::Zero(1));
  CHECK(constant_recommender(5, 1) == RecommendationVector::Zero(5));
  CHECK(constant_recommender(6, 93) == constant_recommender(6, 93));

  RecommenderContext ctx{make_network(Network::Augmented, 6), 3, counts3(3, 3, 0), {}};
  auto none = make_recommender("none", ctx);
  Rng rng(1);
  const auto first = none->recommend({}, 0, rng);
  CHECK(none->recommend({}, 1, rng) == first);
  CHECK(none->recommend({}, 500, rng) == first);
}

TEST_CASE("random recommender") {
  Rng rng(8);
  CHECK(random_recommender(7, 1, rng) == RecommendationVector::Zero(7));

  std::array<int, 3> hits{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++hits[static_cast<std::size_t>(random_recommender(1, 3, rng)[0])];
  for (int h : hits) CHECK(std::abs(h / double(draws) - 1.0 / 3) < 0.01);

  // 10 steps x 20 agents over m = 3: a collision has probability 3^-200
  Rng a(make_stream(1, StreamRole::Recommender, 0)), b(make_stream(2, StreamRole::Recommender, 0));
  bool differ = false;
  for (int t = 0; t < 10; ++t) differ |= random_recommender(20, 3, a) != random_recommender(20, 3, b);
  CHECK(differ);
}

TEST_CASE("two-step recommender") {
  CHECK(two_step_recommender(TwoStepKind::Misaligned, 0, 4) == RecommendationVector::Zero(4));
  CHECK(two_step_recommender(TwoStepKind::Aligned, 0, 4) == RecommendationVector::Ones(4));
  for (auto kind : {TwoStepKind::Aligned, TwoStepKind::Misaligned}) {
    CHECK(two_step_recommender(kind, 5, 4) == two_step_recommender(kind, 500, 4));
    CHECK(two_step_recommender(kind, 1, 4) == (RecommendationVector(4) << 0, 1, 0, 1).finished());
  }
}

TEST_CASE("possible actions") {
  CHECK(get_possible_actions(QTensor{aligned_matrix()})[0] == ActionSet::full(3));
  CHECK(get_possible_actions(QTensor{QTable::Constant(4, 3, -1.7)})[0] == ActionSet::single(0));
  QTable t(2, 2);
  t << 5, 1, 4, 1;
  CHECK(get_possible_actions(QTensor{t})[0] == ActionSet::single(0));

  Rng rng(4);
  for (const auto& p : get_possible_actions(random_tensor(50, 5, 3, rng))) {
    CHECK(!p.empty());
    CHECK(p.size() <= 3);
  }
}

TEST_CASE("estimate reward examples") {
  const auto spec100 = make_network(Network::Augmented, 100);
  auto est = estimate_reward(PossibleActions(100, ActionSet::full(3)), spec100);
  CHECK(est.assignment == counts3(50, 50, 0));
  CHECK(est.reward.isApprox(Eigen::Vector3d(-1.5, -1.5, -1.0)));

  // everyone locked to cross: the formulas give -2 on every edge
  est = estimate_reward(PossibleActions(100, ActionSet::single(kCross)), spec100);
  CHECK(est.assignment == counts3(0, 0, 100));
  CHECK(est.reward.isApprox(Eigen::Vector3d(-2.0, -2.0, -2.0)));

  PossibleActions two{ActionSet::single(kUp), ActionSet::single(kUp) | ActionSet::single(kDown)};
  est = estimate_reward(two, make_network(Network::Augmented, 2));
  CHECK(est.assignment == counts3(1, 1, 0));
  CHECK(est.reward.isApprox(Eigen::Vector3d(-1.5, -1.5, -1.0)));
}

TEST_CASE("estimate reward matches exhaustive placement") {
  Rng rng(12);
  std::uniform_int_distribution<int> size(1, 8), mask(1, 7);
  for (int trial = 0; trial < 3000; ++trial) {
    const int N = size(rng);
    PossibleActions sets;
    std::vector<unsigned> plain;
    for (int i = 0; i < N; ++i) {
      const unsigned bits = static_cast<unsigned>(mask(rng));
      ActionSet s;
      for (int a = 0; a < 3; ++a)
        if ((bits >> a) & 1U) s.insert(a);
      sets.push_back(s);
      plain.push_back(bits);
    }
    const auto expected = oracle::brute_assignment(plain);
    const auto est = estimate_reward(sets, make_network(Network::Augmented, N));
    CAPTURE(N);
    CHECK(est.assignment == counts3(expected[0], expected[1], expected[2]));
  }
}

TEST_CASE("estimate update") {
  QTensor tensor{QTable::Constant(2, 3, -2.0)};
  const ArgmaxTable argmaxes = argmax_table(tensor);
  Eigen::VectorXd rbar = Eigen::Vector3d(-1.5, -1.5, -1.0);
  auto delta = estimate_update(tensor, argmaxes, rbar, {0.1, 0.0});
  CHECK(delta(0, 0) == doctest::Approx(0.05));

  rbar = Eigen::Vector3d(-2.0, -1.0, -1.0);
  delta = estimate_update(tensor, argmaxes, rbar, {0.1, 0.0});
  CHECK(delta.isZero(0));

  Rng rng(6);
  const auto big = random_tensor(10, 4, 3, rng);
  delta = estimate_update(big, argmax_table(big), rbar, {0.0, 0.0});
  CHECK(delta.isZero(0));
}

TEST_CASE("positive reinforcement picks the largest realised gain") {
  // both rows argmax column 1
  QTable q(2, 3);
  q << -1.9, -1.6, -2.0, -1.8, -1.7, -1.9;
  const QTensor tensor{q};
  const ArgmaxTable argmaxes = argmax_table(tensor);
  const Eigen::VectorXd rbar = Eigen::Vector3d(-1.5, -1.2, -1.0);
  const LearnerParams params{0.5, 0.0};
  const auto delta = estimate_update(tensor, argmaxes, rbar, params);
  Eigen::Vector2d gain;
  for (int s = 0; s < 2; ++s) {
    QTable copy = q;
    gain[s] = bellman_update(copy, s, 1, rbar[1], s, params) - q(s, 1);
    CHECK(gain[s] == doctest::Approx(delta(0, s)));
  }
  Eigen::Index best;
  delta.row(0).maxCoeff(&best);
  CHECK(gain[best] == gain.maxCoeff());
}

TEST_CASE("priority") {
  const TargetAssignment d = counts3(50, 50, 0);
  CHECK(calculate_priority(d, counts3(0, 0, 0)) == counts3(50, 50, 0));
  CHECK(calculate_priority(d, counts3(50, 0, 0)) == counts3(0, 50, 0));
  CHECK(calculate_priority(d, counts3(70, 10, 20)) == counts3(0, 40, 0));
}

TEST_CASE("selection examples") {
  const TargetAssignment d = counts3(3, 1, 0);
  {
    SelectionState st(1, 3);
    select_recommendations(table_of({{{0, 4, 0.2}, {0, 2, 0.3}}, {}, {}}), d, SortPhase::Min, st);
    CHECK(st.recs[0] == 4);
  }
  {
    // agent 0 heads both live columns; up has mu 3, down mu 1
    SelectionState st(1, 3);
    select_recommendations(table_of({{{0, 1, 0.5}}, {{0, 2, 0.01}}, {}}), d, SortPhase::Min, st);
    CHECK(st.recs[0] == 1);
    CHECK(st.assigned == counts3(1, 0, 0));
  }
  {
    SelectionState st(1, 3);
    select_recommendations(table_of({{{0, 1, 0.02}}, {{0, 2, 0.01}}, {}}), counts3(1, 1, 0), SortPhase::Min, st);
    CHECK(st.recs[0] == 2);
  }
  {
    // zero-priority column is skipped in the min phase
    SelectionState st(1, 3);
    select_recommendations(table_of({{}, {}, {{0, 0, -0.3}}}), d, SortPhase::Min, st);
    CHECK(st.recs[0] == -1);
    select_recommendations(table_of({{}, {}, {{0, 0, -0.3}}}), d, SortPhase::Max, st);
    CHECK(st.recs[0] == 0);
  }
}

TEST_CASE("heuristic on degenerate and aligned tensors") {
  const auto spec4 = make_network(Network::Augmented, 4);
  const QTensor all_up(4, QTable::Constant(5, 3, -1.5));
  const auto recs = heuristic_recommend(all_up, spec4, counts3(4, 0, 0), {});
  CHECK(in_range(recs, 4, 5));

  const auto spec2 = make_network(Network::Augmented, 2);
  const auto pair = heuristic_recommend(QTensor(2, aligned_matrix()), spec2, counts3(1, 1, 0), {});
  CHECK(((pair[0] == 0 && pair[1] == 1) || (pair[0] == 1 && pair[1] == 0)));
}

TEST_CASE("heuristic totality and phase-one caps") {
  Rng rng(21);
  std::uniform_int_distribution<int> dn(1, 12), dm(1, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dn(rng), m = dm(rng);
    const auto spec = make_network(Network::Augmented, n);
    const auto tensor = random_tensor(n, m, 3, rng);
    const auto target = social_optimum(spec);
    const LearnerParams params{0.1, trial % 2 ? 0.0 : 0.5};
    CHECK(in_range(heuristic_recommend(tensor, spec, target, params), n, m));

    const auto argmaxes = argmax_table(tensor);
    const auto est = estimate_reward(possible_actions(argmaxes), spec);
    const auto delta = estimate_update(tensor, argmaxes, est.reward, params);
    SelectionState st(n, 3);
    select_recommendations(sort_table(argmaxes, delta, 3, SortPhase::Min), target, SortPhase::Min, st);
    CHECK((st.assigned.array() <= target.array()).all());
    for (int i = 0; i < n; ++i) {
      if (st.recs[i] < 0) continue;
      CHECK(argmaxes(i, st.recs[i]) != kCross);
    }
  }
}

TEST_CASE("heuristic on the initial network") {
  Rng rng(13);
  const auto spec = make_network(Network::Initial, 9);
  const auto tensor = random_tensor(9, 4, 2, rng);
  CHECK(in_range(heuristic_recommend(tensor, spec, social_optimum(spec), {}), 9, 4));
}

TEST_CASE("route heuristic") {
  const LearnerParams p{0.01, 0.0};
  {
    QTable cross(3, 3);
    cross << -2, -2, -1.2, -2, -2, -1.6, -2, -2, -1.4;
    const auto recs = route_heuristic_3state(QTensor{cross}, p);
    CHECK(recs[0] == 0);  // largest cross value drops most
  }
  {
    const auto recs = route_heuristic_3state(QTensor(4, aligned_matrix()), p);
    CHECK(recs == (RecommendationVector(4) << 0, 0, 1, 1).finished());
  }
  {
    QTable up_once(3, 3);
    up_once << -2, -2, -1.5, -1.5, -2, -1.9, -2, -2, -1.6;
    const auto recs = route_heuristic_3state(QTensor{up_once}, p);
    CHECK(recs[0] == 1);
  }
  {
    QTable t(3, 3);
    t << -1.5, -2, -2, -1.8, -1.9, -2, -1.6, -1.9, -1.9;  // up everywhere
    const QTensor tensor{t};
    const auto argmaxes = argmax_table(tensor);
    const auto est = estimate_reward(possible_actions(argmaxes), make_network(Network::Augmented, 1));
    const auto delta = estimate_update(tensor, argmaxes, est.reward, p);
    Eigen::Index best;
    delta.row(0).maxCoeff(&best);
    CHECK(route_heuristic_3state(tensor, p)[0] == best);
  }
  CHECK_THROWS_AS(route_heuristic_3state(QTensor{QTable::Zero(4, 3)}, p), InputError);
}

TEST_CASE("aligned heuristic") {
  const LearnerParams p{0.01, 0.0};
  const auto recs = aligned_heuristic_3state(QTensor(4, aligned_matrix()), p);
  CHECK(recs == (RecommendationVector(4) << 0, 0, 1, 1).finished());

  const auto mis = aligned_heuristic_3state(QTensor(5, misaligned_matrix()), p);
  CHECK((mis.array() == mis[0]).all());

  QTable only_cross = misaligned_matrix();
  only_cross.row(2) << -2, -2, -1.0;  // state 2 now aligned with cross
  CHECK(aligned_heuristic_3state(QTensor{only_cross}, p)[0] == 2);
  CHECK_THROWS_AS(aligned_heuristic_3state(QTensor{QTable::Zero(3, 2)}, p), InputError);
}

TEST_CASE("route and aligned heuristics agree on exclusively grouped aligned agents") {
  Rng rng(44);
  const LearnerParams p{0.01, 0.0};
  int seen = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto tensor = random_tensor(20, 3, 3, rng, 3);
    const auto argmaxes = argmax_table(tensor);
    const auto route = route_heuristic_3state(tensor, p);
    const auto aligned = aligned_heuristic_3state(tensor, p);
    for (int i = 0; i < 20; ++i) {
      const auto reach = possible_actions(argmaxes.row(i))[0];
      if (reach.size() != 1) continue;
      const int a = reach.front();
      if (argmaxes(i, a) != a) continue;
      ++seen;
      CHECK(argmaxes(i, route[i]) == argmaxes(i, aligned[i]));
    }
  }
  CHECK(seen > 0);
}

TEST_CASE("strategy factory") {
  const RecommenderContext aug3{make_network(Network::Augmented, 4), 3, counts3(2, 2, 0), {}};
  const RecommenderContext init2{make_network(Network::Initial, 4), 2, (ActionCounts(2) << 2, 2).finished(), {}};
  for (const auto& name : recommender_names()) {
    const bool twostep = name.rfind("twostep", 0) == 0;
    const auto& ctx = twostep ? init2 : aug3;
    auto rec = make_recommender(name, ctx);
    CHECK(rec->name() == name);
    Rng rng(3);
    QTensor view(4, QTable::Constant(ctx.num_states, ctx.spec.num_actions(), -1.7));
    CHECK(in_range(rec->recommend(view, 0, rng), 4, ctx.num_states));
  }
  CHECK_THROWS_AS(make_recommender("oracle", aug3), InputError);
  CHECK_THROWS_AS(make_recommender("twostep-aligned", aug3), InputError);
  CHECK_THROWS_AS(make_recommender("route3", init2), InputError);
  RecommenderContext aug5 = aug3;
  aug5.num_states = 5;
  CHECK_THROWS_AS(make_recommender("aligned3", aug5), InputError);
}

TEST_CASE("strategies are deterministic given their inputs") {
  Rng gen(9);
  const auto tensor = random_tensor(30, 3, 3, gen);
  const RecommenderContext ctx{make_network(Network::Augmented, 30), 3, counts3(15, 15, 0), {}};
  for (const auto& name : {"none", "random", "heuristic", "route3", "aligned3"}) {
    auto a = make_recommender(name, ctx);
    auto b = make_recommender(name, ctx);
    Rng ra(5), rb(5);
    CHECK(a->recommend(tensor, 3, ra) == b->recommend(tensor, 3, rb));
  }
}

}
