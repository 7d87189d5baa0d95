#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "tsspl/random.hpp"
#include "tsspl/solution_grid.hpp"

using namespace tsspl;

namespace {

QueryPoint guard_at(double x) { return {x, QueryKind::Guard, 0}; }

double total(std::span<const double> w) { return std::accumulate(w.begin(), w.end(), 0.0); }

// Answer likelihood written straight from the door/guard/truth table: a door
// left of the guard makes "Left" truthful, so P(Left) = t; right of the guard
// P(Left) = 1 - t; a door under the query is uninformative.
double likelihood(double door, double t, double x, Direction a) {
  double p_left;
  if (door < x) {
    p_left = t;
  } else if (door > x) {
    p_left = 1.0 - t;
  } else {
    p_left = 0.5;
  }
  return a == Direction::Left ? p_left : 1.0 - p_left;
}

struct Answer {
  double x;
  Direction a;
};

// Direct enumeration of prior(d) prior(t) prod_k P(Q_k | d, t), normalized.
std::vector<double> brute_force(const std::vector<double>& doors, const std::vector<double>& truths,
                                const std::vector<double>& door_prior, const std::vector<double>& truth_prior,
                                const std::vector<Answer>& answers) {
  std::vector<double> w(doors.size() * truths.size());
  for (std::size_t i = 0; i < doors.size(); ++i) {
    for (std::size_t j = 0; j < truths.size(); ++j) {
      double v = door_prior[i] * truth_prior[j];
      for (const Answer& q : answers) v *= likelihood(doors[i], truths[j], q.x, q.a);
      w[i * truths.size() + j] = v;
    }
  }
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= z;
  return w;
}

Direction random_direction(Rng& rng) { return bernoulli(rng, 0.5) ? Direction::Left : Direction::Right; }

}  // namespace

TEST(SolutionGrid, UniformConstruction) {
  const auto g = SolutionGrid::uniform(201, 101, TruthRange::full());
  EXPECT_EQ(g.num_doors(), 201u);
  EXPECT_EQ(g.num_truths(), 101u);
  for (double w : g.weights()) EXPECT_NEAR(w, 1.0 / (201.0 * 101.0), 1e-18);

  const auto two = SolutionGrid::uniform(2, 1, TruthRange::single(0.75));
  EXPECT_DOUBLE_EQ(two.door_marginal()[0], 0.5);
  EXPECT_DOUBLE_EQ(two.truths()[0], 0.75);

  const auto six = SolutionGrid::uniform(3, 2, TruthRange{0.5, 1.0, false});
  for (double w : six.weights()) EXPECT_DOUBLE_EQ(w, 1.0 / 6.0);
  for (double m : six.door_marginal()) EXPECT_NEAR(m, 1.0 / 3.0, 1e-15);
}

TEST(SolutionGrid, TruthLevelLayouts) {
  EXPECT_EQ(truth_levels(3, TruthRange::full()), (std::vector<double>{0.0, 0.5, 1.0}));
  const auto inf = truth_levels(51, TruthRange::informative());
  EXPECT_GT(inf.front(), 0.5);
  EXPECT_DOUBLE_EQ(inf.back(), 1.0);
  EXPECT_NEAR(inf[1] - inf[0], 0.5 / 51, 1e-15);
  EXPECT_THROW(truth_levels(0, TruthRange::full()), std::invalid_argument);
  EXPECT_THROW(truth_levels(3, TruthRange::single(0.7)), std::invalid_argument);
}

TEST(SolutionGrid, RejectsBadConstruction) {
  EXPECT_THROW(SolutionGrid::uniform(1, 3, TruthRange::full()), std::invalid_argument);
  EXPECT_THROW(SolutionGrid::uniform(3, 0, TruthRange::full()), std::invalid_argument);
  EXPECT_THROW(SolutionGrid({0.5, 0.2}, {0.5}), std::invalid_argument);
  EXPECT_THROW(SolutionGrid({0.2, 0.5}, {1.5}), std::invalid_argument);
}

TEST(SolutionGrid, SingleBayesStepTwoDoors) {
  SolutionGrid g({0.25, 0.75}, {0.75});
  g.update(guard_at(0.5), Direction::Left);
  EXPECT_NEAR(g.door_marginal()[0], 0.75, 1e-15);
  EXPECT_NEAR(g.door_marginal()[1], 0.25, 1e-15);
}

TEST(SolutionGrid, JointWeightsTwoByTwo) {
  SolutionGrid g({0.25, 0.75}, {0.6, 0.9});
  g.update(guard_at(0.5), Direction::Left);
  const std::vector<double> expected{0.3, 0.45, 0.2, 0.05};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(g.weights()[k], expected[k], 1e-12);
  EXPECT_NEAR(g.door_marginal()[0], 0.75, 1e-12);
  EXPECT_NEAR(g.door_marginal()[1], 0.25, 1e-12);
  const auto tm = g.truth_marginal();
  EXPECT_NEAR(tm[0], 0.5, 1e-12);
  EXPECT_NEAR(tm[1], 0.5, 1e-12);
}

TEST(SolutionGrid, HalfTruthIsUninformative) {
  auto g = SolutionGrid::uniform(5, 1, TruthRange::single(0.5));
  const std::vector<double> before(g.weights().begin(), g.weights().end());
  g.update(guard_at(0.375), Direction::Left);
  g.update(guard_at(0.375), Direction::Right);
  for (std::size_t k = 0; k < before.size(); ++k) EXPECT_NEAR(g.weights()[k], before[k], 1e-15);
}

TEST(SolutionGrid, QueryOnDoorGetsHalf) {
  SolutionGrid g({0.0, 0.5, 1.0}, {0.9});
  g.update({0.5, QueryKind::Door, 1}, Direction::Left);
  // Likelihoods 0.9, 0.5, 0.1.
  EXPECT_NEAR(g.door_marginal()[0], 0.9 / 1.5, 1e-15);
  EXPECT_NEAR(g.door_marginal()[1], 0.5 / 1.5, 1e-15);
  EXPECT_NEAR(g.door_marginal()[2], 0.1 / 1.5, 1e-15);
}

TEST(SolutionGrid, MatchesBruteForceEnumeration) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nd = 2 + static_cast<std::size_t>(uniform01(rng) * 4);  // 2..5
    const std::size_t nt = 1 + static_cast<std::size_t>(uniform01(rng) * 5);  // 1..5
    ASSERT_LE(nd * nt, 25u);
    const auto doors = door_positions(nd);
    std::vector<double> truths;
    for (std::size_t j = 0; j < nt; ++j) truths.push_back((static_cast<double>(j) + uniform01(rng)) / static_cast<double>(nt));
    std::vector<double> dp(nd);
    std::vector<double> tp(nt);
    for (double& v : dp) v = 0.1 + uniform01(rng);
    for (double& v : tp) v = 0.1 + uniform01(rng);

    SolutionGrid g = SolutionGrid(doors, truths).with_prior(dp, tp);
    std::vector<Answer> answers;
    const std::size_t steps = 1 + static_cast<std::size_t>(uniform01(rng) * 10);
    for (std::size_t s = 0; s < steps; ++s) {
      // Mix guard queries with queries landing exactly on a door.
      double x;
      if (bernoulli(rng, 0.25)) {
        x = doors[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(nd))];
      } else {
        const std::size_t k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(nd - 1));
        x = 0.5 * (doors[k] + doors[k + 1]);
      }
      const Direction a = random_direction(rng);
      answers.push_back({x, a});
      g.update({x, QueryKind::Guard, 0}, a);
    }
    const auto expected = brute_force(doors, truths, dp, tp, answers);
    for (std::size_t k = 0; k < expected.size(); ++k) ASSERT_NEAR(g.weights()[k], expected[k], 1e-9) << trial;
  }
}

TEST(SolutionGrid, NormalizedAfterManyRandomUpdates) {
  Rng rng(99);
  auto g = SolutionGrid::uniform(201, 101, TruthRange::full());
  for (int i = 0; i < 10000; ++i) {
    const double x = uniform01(rng);
    g.update(guard_at(x), random_direction(rng));
    ASSERT_NEAR(total(g.weights()), 1.0, 1e-9) << i;
    if (i % 1000 == 0) {
      ASSERT_NEAR(total(g.door_marginal()), 1.0, 1e-9);
      const auto tm = g.truth_marginal();
      ASSERT_NEAR(total(tm), 1.0, 1e-9);
    }
  }
  for (double w : g.weights()) EXPECT_GE(w, 0.0);
}

TEST(SolutionGrid, UpdatesCommute) {
  Rng rng(5);
  auto a = SolutionGrid::uniform(21, 11, TruthRange::full());
  auto b = a;
  std::vector<Answer> answers;
  for (int i = 0; i < 30; ++i) answers.push_back({uniform01(rng), random_direction(rng)});
  for (const auto& q : answers) a.update(guard_at(q.x), q.a);
  for (auto it = answers.rbegin(); it != answers.rend(); ++it) b.update(guard_at(it->x), it->a);
  for (std::size_t k = 0; k < a.weights().size(); ++k) EXPECT_NEAR(a.weights()[k], b.weights()[k], 1e-9);
}

TEST(SolutionGrid, DeceptionSymmetry) {
  // Mirroring the truth levels (t -> 1 - t) and flipping every answer leaves
  // the door marginal unchanged.
  Rng rng(17);
  const auto doors = door_positions(31);
  const auto truths = truth_levels(21, TruthRange::full());
  SolutionGrid a(doors, truths);
  std::vector<double> flipped_truths(truths.size());
  for (std::size_t j = 0; j < truths.size(); ++j) flipped_truths[j] = 1.0 - truths[truths.size() - 1 - j];
  SolutionGrid b(doors, flipped_truths);
  for (int i = 0; i < 500; ++i) {
    const double x = uniform01(rng);
    const Direction d = random_direction(rng);
    a.update(guard_at(x), d);
    b.update(guard_at(x), flip(d));
    for (std::size_t k = 0; k < doors.size(); ++k) ASSERT_NEAR(a.door_marginal()[k], b.door_marginal()[k], 1e-9);
  }
  const auto ta = a.truth_marginal();
  const auto tb = b.truth_marginal();
  for (std::size_t j = 0; j < ta.size(); ++j) EXPECT_NEAR(ta[j], tb[ta.size() - 1 - j], 1e-9);
}

TEST(SolutionGrid, WithPrior) {
  const auto flat = SolutionGrid::uniform(4, 3, TruthRange::full());
  const auto same = flat.with_prior(std::vector<double>(4, 2.0), std::vector<double>(3, 5.0));
  for (std::size_t k = 0; k < 12; ++k) EXPECT_NEAR(same.weights()[k], flat.weights()[k], 1e-15);

  const auto degenerate = SolutionGrid::uniform(2, 3, TruthRange::full()).with_prior(
      std::vector<double>{1.0, 0.0}, std::vector<double>(3, 1.0));
  EXPECT_DOUBLE_EQ(degenerate.door_marginal()[0], 1.0);
  EXPECT_DOUBLE_EQ(degenerate.door_marginal()[1], 0.0);

  const auto g = SolutionGrid::uniform(101, 101, TruthRange::full());
  const auto cf = g.with_prior(gaussian_weights(g.doors(), 0.85, 0.3), std::vector<double>(101, 1.0));
  const auto& m = cf.door_marginal();
  EXPECT_EQ(std::max_element(m.begin(), m.end()) - m.begin(), 85);
  const double ratio = m[85] / m[55];  // one sigma apart
  EXPECT_NEAR(ratio, std::exp(0.5), 1e-9);

  EXPECT_THROW((void)g.with_prior(std::vector<double>(101, 0.0), std::vector<double>(101, 1.0)),
               std::invalid_argument);
  EXPECT_THROW((void)g.with_prior(std::vector<double>(3, 1.0), std::vector<double>(101, 1.0)),
               std::invalid_argument);
}

TEST(SolutionGrid, ContradictionThrows) {
  SolutionGrid g({0.25, 0.75}, {1.0});
  g.update(guard_at(0.5), Direction::Left);
  EXPECT_THROW(g.update(guard_at(0.1), Direction::Left), std::domain_error);
}

TEST(SolutionGrid, MassInInterval) {
  SolutionGrid g = SolutionGrid::uniform(101, 1, TruthRange::single(0.8));
  EXPECT_NEAR(g.mass_in_interval(0.14, 0.16), 3.0 / 101.0, 1e-15);
  std::vector<double> one_hot(101, 0.0);
  one_hot[15] = 1.0;
  g = g.with_prior(one_hot, std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(g.mass_in_interval(0.14, 0.16), 1.0);
  EXPECT_DOUBLE_EQ(g.mass_in_interval(0.5, 0.6), 0.0);
}

TEST(SolutionGrid, SampleJoint) {
  Rng rng(3);
  auto g = SolutionGrid::uniform(3, 1, TruthRange::single(0.8)).with_prior(std::vector<double>{0.1, 0.2, 0.7},
                                                                          std::vector<double>{1.0});
  int third = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) third += g.sample_joint(rng).first == 2 ? 1 : 0;
  const double sd = std::sqrt(0.7 * 0.3 / n);
  EXPECT_NEAR(third / static_cast<double>(n), 0.7, 4 * sd);

  auto u = SolutionGrid::uniform(4, 5, TruthRange::full());
  std::vector<double> counts(20, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto [d, t] = u.sample_joint(rng);
    counts[d * 5 + t] += 1.0;
  }
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - n / 20.0) * (c - n / 20.0) / (n / 20.0);
  EXPECT_LT(chi2, 43.82);  // 99.9% quantile, 19 degrees of freedom

  auto hot = SolutionGrid::uniform(3, 2, TruthRange::full())
                 .with_prior(std::vector<double>{0.0, 1.0, 0.0}, std::vector<double>{0.0, 1.0});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(hot.sample_joint(rng), (std::pair<std::size_t, std::size_t>{1, 1}));
}

TEST(SolutionGrid, CsvIsDeterministic) {
  auto g = SolutionGrid::uniform(3, 2, TruthRange::full());
  g.update(guard_at(0.25), Direction::Right);
  std::ostringstream a;
  std::ostringstream b;
  g.write_csv(a);
  g.write_csv(b);
  const std::string text = a.str();
  EXPECT_EQ(text, b.str());
  EXPECT_EQ(text.substr(0, 18), "door,truth,weight\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
}
