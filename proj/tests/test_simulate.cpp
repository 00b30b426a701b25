#include "catch_amalgamated.hpp"
#include "support.hpp"

using namespace sreplicator;
using namespace fixtures;

namespace {

SimConfig config(std::size_t n, double t_final, double dt, std::uint64_t seed, std::size_t stride = 1) {
  SimConfig c(SimplexPoint::barycenter(n));
  c.t_final = t_final;
  c.dt = dt;
  c.seed = seed;
  c.record_stride = stride;
  return c;
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

}  // namespace

TEST_CASE("Philox known-answer vectors") {
  using rng::philox4x32;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  CHECK(rng::splitmix64(0) == 0xe220a8397b1dcdafull);
}

TEST_CASE("normal stream") {
  const rng::NormalStream s(42);
  std::vector<double> buf(5);
  s.fill(7, 5, buf);
  for (std::size_t i = 0; i < 5; ++i) CHECK(buf[i] == s.at(7, i));

  double m = 0.0, m2 = 0.0;
  const int count = 200000;
  for (int k = 0; k < count; ++k) {
    const double z = s.at(static_cast<std::uint64_t>(k / 3), static_cast<std::size_t>(k % 3));
    m += z;
    m2 += z * z;
  }
  m /= count;
  m2 /= count;
  CHECK(std::abs(m) < 5.0 / std::sqrt(count));
  CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / count));
  CHECK(rng::NormalStream(1).at(0, 0) != rng::NormalStream(2).at(0, 0));
}

TEST_CASE("configuration invariants") {
  SimConfig c = config(2, 1.0, 1e-3, 1);
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), InvariantError);
  c.dt = 2.0;
  CHECK_THROWS_AS(c.validate(), InvariantError);
  c.dt = 1e-3;
  c.record_stride = 0;
  CHECK_THROWS_AS(c.validate(), InvariantError);
  c.record_stride = 1;
  c.x0 = SimplexPoint::vertex(2, 0);
  CHECK_THROWS_AS(c.validate(), InvariantError);
  CHECK(SimConfig::default_stride(1e4, 1e-3) == 10);
  CHECK(SimConfig::default_stride(10, 1e-3) == 1);
  CHECK_THROWS_AS(simulate(rsp(1, 2), config(2, 1.0, 1e-3, 1)), InvariantError);
}

TEST_CASE("same seed gives a bit-identical trajectory") {
  const Game g = rsp(1, 2);
  const Trajectory a = simulate(g, config(3, 5.0, 1e-3, 9, 7));
  const Trajectory b = simulate(g, config(3, 5.0, 1e-3, 9, 7));
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.time(k) == b.time(k));
    CHECK(a.state(k) == b.state(k));
    CHECK(a.log_pop(k) == b.log_pop(k));
  }
  const Trajectory c = simulate(g, config(3, 5.0, 1e-3, 10, 7));
  CHECK(a.state(a.size() - 1) != c.state(c.size() - 1));
}

TEST_CASE("recorded states stay on the simplex") {
  Random rng(51);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = rng.integer(2, 5);
    const Game g = rng.game(n);
    SimConfig c = config(static_cast<std::size_t>(n), 20.0, 1e-3, static_cast<std::uint64_t>(t), 13);
    c.x0 = rng.interior_point(n);
    const Trajectory tr = simulate(g, c);
    CHECK(tr.time(0) == 0.0);
    CHECK(tr.time(tr.size() - 1) == Catch::Approx(20.0).epsilon(1e-12));  // final step recorded
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const auto x = tr.state(k);
      CHECK(std::abs(x.sum() - 1.0) <= SimplexPoint::tolerance(n));
      CHECK((x.array() > 0.0).all());
      const Vector w = tr.log_pop(k).array().exp().matrix();
      CHECK((w / w.sum() - x).cwiseAbs().maxCoeff() <= 1e-12);
      if (k > 0) CHECK(tr.time(k) > tr.time(k - 1));
    }
  }
}

TEST_CASE("log coordinates stay exact when a share underflows") {
  // strategy 2 loses at rate 5 per unit time; X_2 underflows long before T
  const Game g = from_modified(mat({{5, 5}, {0, 0}}), 0.5);
  const Trajectory tr = simulate(g, config(2, 400.0, 1e-2, 3, 100));
  const Vector ls = tr.log_state(tr.size() - 1);
  CHECK(std::isfinite(ls(1)));
  CHECK(ls(1) < -1000.0);
  CHECK(ls(1) / 400.0 == Catch::Approx(-5.0).margin(0.2));
  const auto bd = boundary_diagnostics(tr);
  CHECK(bd.min_log_final < -1000.0);
  CHECK(bd.log_slope(1) == Catch::Approx(-5.0).margin(0.2));
}

TEST_CASE("vanishing noise tracks the deterministic replicator") {
  const Game g = rsp(1, 2, 1e-6);
  SimConfig c = config(3, 10.0, 1e-3, 1);
  c.x0 = SimplexPoint(vec({0.5, 0.3, 0.2}));
  const Trajectory s = simulate(g, c);
  const Trajectory d = simulate_deterministic(g, c.x0, 10.0, 1e-3);
  REQUIRE(s.size() == d.size());
  double sup = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) sup = std::max(sup, (s.state(k) - d.state(k)).cwiseAbs().maxCoeff());
  CHECK(sup < 1e-2);
}

TEST_CASE("deterministic integrator") {
  // rest point of A itself
  const Game r = rsp(1, 2);
  const Trajectory rest = simulate_deterministic(r, SimplexPoint::barycenter(3), 100.0, 1e-2);
  for (std::size_t k = 0; k < rest.size(); ++k)
    CHECK((rest.state(k) - constant(3, 1.0 / 3)).cwiseAbs().maxCoeff() <= 1e-9);

  // coexistence: monotone approach to (½, ½)
  const Trajectory m = simulate_deterministic(matching(), SimplexPoint(vec({0.9, 0.1})), 20.0, 1e-2);
  double prev = 1.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double gap = std::abs(m.state(k)(0) - 0.5);
    CHECK(gap <= prev + 1e-15);
    prev = gap;
  }
  CHECK(prev < 1e-4);

  // dominance: start next to the losing vertex, end at the winning one; the
  // run with half the step agrees to 1e-8
  const Game dom(mat({{1, 1}, {0, 0}}), constant(2, 0.5));
  const SimplexPoint x0(vec({0.01, 0.99}));
  const Trajectory a = simulate_deterministic(dom, x0, 20.0, 1e-2);
  const Trajectory b = simulate_deterministic(dom, x0, 20.0, 5e-3);
  CHECK(a.state(a.size() - 1)(0) > 1.0 - 1e-5);
  CHECK((a.state(a.size() - 1) - b.state(b.size() - 1)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((a.state(500) - b.state(1000)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("halving the step moves the time average by less than its standard error") {
  const Game g = matching();
  std::vector<double> coarse, fine;
  for (std::uint64_t s = 0; s < 64; ++s) {
    coarse.push_back(time_average(simulate(g, config(2, 100.0, 1e-3, s, 10)), 1.0).coords()(0));
    fine.push_back(time_average(simulate(g, config(2, 100.0, 5e-4, s + 1000, 20)), 1.0).coords()(0));
  }
  const auto a = mean_se(coarse);
  const auto b = mean_se(fine);
  const double se = std::sqrt(a.se * a.se + b.se * b.se);
  CHECK(std::abs(a.mean - b.mean) < se);
}

TEST_CASE("with zero payoffs log-ratios follow the exact Gaussian law") {
  const Game g(Matrix::Zero(3, 3), vec({0.4, 1.0, 1.7}));
  const double t = 1.0;
  const int runs = 10000;
  std::vector<double> d01, d12;
  d01.reserve(runs);
  d12.reserve(runs);
  for (int r = 0; r < runs; ++r) {
    const Trajectory tr = simulate(g, config(3, t, 1e-2, static_cast<std::uint64_t>(r) + 77, 100));
    const auto l0 = tr.log_pop(0);
    const auto l1 = tr.log_pop(tr.size() - 1);
    d01.push_back((l1(0) - l1(1)) - (l0(0) - l0(1)));
    d12.push_back((l1(1) - l1(2)) - (l0(1) - l0(2)));
  }
  const Vector s = g.sigma();
  auto check_pair = [&](const std::vector<double>& d, Eigen::Index i, Eigen::Index j) {
    const double mean = -(s(i) * s(i) - s(j) * s(j)) * t / 2;
    const double var = (s(i) * s(i) + s(j) * s(j)) * t;
    const auto m = mean_se(d);
    CHECK(std::abs(m.mean - mean) < 3.0 * m.se);
    double ss = 0.0;
    for (const double x : d) ss += (x - m.mean) * (x - m.mean);
    const double v = ss / (runs - 1);
    CHECK(std::abs(v - var) < 3.0 * var * std::sqrt(2.0 / (runs - 1)));
  };
  check_pair(d01, 0, 1);
  check_pair(d12, 1, 2);
}

TEST_CASE("batch runs are independent of scheduling") {
  const Game g = rsp(1, 2);
  const SimConfig c = config(3, 20.0, 1e-3, 0, 5);
  const auto one = batch_simulate(g, c, 6, 123, -1.0, 1);
  const auto many = batch_simulate(g, c, 6, 123, -1.0, 4);
  REQUIRE(one.size() == 6);
  for (std::size_t r = 0; r < 6; ++r) {
    CHECK(one[r].run_index == r);
    CHECK(one[r].seed == rng::derive_seed(123, r));
    CHECK(one[r].final_state == many[r].final_state);
    CHECK(one[r].time_average == many[r].time_average);
    CHECK(one[r].cooccurrence.p == many[r].cooccurrence.p);
  }

  SimConfig single = c;
  single.seed = rng::derive_seed(123, 0);
  const Trajectory tr = simulate(g, single);
  CHECK(one[0].final_state == Vector(tr.state(tr.size() - 1)));
  CHECK(one[0].min_coordinate == Catch::Approx(tr.state(tr.size() - 1).minCoeff()).epsilon(1e-12));
  CHECK_THROWS_AS(batch_simulate(g, c, 0, 1), std::invalid_argument);
}

TEST_CASE("transient rock-scissors-paper runs reach the boundary") {
  const Game g = rsp(2, 1);
  const auto runs = batch_simulate(g, config(3, 5000.0, 1e-3, 0, 1000), 20, 7);
  int hits = 0;
  for (const auto& r : runs) hits += r.min_coordinate < 1e-6 ? 1 : 0;
  CHECK(hits >= 18);
}
