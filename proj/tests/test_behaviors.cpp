#include "shadowcert/behaviors.hpp"
#include "shadowcert/qkernel.hpp"
#include "shadowcert/random.hpp"

#include <doctest.h>

#include <numbers>

using namespace shadowcert;

namespace {

const std::vector<int> kBin{2, 2};

// sup over indicator kernels h in {0,1}^cells of sum_t pi(t) sum_x h (P - Q).
double brute_force_tv(const Behavior& p, const Behavior& q) {
  const auto rows = static_cast<Eigen::Index>(p.joint_inputs());
  const auto cols = static_cast<Eigen::Index>(p.joint_outputs());
  const int cells = static_cast<int>(rows * cols);
  double best = 0.0;
  for (long mask = 0; mask < (1L << cells); ++mask) {
    double v = 0.0;
    for (int c = 0; c < cells; ++c)
      if (mask >> c & 1) v += (p.table()(c / cols, c % cols) - q.table()(c / cols, c % cols)) / static_cast<double>(rows);
    best = std::max(best, v);
  }
  return best;
}

Behavior uniform_behavior() { return Behavior(kBin, kBin, Eigen::MatrixXd::Constant(4, 4, 0.25)); }

LhvModel single_seed(std::vector<int> f1, std::vector<int> f2) {
  LhvModel m;
  m.weights = Eigen::VectorXd::Ones(1);
  m.responses = {{deterministic_response(f1, 2)}, {deterministic_response(f2, 2)}};
  return m;
}

Behavior p13_relabelled(const Behavior& ext) {
  return relabel_13_to_12(marginal(ext, std::vector<int>{0, 2}), 2, 2);
}

}  // namespace

TEST_SUITE("behaviors") {

TEST_CASE("mixed radix round trip") {
  const std::vector<int> radices{3, 2, 4};
  CHECK(radix_product(radices) == 24);
  for (std::size_t i = 0; i < 24; ++i) CHECK(encode_mixed_radix(decode_mixed_radix(i, radices), radices) == i);
  // big-endian: first party is the most significant digit
  CHECK(decode_mixed_radix(8, radices) == std::vector<int>{1, 0, 0});
}

TEST_CASE("behavior validation") {
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(4, 4, 0.25);
  t(0, 0) = 0.3;
  CHECK_THROWS_AS(Behavior(kBin, kBin, t), InvariantError);
  CHECK_THROWS_AS(Behavior(kBin, kBin, Eigen::MatrixXd::Constant(3, 4, 0.25)), DimensionError);
  t(0, 0) = -0.25;
  t(0, 1) = 0.75;
  CHECK_THROWS_AS(Behavior(kBin, kBin, t), InvariantError);
}

TEST_CASE("marginals") {
  // product of two single-party behaviors
  Eigen::MatrixXd pa(2, 2), pb(2, 2);
  pa << 0.3, 0.7, 0.9, 0.1;
  pb << 0.5, 0.5, 0.2, 0.8;
  Eigen::MatrixXd t(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) t(2 * a + b, 2 * x + y) = pa(a, x) * pb(b, y);
  const Behavior p(kBin, kBin, t);
  CHECK((marginal(p, std::vector<int>{0}).table() - pa).norm() < 1e-15);
  CHECK((marginal(p, std::vector<int>{1}).table() - pb).norm() < 1e-15);
}

TEST_CASE("no-signalling check") {
  auto gen = make_engine(1);
  for (int i = 0; i < 20; ++i) {
    CHECK(check_no_signalling(lhv_behavior(random_lhv_model(gen, 2 + i % 2))).max_residual < 1e-12);
    CHECK(check_no_signalling(born_behavior(random_projective_strategy(gen, 3, i % 2 == 0))).max_residual < 1e-12);
  }
  // party 1's output copies party 2's input
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 4);
  t(0, 0) = t(1, 2) = t(2, 0) = t(3, 2) = 1.0;
  const Behavior sig(kBin, kBin, t);
  const auto rep = check_no_signalling(sig);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual == doctest::Approx(1.0));
  CHECK_THROWS_AS(marginal(sig, std::vector<int>{0}), SignallingError);
}

TEST_CASE("tripartite quantum marginals are well defined") {
  auto gen = make_engine(2);
  const Behavior p = born_behavior(random_projective_strategy(gen, 3, true));
  for (const auto& s : {std::vector<int>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}})
    CHECK_NOTHROW(marginal(p, s, 1e-12));
}

TEST_CASE("relabel keeps the table") {
  auto gen = make_engine(4);
  const Behavior p = random_no_signalling_behavior(gen);
  const Behavior q = relabel_13_to_12(p, 2, 2);
  CHECK(q.table() == p.table());
  CHECK_THROWS_AS(relabel_13_to_12(p, 3, 2), DimensionError);
}

TEST_CASE("tv distance") {
  const Behavior u = uniform_behavior();
  CHECK(tv_distance(u, u) == 0.0);
  const Behavior d0 = deterministic_behavior(kBin, kBin, {{0, 0}, {0, 0}});
  const Behavior d1 = deterministic_behavior(kBin, kBin, {{1, 1}, {1, 1}});
  CHECK(tv_distance(d0, d1) == doctest::Approx(1.0));
  auto gen = make_engine(9);
  for (int i = 0; i < 10; ++i) {
    const Behavior p = random_no_signalling_behavior(gen);
    const Behavior q = lhv_behavior(random_lhv_model(gen));
    CHECK(std::abs(tv_distance(p, q) - brute_force_tv(p, q)) < 1e-12);
  }
}

TEST_CASE("tv distance is a metric") {
  auto gen = make_engine(10);
  for (int i = 0; i < 50; ++i) {
    const Behavior p = random_no_signalling_behavior(gen);
    const Behavior q = random_no_signalling_behavior(gen);
    const Behavior r = lhv_behavior(random_lhv_model(gen));
    CHECK(std::abs(tv_distance(p, q) - tv_distance(q, p)) < 1e-12);
    CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12);
    CHECK(tv_distance(p, p) < 1e-12);
    CHECK(tv_distance(p, q) > 0.0);
  }
}

TEST_CASE("game scores") {
  const GameKernel k = chsh_kernel();
  const double c2 = std::pow(std::cos(std::numbers::pi / 8), 2);
  CHECK(game_score(born_behavior(bell_strategy()), k) == doctest::Approx(c2).epsilon(1e-14));
  CHECK(game_score(deterministic_behavior(kBin, kBin, {{0, 0}, {0, 0}}), k) == doctest::Approx(0.75));
  CHECK(game_score(uniform_behavior(), k) == doctest::Approx(0.5));
  // no deterministic strategy beats 3/4
  double best = 0.0;
  for (const auto& f : deterministic_functions(2, 2))
    for (const auto& g : deterministic_functions(2, 2)) best = std::max(best, game_score(deterministic_behavior(kBin, kBin, {f, g}), k));
  CHECK(best == doctest::Approx(0.75));
}

TEST_CASE("game scores lie in the unit interval") {
  auto gen = make_engine(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    Eigen::MatrixXd h(4, 4);
    for (Eigen::Index c = 0; c < 16; ++c) h.data()[c] = u(gen);
    const GameKernel k(kBin, kBin, h, random_simplex(gen, 4));
    const double s = game_score(random_no_signalling_behavior(gen), k);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("lhv behaviors") {
  const LhvModel m = single_seed({0, 1}, {1, 1});
  CHECK(lhv_behavior(m).table() == deterministic_behavior(kBin, kBin, {{0, 1}, {1, 1}}).table());
  // equal mixture of the anti-correlated seeds (0,1) and (1,0)
  LhvModel mix;
  mix.weights = Eigen::VectorXd::Constant(2, 0.5);
  mix.responses = {{deterministic_response(std::vector<int>{0, 0}, 2), deterministic_response(std::vector<int>{1, 1}, 2)},
                   {deterministic_response(std::vector<int>{1, 1}, 2), deterministic_response(std::vector<int>{0, 0}, 2)}};
  const Eigen::MatrixXd t = lhv_behavior(mix).table();
  for (Eigen::Index r = 0; r < 4; ++r) {
    CHECK(t(r, 1) == 0.5);
    CHECK(t(r, 2) == 0.5);
  }
  CHECK(game_score(lhv_behavior(single_seed({0, 0}, {0, 0})), chsh_kernel()) == doctest::Approx(0.75));
  LhvModel bad = m;
  bad.weights(0) = 0.9;
  CHECK_THROWS_AS(bad.validate(), InvariantError);
}

TEST_CASE("copied-seed extension") {
  auto gen = make_engine(13);
  const GameKernel k = chsh_kernel();
  for (int i = 0; i < 30; ++i) {
    const LhvModel m = random_lhv_model(gen, 2, 1 + i % 5, i % 3 == 0);
    const Behavior p12 = lhv_behavior(m);
    const Behavior ext = copied_seed_extension(m, m.responses[1]);
    CHECK((marginal(ext, std::vector<int>{0, 1}).table() - p12.table()).cwiseAbs().maxCoeff() < 1e-14);
    const Behavior p13 = p13_relabelled(ext);
    CHECK((p13.table() - p12.table()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(game_score(p13, k) - game_score(p12, k)) < 1e-14);
    // arbitrary relabelled kernel
    Eigen::MatrixXd h = (Eigen::MatrixXd::Random(4, 4).array() + 1.0) / 2.0;
    const GameKernel g(kBin, kBin, h);
    CHECK(std::abs(game_score(p13, g) - game_score(p12, g)) < 1e-14);
  }
  // uniform colluder wins CHSH half the time
  const LhvModel m = random_lhv_model(gen);
  ResponseTable uniform(static_cast<std::size_t>(m.hidden_values()), Eigen::MatrixXd::Constant(2, 2, 0.5));
  CHECK(game_score(p13_relabelled(copied_seed_extension(m, uniform)), k) == doctest::Approx(0.5));
  // two colluders
  const Behavior ext2 = copied_seed_extension(m, std::vector<ResponseTable>{m.responses[1], m.responses[0]});
  CHECK(ext2.parties() == 4);
  CHECK((marginal(ext2, std::vector<int>{0, 1}).table() - lhv_behavior(m).table()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("copied seed is exact on rational models") {
  LhvModel m;
  m.weights = Eigen::VectorXd::Constant(4, 0.25);
  auto gen = make_engine(14);
  const auto funcs = deterministic_functions(2, 2);
  std::uniform_int_distribution<int> pick(0, 3);
  m.responses.assign(2, {});
  for (auto& party : m.responses)
    for (int l = 0; l < 4; ++l) party.push_back(deterministic_response(funcs[static_cast<std::size_t>(pick(gen))], 2));
  const Behavior ext = copied_seed_extension(m, m.responses[1]);
  CHECK(marginal(ext, std::vector<int>{0, 1}).table() == lhv_behavior(m).table());
  CHECK(game_score(p13_relabelled(ext), chsh_kernel()) == game_score(lhv_behavior(m), chsh_kernel()));
}

}  // TEST_SUITE
