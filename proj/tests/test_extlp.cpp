#include "shadowcert/extlp.hpp"
#include "shadowcert/random.hpp"

#include <doctest.h>

using namespace shadowcert;

namespace {

const std::vector<int> kBin{2, 2};

// Relabelled (1,3) marginal of a tripartite behavior.
Behavior shadow_of(const Behavior& ext) { return relabel_13_to_12(marginal(ext, std::vector<int>{0, 2}), 2, 2); }

// For a deterministic P12 every classical extension is deterministic on
// parties 1 and 2, so the best collusive score comes from a deterministic
// party-3 rule.
double deterministic_v13(const std::vector<int>& f1, const GameKernel& k) {
  double best = 0.0;
  for (const auto& f3 : deterministic_functions(2, 2))
    best = std::max(best, game_score(deterministic_behavior(kBin, kBin, {f1, f3}), k));
  return best;
}

GameKernel random_kernel(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd h(4, 4);
  for (Eigen::Index c = 0; c < 16; ++c) h.data()[c] = u(gen) < 0.3 ? 0.0 : u(gen);
  return GameKernel(kBin, kBin, h);
}

void check_extension(const ExtensionResult& r, const Behavior& p12) {
  CHECK(r.lp.duality_gap < 1e-8);
  CHECK((marginal(r.extension, std::vector<int>{0, 1}, 1e-8).table() - p12.table()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(check_no_signalling(r.extension, 1e-8).pass);
}

}  // namespace

TEST_SUITE("extlp") {

TEST_CASE("polytope shapes") {
  auto gen = make_engine(31);
  const Behavior p = random_no_signalling_behavior(gen);
  const auto ns = build_extension_polytope({p, ExtensionClass::NoSignalling, {}});
  CHECK(ns.eq_matrix.cols() == 64);
  CHECK(ns.eq_matrix.rows() == 88);
  CHECK(ns.shadow_map.rows() == 16);
  const auto cl = build_extension_polytope({p, ExtensionClass::Classical, {}});
  CHECK(cl.eq_matrix.cols() == 64);
  CHECK(ns.inputs == std::vector<int>{2, 2, 2});
  CHECK(std::string(to_string(ExtensionClass::Classical)) == "classical");
  CHECK(std::string(to_string(ExtensionClass::NoSignalling)) == "no_signalling");
}

TEST_CASE("input validation") {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 4);
  t(0, 0) = t(1, 2) = t(2, 0) = t(3, 2) = 1.0;
  CHECK_THROWS_AS(build_extension_polytope({Behavior(kBin, kBin, t), ExtensionClass::NoSignalling, {}}), SignallingError);
  const std::vector<int> three{3, 2};
  CHECK_THROWS_AS(build_extension_polytope({Behavior(three, kBin, Eigen::MatrixXd::Constant(6, 4, 0.25)),
                                            ExtensionClass::NoSignalling, {}}),
                  DimensionError);
  auto gen = make_engine(3);
  const Behavior tri = born_behavior(random_projective_strategy(gen, 3, false));
  CHECK_THROWS_AS(build_extension_polytope({tri, ExtensionClass::NoSignalling, {}}), DimensionError);
}

TEST_CASE("PR box is monogamous") {
  for (int c = 0; c < 2; ++c) {
    const Behavior pr = pr_box(0, 0, c);
    const ExtensionProblem prob{pr, ExtensionClass::NoSignalling, {}};
    const auto d = shadow_tv_distance(prob);
    CHECK(d.value == doctest::Approx(0.5).epsilon(1e-9));
    check_extension(d, pr);
    CHECK(anticollusion_capacity(prob).value == doctest::Approx(0.5).epsilon(1e-9));
    const auto v = collusive_vulnerability(prob, chsh_kernel());
    CHECK(v.value == doctest::Approx(0.5).epsilon(1e-9));
    check_extension(v, pr);
    CHECK_THROWS_AS(shadow_tv_distance({pr, ExtensionClass::Classical, {}}), InfeasibleError);
  }
  CHECK(anti_collusion_power(pr_box(0, 0, 0), chsh_kernel(), chsh_kernel(), ExtensionClass::NoSignalling) ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("classical behaviors are freely shareable") {
  auto gen = make_engine(32);
  for (int i = 0; i < 15; ++i) {
    const Behavior p = lhv_behavior(random_lhv_model(gen));
    const ExtensionProblem prob{p, ExtensionClass::Classical, {}};
    CHECK(shadow_tv_distance(prob).value < 1e-9);
    CHECK(anticollusion_capacity(prob).value < 1e-9);
    const GameKernel k = random_kernel(gen);
    const auto v = collusive_vulnerability(prob, k);
    check_extension(v, p);
    CHECK(v.value >= game_score(p, k) - 1e-9);
    CHECK(anti_collusion_power(p, k, k, ExtensionClass::Classical) < 1e-9);
  }
  // product behaviors
  const Behavior prod = Behavior(kBin, kBin, Eigen::MatrixXd::Constant(4, 4, 0.25));
  CHECK(shadow_tv_distance({prod, ExtensionClass::NoSignalling, {}}).value < 1e-9);
}

TEST_CASE("best classical CHSH behavior") {
  const std::vector<int> f{0, 0};
  const Behavior p = deterministic_behavior(kBin, kBin, {f, f});
  const auto v = collusive_vulnerability({p, ExtensionClass::Classical, {}}, chsh_kernel());
  CHECK(v.value == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(v.value == doctest::Approx(deterministic_v13(f, chsh_kernel())).epsilon(1e-9));
  CHECK(anti_collusion_power(p, chsh_kernel(), chsh_kernel(), ExtensionClass::Classical) < 1e-9);
  auto gen = make_engine(33);
  for (int i = 0; i < 10; ++i) {
    const GameKernel k = random_kernel(gen);
    for (const auto& g1 : deterministic_functions(2, 2)) {
      const Behavior q = deterministic_behavior(kBin, kBin, {g1, f});
      CHECK(std::abs(collusive_vulnerability({q, ExtensionClass::Classical, {}}, k).value - deterministic_v13(g1, k)) < 1e-9);
    }
  }
}

TEST_CASE("class inclusion") {
  auto gen = make_engine(34);
  for (int i = 0; i < 15; ++i) {
    const Behavior p = lhv_behavior(random_lhv_model(gen));
    const GameKernel k = random_kernel(gen);
    const double vc = collusive_vulnerability({p, ExtensionClass::Classical, {}}, k).value;
    const double vns = collusive_vulnerability({p, ExtensionClass::NoSignalling, {}}, k).value;
    CHECK(vc <= vns + 1e-9);
  }
}

TEST_CASE("distance equals capacity on random no-signalling behaviors") {
  auto gen = make_engine(35);
  for (int i = 0; i < 25; ++i) {
    const Behavior p = random_no_signalling_behavior(gen);
    const ExtensionProblem prob{p, ExtensionClass::NoSignalling, {}};
    const auto d = shadow_tv_distance(prob);
    const auto c = anticollusion_capacity(prob);
    CHECK(std::abs(d.value - c.value) < 1e-6);
    check_extension(d, p);
    // the returned extension realises the distance
    CHECK(std::abs(tv_distance(p, shadow_of(d.extension)) - d.value) < 1e-8);
    CHECK(c.kernel.minCoeff() >= -1e-9);
    CHECK(c.kernel.maxCoeff() <= 1.0 + 1e-9);
    // any fixed kernel is a weaker witness
    const GameKernel k = random_kernel(gen);
    CHECK(anti_collusion_power(p, k, k, ExtensionClass::NoSignalling) <= c.value + 1e-9);
  }
}

TEST_CASE("non-uniform input weights") {
  auto gen = make_engine(36);
  for (int i = 0; i < 10; ++i) {
    const Behavior p = random_no_signalling_behavior(gen);
    const Eigen::VectorXd pi = random_simplex(gen, 4);
    const ExtensionProblem prob{p, ExtensionClass::NoSignalling, pi};
    const auto d = shadow_tv_distance(prob);
    CHECK(std::abs(d.value - anticollusion_capacity(prob).value) < 1e-6);
    CHECK(std::abs(tv_distance(p, shadow_of(d.extension), pi) - d.value) < 1e-8);
  }
}

TEST_CASE("single-input alphabets") {
  const std::vector<int> one{1, 1};
  Eigen::MatrixXd t(1, 4);
  t << 0.5, 0.0, 0.1, 0.4;
  const Behavior p(one, kBin, t);
  const ExtensionProblem prob{p, ExtensionClass::NoSignalling, {}};
  // copying x2 into x3 is a valid extension
  CHECK(shadow_tv_distance(prob).value < 1e-9);
  CHECK(anticollusion_capacity(prob).value < 1e-9);
  CHECK(shadow_tv_distance({p, ExtensionClass::Classical, {}}).value < 1e-9);
}

}  // TEST_SUITE
