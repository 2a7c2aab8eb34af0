#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "pcm/errors.hpp"
#include "pcm/oracle.hpp"

using namespace pcm;
using testfix::bits;

TEST_CASE("enumerated moments of the golden pair") {
  auto toy = testfix::load_toy();
  // hand sum over the four support points:
  // .12*(-6.9) + .08*5 + .4*6.8 + .4*7.9 = 5.452
  CHECK(oracle::enum_moment(toy.pc, toy.rc, 1) == doctest::Approx(5.452).epsilon(1e-12));
  CHECK(oracle::enum_moment(toy.pc, toy.rc, 0) == doctest::Approx(1.0).epsilon(1e-12));

  Evidence x1;
  x1.set(1, true);
  CHECK(oracle::enum_moment(toy.pc, toy.rc, 0, x1) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("enumerated sigmoid expectations") {
  std::mt19937_64 rng(81);
  auto vt = testgen::random_vtree(rng, 5);
  Circuit rc = testgen::random_rc(vt, rng);
  Assignment x = Assignment::from_mask(19, 5);
  Circuit point = testgen::point_mass_pc(vt, x);
  CHECK(oracle::enum_sigmoid_expectation(point, rc) ==
        doctest::Approx(sigmoid(evaluate_rc(rc, x))).epsilon(1e-12));

  // uniform distribution with an antisymmetric regressor averages to one half
  LinearModel lm;
  lm.bias = 0.0;
  lm.weights = {3.0, -1.25};
  auto vt2 = Vtree::right_linear({1, 2});
  Circuit uniform = factorized_to_pc({0.5, 0.5}, vt2);
  LinearModel centered = lm;
  centered.bias = -(lm.weights[0] + lm.weights[1]) / 2.0;  // g(x) = -g(flip x)
  Circuit rc2 = linear_to_rc(centered, vt2);
  CHECK(oracle::enum_sigmoid_expectation(uniform, rc2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("enumerated MPE tie-sets") {
  auto toy = testfix::load_toy();
  auto open = oracle::enum_mpe(toy.pc);
  CHECK(open.probability == doctest::Approx(0.4).epsilon(1e-12));
  REQUIRE(open.completions.size() == 2);
  CHECK(open.completions[0] == bits({0, 1, 0}));  // enumeration order
  CHECK(open.completions[1] == bits({0, 1, 1}));

  Evidence x1;
  x1.set(1, true);
  auto with_ev = oracle::enum_mpe(toy.pc, x1);
  REQUIRE(with_ev.completions.size() == 1);
  CHECK(with_ev.completions[0] == bits({1, 1, 1}));

  Evidence full;
  full.set(1, true);
  full.set(2, false);
  full.set(3, false);
  auto fixed = oracle::enum_mpe(toy.pc, full);
  REQUIRE(fixed.completions.size() == 1);
  CHECK(fixed.completions[0] == bits({1, 0, 0}));
  CHECK(fixed.probability == doctest::Approx(0.08).epsilon(1e-12));
}

TEST_CASE("the oracle refuses more than 20 variables") {
  std::mt19937_64 rng(82);
  auto vt = testgen::random_vtree(rng, 21);
  Circuit pc = testgen::random_pc(vt, rng);
  Circuit rc = testgen::random_rc(vt, rng);
  CHECK_THROWS_WITH_AS(oracle::enum_moment(pc, rc, 1), doctest::Contains("20"), QueryError);
}

TEST_CASE("enumeration is linear in the RC weights") {
  std::mt19937_64 rng(83);
  auto vt = testgen::random_vtree(rng, 5);
  Circuit pc = testgen::random_pc(vt, rng);
  Circuit rc = testgen::random_rc(vt, rng, {.bias_prob = 0.0});
  Circuit doubled = testgen::scale_weights(rc, 2.0);
  CHECK(oracle::enum_moment(pc, doubled, 1) ==
        doctest::Approx(2.0 * oracle::enum_moment(pc, rc, 1)).epsilon(1e-12));
}
