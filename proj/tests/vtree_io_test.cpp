#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "pcm/errors.hpp"
#include "pcm/evaluate.hpp"

using namespace pcm;
using testfix::bits;
using testfix::data_path;

TEST_CASE("vtree file parses into the expected shape") {
  auto vt = parse_vtree("vtree 5\nL 0 1\nL 1 2\nL 2 3\nI 3 1 2\nI 4 0 3\n");
  CHECK(vt->var_count() == 3);
  CHECK(vt->root() == 4);
  CHECK(vt->node(vt->root()).leaf == false);
  CHECK(vt->node(vt->node(vt->root()).left).var == 1);
  CHECK(vt->scope(3).count() == 2);
  CHECK(vt->scope(vt->root()).count() == 3);
}

TEST_CASE("single-leaf vtree file") {
  auto vt = parse_vtree("c a comment\nvtree 1\nL 0 1\n");
  CHECK(vt->var_count() == 1);
  CHECK(vt->node(vt->root()).leaf);
  CHECK(vt->node(vt->root()).var == 1);
}

TEST_CASE("sparse variable numbering is rejected") {
  CHECK_THROWS_WITH_AS(parse_vtree("vtree 1\nL 0 7\n"), doctest::Contains("densely"), ParseError);
  CHECK_THROWS_AS(parse_vtree("vtree 3\nL 0 1\nL 1 5\nI 2 0 1\n"), ParseError);
}

TEST_CASE("vtree parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_vtree("vtree 3\nL 0 1\nL 1 2\nI 2 1 1\n"), ParseError);
  CHECK_THROWS_WITH_AS(parse_vtree("vtree 3\nL 0 1\nL 1 2\nI 2 1 1\n"),
                       doctest::Contains("child reused"), ParseError);
  CHECK_THROWS_AS(parse_vtree("vtree 2\nL 0 1\nL 0 2\n"), ParseError);   // duplicate id
  CHECK_THROWS_AS(parse_vtree("vtree 2\nL 0 1\nI 1 0 5\n"), ParseError); // dangling reference
  CHECK_THROWS_AS(parse_vtree("vtree 3\nL 0 1\nL 1 1\nI 2 0 1\n"), ParseError);  // dup variable
}

TEST_CASE("vtree round-trip is byte identical on canonical files") {
  std::string text = read_file(data_path("toy.vtree"));
  auto vt = parse_vtree(text);
  CHECK(serialize_vtree(*vt) == text);
}

TEST_CASE("circuit round-trip is byte identical on the golden files") {
  auto toy = testfix::load_toy();
  CHECK(serialize_circuit(toy.pc) == read_file(data_path("toy.pc")));
  CHECK(serialize_circuit(toy.rc) == read_file(data_path("toy.rc")));
}

TEST_CASE("weights survive parse -> serialize -> parse bit exactly") {
  auto vt = parse_vtree("vtree 1\nL 0 1\n");
  std::string text = "pc v1 v\nT 0 0 1\nT 1 0 -1\nO 2 0 2 0 0.1 1 0.9\n";
  Circuit c = parse_circuit(text, vt);
  std::string once = serialize_circuit(c);
  Circuit again = parse_circuit(once, vt);
  CHECK(again.node(2).weights[0] == c.node(2).weights[0]);
  CHECK(serialize_circuit(again) == once);

  // awkward values still round-trip through the shortest-decimal renderer
  for (double w : {1.0 / 3.0, 6.1, -5.3, 1e-17, 12345.678901234567}) {
    Circuit scaled = testgen::scale_weights(c, w);
    Circuit back = parse_circuit(serialize_circuit(scaled), vt);
    CHECK(back.node(2).weights[0] == scaled.node(2).weights[0]);
    CHECK(back.node(2).weights[1] == scaled.node(2).weights[1]);
  }
}

TEST_CASE("serialize -> parse keeps evaluations identical on random circuits") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 10; ++round) {
    auto vt = testgen::random_vtree(rng, 6);
    Circuit pc = testgen::random_pc(vt, rng);
    Circuit back = parse_circuit(serialize_circuit(pc), vt);
    for (std::uint64_t m = 0; m < 64; ++m) {
      Assignment x = Assignment::from_mask(m, 6);
      CHECK(evaluate_pc(pc, x) == evaluate_pc(back, x));
    }
  }
}

TEST_CASE("circuit parse errors") {
  auto vt = parse_vtree("vtree 1\nL 0 1\n");
  CHECK_THROWS_AS(parse_circuit("nope v1 x\n", vt), ParseError);
  CHECK_THROWS_AS(parse_circuit("pc v1 x\nT 0 9 1\n", vt), ParseError);      // unknown vtree id
  CHECK_THROWS_AS(parse_circuit("pc v1 x\nT 0 0 1\nB 0.5\n", vt), ParseError);  // bias in pc
  CHECK_THROWS_AS(parse_circuit("pc v1 x\nO 0 0 1 3 0.5\n", vt), ParseError);   // dangling child
  CHECK_THROWS_AS(parse_circuit("pc v1 x\nT 0 0 1\nT 0 0 -1\n", vt), ParseError);  // dup id
  CHECK_THROWS_AS(parse_circuit("pc v1 x\nT 0 0 1\nO 1 0 2 0 0.5\n", vt), ParseError);  // short OR
}

TEST_CASE("dataset loading is strict about cells") {
  DatasetTable t = load_dataset("a,b\nc a comment line\n0,1\n1,1\n");
  CHECK(t.row_count() == 2);
  CHECK(t.feature_count() == 2);
  CHECK(t.rows[1][0] == 1);

  CHECK_THROWS_WITH_AS(load_dataset("a,b\n0,2\n"), doctest::Contains("'b'"), ParseError);
  CHECK_THROWS_AS(load_dataset("a,b\n0\n"), ParseError);  // ragged row

  DatasetTable with_target = load_dataset("a,y\n1,3.75\n0,-2\n", "y");
  CHECK(with_target.feature_count() == 1);
  CHECK(with_target.targets[0] == doctest::Approx(3.75));

  // dropped columns are ignored entirely, non-binary cells included
  DatasetTable dropped = load_dataset("a,junk,y\n1,weird,0.5\n0,9.9,1\n", "y", "", {"junk"});
  CHECK(dropped.feature_count() == 1);
  CHECK(dropped.row_count() == 2);
  CHECK(dropped.targets[1] == doctest::Approx(1.0));
}

TEST_CASE("model parameter files round-trip") {
  NaiveBayesModel nb;
  nb.class_prior = 0.25;
  nb.theta_given_c = {0.5, 0.125};
  nb.theta_given_not_c = {0.75, 1.0};
  NaiveBayesModel nb2 = parse_nb_model(serialize_nb_model(nb));
  CHECK(nb2.class_prior == nb.class_prior);
  CHECK(nb2.theta_given_c == nb.theta_given_c);
  CHECK(nb2.theta_given_not_c == nb.theta_given_not_c);

  LinearModel lm;
  lm.bias = -1.5;
  lm.weights = {2.0, 0.1, -3.0};
  LinearModel lm2 = parse_linear_model(serialize_linear_model(lm));
  CHECK(lm2.bias == lm.bias);
  CHECK(lm2.weights == lm.weights);
}
