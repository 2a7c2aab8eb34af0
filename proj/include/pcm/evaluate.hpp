#pragma once

#include <optional>

#include "pcm/circuit.hpp"

namespace pcm {

// PC with observed leaves masked out; encodes the unnormalized joint
// p(x^m, x^o). Shares the base circuit immutably and owns only its mask.
struct ConfiguredPC {
  const Circuit* base = nullptr;
  std::vector<double> leaf_mask;  // indexed by node id; 0 iff the literal contradicts evidence
  Evidence evidence;
};

struct MpeResult {
  Assignment completion;
  double probability = 0.0;
  bool approximate = false;  // true when the PC is not (output-)deterministic
};

// Eq.-style bottom-up density evaluation on a complete assignment.
double evaluate_pc(const Circuit& pc, const Assignment& x);

// Probability of the evidence; single bottom-up pass with unobserved leaves
// contributing 1.
double marginal(const Circuit& pc, const Evidence& evidence);
double marginal(const ConfiguredPC& pc);

ConfiguredPC configure(const Circuit& pc, const Evidence& evidence);

// Evaluate the configured circuit on a complete assignment: yields the
// unnormalized joint when x agrees with the evidence, 0 otherwise.
double evaluate_configured(const ConfiguredPC& pc, const Assignment& x);

// Semantic determinism of a PC in the sense relevant to MPE exactness: on no
// complete input do two children of an OR gate evaluate to a nonzero value.
// Exhaustive up to 20 variables, sampled (10,000 inputs) beyond.
bool is_output_deterministic(const Circuit& pc);

// Max-product upper-bound decoding with deterministic tie-breaking (earliest
// child in serialized order). Exact when the PC is deterministic; flagged
// approximate otherwise. Throws QueryError on evidence of probability zero.
MpeResult mpe(const Circuit& pc, const Evidence& evidence,
              std::optional<bool> deterministic_hint = std::nullopt);

// Regression-circuit output bias + g(x). Asserts at runtime that every OR
// gate has at most one satisfied child; throws QueryError naming the gate.
double evaluate_rc(const Circuit& rc, const Assignment& x);

double sigmoid(double x);

// Classifier output sigma(bias + g(x)).
double predict_lc(const Circuit& rc, const Assignment& x);

}  // namespace pcm
