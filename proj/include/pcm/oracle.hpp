#pragma once

#include <vector>

#include "pcm/evaluate.hpp"

namespace pcm {

// Exhaustive-enumeration ground truth for the fast pairwise algorithms.
// Everything here walks all 2^n complete assignments (n <= 20) and never
// touches the pairwise traversal, so it stays an independent check of it.
namespace oracle {

// sum_x p(x) * g(x)^k with compensated accumulation. Optional evidence
// restricts the sum to consistent completions (unnormalized joint).
double enum_moment(const Circuit& pc, const Circuit& rc, int k,
                   const Evidence& evidence = Evidence{});

// sum_x p(x) * sigma(bias + g(x)).
double enum_sigmoid_expectation(const Circuit& pc, const Circuit& rc,
                                const Evidence& evidence = Evidence{});

// Full argmax tie-set over completions of the evidence (ties within relative
// 1e-12 of the maximum), with the shared maximum probability.
struct MpeTieSet {
  std::vector<Assignment> completions;
  double probability = 0.0;
};

MpeTieSet enum_mpe(const Circuit& pc, const Evidence& evidence = Evidence{});

}  // namespace oracle
}  // namespace pcm
