#include "pcm/oracle.hpp"

#include <cmath>

#include "pcm/errors.hpp"

namespace pcm {
namespace oracle {

namespace {

// Neumaier-compensated running sum; keeps oracle error well below the
// tolerances the algorithms are held to.
struct CompensatedSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      compensation += (sum - t) + v;
    else
      compensation += (v - t) + sum;
    sum = t;
  }

  double value() const { return sum + compensation; }
};

std::size_t checked_var_count(const Circuit& c) {
  std::size_t n = c.vtree().var_count();
  if (n > 20) throw QueryError("enumeration oracle capped at 20 variables");
  return n;
}

}  // namespace

double enum_moment(const Circuit& pc, const Circuit& rc, int k, const Evidence& evidence) {
  std::size_t n = checked_var_count(pc);
  CompensatedSum acc;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    Assignment x = Assignment::from_mask(mask, n);
    if (!evidence.consistent_with(x)) continue;
    double p = evaluate_pc(pc, x);
    if (p == 0.0) continue;
    double term = p;
    if (k > 0) {
      double g = evaluate_rc(rc, x);
      for (int i = 0; i < k; ++i) term *= g;
    }
    acc.add(term);
  }
  return acc.value();
}

double enum_sigmoid_expectation(const Circuit& pc, const Circuit& rc, const Evidence& evidence) {
  std::size_t n = checked_var_count(pc);
  CompensatedSum acc;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    Assignment x = Assignment::from_mask(mask, n);
    if (!evidence.consistent_with(x)) continue;
    double p = evaluate_pc(pc, x);
    if (p == 0.0) continue;
    acc.add(p * sigmoid(evaluate_rc(rc, x)));
  }
  return acc.value();
}

MpeTieSet enum_mpe(const Circuit& pc, const Evidence& evidence) {
  std::size_t n = checked_var_count(pc);
  MpeTieSet out;
  double best = -1.0;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    Assignment x = Assignment::from_mask(mask, n);
    if (!evidence.consistent_with(x)) continue;
    double p = evaluate_pc(pc, x);
    if (p > best) best = p;
  }
  if (best <= 0.0) throw QueryError("inconsistent evidence");
  out.probability = best;
  const double floor = best - 1e-12 * best;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    Assignment x = Assignment::from_mask(mask, n);
    if (!evidence.consistent_with(x)) continue;
    if (evaluate_pc(pc, x) >= floor) out.completions.push_back(x);
  }
  return out;
}

}  // namespace oracle
}  // namespace pcm
