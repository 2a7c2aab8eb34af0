#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pcm/evaluate.hpp"

namespace pcm {

// Values M_0..M_k of the regressor g under the distribution p. M_0 is the
// total mass of p: exactly 1 for an unconfigured PC, the evidence marginal
// for a configured one.
struct MomentVector {
  std::vector<double> values;

  int order() const { return static_cast<int>(values.size()) - 1; }
  double operator[](int k) const { return values[static_cast<std::size_t>(k)]; }
};

// Exact binomial coefficient as a double; n <= 60 (all representable in 64
// bits). Larger orders are rejected before any table lookup happens.
inline constexpr int kMaxMomentOrder = 60;
double binomial(int n, int k);

// Memo tables for one top-level query over a circuit pair, keyed by
// (PC node, RC node). Entries are written once; with memoization the number
// of distinct keys is bounded by the product of the two edge counts, which
// is what makes the traversal polynomial.
class PairCache {
 public:
  struct Stats {
    std::size_t lookups = 0;   // recursive pairwise requests, hits included
    std::size_t computed = 0;  // entries actually evaluated
    std::size_t hits() const { return lookups - computed; }
  };

  const Stats& prob_stats() const { return prob_stats_; }
  const Stats& exp_stats() const { return exp_stats_; }
  const Stats& moment_stats() const { return moment_stats_; }

  std::size_t prob_entries() const { return prob_table_.size(); }
  std::size_t exp_entries() const { return exp_table_.size(); }
  std::size_t moment_entries() const { return moment_table_.size(); }

  // All pairwise lookups across tables; the unit of the complexity contract.
  std::size_t total_lookups() const {
    return prob_stats_.lookups + exp_stats_.lookups + moment_stats_.lookups;
  }

  void clear();

 private:
  friend class PairTraversal;

  static std::uint64_t key(NodeId n, NodeId m) {
    return (static_cast<std::uint64_t>(n) << 32) | m;
  }

  std::unordered_map<std::uint64_t, double> prob_table_;        // Pr(n, m)
  std::unordered_map<std::uint64_t, double> exp_table_;         // first-order recursion
  std::unordered_map<std::uint64_t, MomentVector> moment_table_;  // joint orders 0..k
  Stats prob_stats_, exp_stats_, moment_stats_;
};

// Probability under p_n that the formula of RC node m is satisfied,
// M_1(1_m, p_n). Node-level entry point; both circuits must be alternating,
// share a vtree, and the two nodes must sit on the same vtree node.
double formula_prob(const Circuit& pc, const Circuit& rc, NodeId pc_node, NodeId rc_node,
                    PairCache& cache);
double formula_prob(const ConfiguredPC& pc, const Circuit& rc, NodeId pc_node, NodeId rc_node,
                    PairCache& cache);

// Exact expectation bias*M_0 + M_1(g, p) via the first-order pairwise
// recursion (OR pairs distribute over children, AND pairs cross-multiply
// with formula probabilities).
double ec2_expectation(const Circuit& pc, const Circuit& rc, PairCache& cache);
double ec2_expectation(const ConfiguredPC& pc, const Circuit& rc, PairCache& cache);

// Exact moments M_0..M_k computed jointly per node pair; order-0 entries
// collapse to formula_prob. The root bias is folded in by a binomial shift.
MomentVector mc2_moments(const Circuit& pc, const Circuit& rc, int k, PairCache& cache);
MomentVector mc2_moments(const ConfiguredPC& pc, const Circuit& rc, int k, PairCache& cache);

// M_j(g - alpha) from raw moments by exact binomial recombination.
MomentVector shifted_moments(const MomentVector& moments, double alpha);

// Moments of g under p(.|evidence): configured moments divided by the
// evidence probability. Throws QueryError when that probability is below
// 1e-12. Owns a private cache.
MomentVector conditional_moments(const Circuit& pc, const Circuit& rc, const Evidence& evidence,
                                 int k);

struct DistributionStats {
  double mean = 0.0;
  double variance = 0.0;
  double stddev = 0.0;
};

DistributionStats distribution_stats(const Circuit& pc, const Circuit& rc,
                                     const std::optional<Evidence>& evidence = std::nullopt);

}  // namespace pcm
