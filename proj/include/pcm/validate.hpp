#pragma once

#include <string>
#include <vector>

#include "pcm/circuit.hpp"

namespace pcm {

struct ValidationWitness {
  std::vector<NodeId> nodes;
  std::string explanation;
};

struct ValidationReport {
  std::string property;
  bool ok = true;
  std::vector<ValidationWitness> witnesses;
  std::string note;  // e.g. "sampled" when a check could not be exhaustive

  void flag(std::vector<NodeId> nodes, std::string explanation) {
    ok = false;
    witnesses.push_back({std::move(nodes), std::move(explanation)});
  }
};

// One line per witness, prefixed by the property name.
std::string to_text(const ValidationReport& report);

// Every AND gate's left/right scopes are disjoint and contained in the
// left/right branch of its vtree node; node-to-vtree mapping is consistent.
ValidationReport check_structured_decomposability(const Circuit& circuit, const Vtree& vtree);

// All children of every OR gate share one scope.
ValidationReport check_smoothness(const Circuit& circuit);

// No complete assignment satisfies two children of an OR gate. Exhaustive
// per gate up to 20 scope variables, sampled (10,000 assignments) beyond.
ValidationReport check_determinism(const Circuit& circuit);

// Generative parameters: every theta >= 0 and each OR gate sums to 1 within
// 1e-9 (double round-trip through text formats).
ValidationReport check_pc_parameters(const Circuit& circuit);

// Both circuits reference structurally identical vtrees.
ValidationReport check_vtree_compatibility(const Circuit& pc, const Circuit& rc);

// All checks applicable to the circuit's role.
std::vector<ValidationReport> validate_circuit(const Circuit& circuit);

inline bool all_ok(const std::vector<ValidationReport>& reports) {
  for (const auto& r : reports)
    if (!r.ok) return false;
  return true;
}

}  // namespace pcm
