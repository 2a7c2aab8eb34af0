#pragma once

#include <string>
#include <string_view>

#include "pcm/compile.hpp"

namespace pcm {

// Text formats. Comment lines start with `c` and are allowed anywhere;
// encoding is UTF-8 with LF line endings.
//
// Vtree:    header `vtree <node-count>`, then `L <id> <var>` leaves and
//           `I <id> <left-id> <right-id>` internals; the last node line is
//           the root. Canonical output has dense ids with children before
//           parents, and parse(serialize(v)) is byte-identical on it.
//
// Circuit:  header `pc v1 <vtree-file>` or `rc v1 <vtree-file>`, then
//           `T <id> <vtree-id> <lit>` literal leaves (negative = negated),
//           `A <id> <vtree-id> <left> <right>`,
//           `O <id> <vtree-id> <k> (<child> <weight>) x k`,
//           optional `B <bias>` (rc only). The last gate is the root.
//           Weights render as shortest round-trip decimals, so every weight
//           survives parse -> serialize -> parse bit-exactly.

std::shared_ptr<const Vtree> parse_vtree(std::string_view text);
std::string serialize_vtree(const Vtree& vtree);

Circuit parse_circuit(std::string_view text, std::shared_ptr<const Vtree> vtree);
std::string serialize_circuit(const Circuit& circuit);

// `vtree_hint` overrides the stored header token (e.g. when writing next to
// a freshly written vtree file).
std::string serialize_circuit(const Circuit& circuit, const std::string& vtree_hint);

// CSV (comma separator, no quoting, header row required): strict 0/1 cells,
// except the designated target column (real) and class column (0/1, kept
// out of the feature block). Columns named in `drop` are ignored entirely.
DatasetTable load_dataset(std::string_view csv, const std::string& target_column = "",
                          const std::string& class_column = "",
                          const std::vector<std::string>& drop = {});

// Model parameter files: header `nb-model v1` / `linear-model v1`, then one
// whitespace-separated record per line (`prior p`, `<feature> <theta|c>
// <theta|!c>` for naive Bayes; `bias b`, `<feature> <weight>` for linear).
NaiveBayesModel parse_nb_model(std::string_view text);
std::string serialize_nb_model(const NaiveBayesModel& model);
LinearModel parse_linear_model(std::string_view text);
std::string serialize_linear_model(const LinearModel& model);

// File helpers; throw ParseError with the path on IO failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Loads a circuit resolving the header's vtree path relative to the circuit
// file's directory (or uses `vtree` when already loaded).
Circuit load_circuit_file(const std::string& path,
                          std::shared_ptr<const Vtree> vtree = nullptr);

}  // namespace pcm
