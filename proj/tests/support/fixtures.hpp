#pragma once

#include <string>

#include "pcm/io.hpp"

// The 3-variable demo pair shipped under data/: a PC with support
// {(1,1,1): .12, (1,0,0): .08, (0,1,1): .4, (0,1,0): .4} and an RC whose
// outputs on those points are -6.9, 5.0, 6.8 and 7.9.
namespace pcm::testfix {

inline std::string data_path(const std::string& name) {
  return std::string(PCM_DATA_DIR) + "/" + name;
}

struct ToyPair {
  std::shared_ptr<const Vtree> vtree;
  Circuit pc;
  Circuit rc;
};

inline ToyPair load_toy() {
  auto vtree = parse_vtree(read_file(data_path("toy.vtree")));
  Circuit pc = parse_circuit(read_file(data_path("toy.pc")), vtree);
  Circuit rc = parse_circuit(read_file(data_path("toy.rc")), vtree);
  return {vtree, std::move(pc), std::move(rc)};
}

inline Assignment bits(std::initializer_list<int> values) {
  Assignment a(values.size());
  VarId v = 1;
  for (int x : values) a.set(v++, x != 0);
  return a;
}

}  // namespace pcm::testfix
