#pragma once

#include <string>

#include "qdim/ifs_model.hpp"
#include "qdim/potentials.hpp"

namespace fixtures {

inline qdim::IfsSystem cantor() {
  return qdim::similarity_system({0.0, 1.0}, {{1.0 / 3.0, 0.0, 1}, {1.0 / 3.0, 2.0 / 3.0, 1}});
}

inline qdim::PotentialFamily e1_weights() { return qdim::PotentialFamily::weights({0.5, 0.5}); }
inline qdim::PotentialFamily e2_weights() { return qdim::PotentialFamily::weights({0.7, 0.3}); }

inline qdim::IfsSystem e3() { return qdim::geometric_system(1.0 / 3.0); }
inline qdim::PotentialFamily e3_weights() { return qdim::PotentialFamily::geometric_weights(0.5); }

inline std::string data_file(const std::string& name) {
  return std::string(QDIM_DATA_DIR) + "/" + name;
}

}  // namespace fixtures
