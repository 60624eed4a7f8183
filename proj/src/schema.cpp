#include "phase/schema.hpp"

namespace phase {

int feature_index(std::string_view name) {
  for (std::size_t f = 0; f < kFeatureCount; ++f)
    if (kFeatureNames[f] == name) return static_cast<int>(f);
  return -1;
}

}  // namespace phase
