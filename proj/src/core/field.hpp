#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grid.hpp"

namespace levyfield {

enum class ComponentTag { Gaussian, Jump, Drift, Combined };

const char* tag_name(ComponentTag tag);
ComponentTag parse_tag(const std::string& name);

struct FieldSample {
  GridSpec grid;
  std::vector<double> values;
  ComponentTag tag = ComponentTag::Combined;
  std::uint64_t seed = 0;
  std::string triple_fingerprint;
};

}  // namespace levyfield
