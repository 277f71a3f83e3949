#pragma once

#include "wsob/linalg.hpp"

#include <string>

inline std::string manifold_path(const std::string& name) { return std::string(WSOB_MANIFOLD_DIR) + "/" + name; }

inline wsob::Vec vec(std::initializer_list<double> v) {
  wsob::Vec x(static_cast<int>(v.size()));
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}
