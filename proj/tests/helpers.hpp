#pragma once

#include <functional>
#include <string>
#include <vector>

#include "popup/branching.hpp"
#include "popup/errors.hpp"
#include "popup/slice_optimizer.hpp"
#include "popup/target_surfaces.hpp"

namespace popup::testing {

inline SliceDesign design_from(const std::vector<double>& lx, const std::vector<double>& lz, double length,
                               double width, int slice) {
  SliceDesign d;
  d.slice = slice;
  d.length = length;
  d.width = width;
  for (std::size_t i = 0; i < lx.size(); ++i) d.cells.push_back({lx[i], lz[i], width, 0.0});
  return d;
}

inline std::vector<SliceDesign> cylinder_designs(int n, int slices, double width, double radius) {
  return optimize_slices(slice(TargetSurface::cylinder(radius), SliceSpec::uniform(n, slices, width)), n);
}

inline ErrorKind error_kind(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace popup::testing
