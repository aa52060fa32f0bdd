#pragma once

#include <string>
#include <vector>

#include "popup/branching.hpp"
#include "popup/types.hpp"

namespace popup {

enum class LineKind { Cut, Fold };

struct PatternLine {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  LineKind kind = LineKind::Cut;
  std::string group;  // "cuts", "folds", "support-strips"
  std::string id;     // provenance, e.g. "fold-s2-u3-c"
  int slice = -1;
  int unit = -1;
};

/// Material region (rectangle corners in order) of one strip or bridge.
struct PatternRegion {
  std::vector<Vec2> corners;
  std::string id;
};

/// Flat cut-fold layout in cm. Sheet x runs across slices, sheet y along
/// the unfolded strips.
struct CutFoldPattern {
  std::vector<PatternLine> lines;
  std::vector<PatternRegion> regions;
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();
  double scale_cm = 1.0;

  std::size_t count(LineKind kind) const;
  /// Sum of region areas (shoelace), cm^2.
  double area() const;
};

struct PatternOptions {
  double scale_cm = 1.0;   // cm per sheet unit
  bool microcuts = false;  // also emit explicit dash chains for folds
  double micro_cut = 0.2;  // cm
  double micro_gap = 0.1;  // cm
};

/// Unfolds the network into its sheet layout: two edge cuts per strip (shared
/// edges merged, gaps where bridges cross), a fold at every fold vertex and
/// staircase corner, and a fold along each separation or support bridge.
CutFoldPattern build_pattern(const BranchNetwork& network, const PatternOptions& options = {});

/// SVG document with one group per line class; coordinates in cm.
std::string emit_svg(const CutFoldPattern& pattern, const PatternOptions& options = {});

}  // namespace popup
