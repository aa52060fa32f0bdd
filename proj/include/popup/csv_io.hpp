#pragma once

#include <span>
#include <string>
#include <vector>

#include "popup/assembly.hpp"
#include "popup/branching.hpp"

namespace popup {

/// Header `tag,x1,y1,z1,x2,y2,z2,length,slice,level`, 9 significant digits,
/// LF line endings, segments in network order.
std::string network_csv(const BranchNetwork& network);

/// Parses a network CSV. Slice widths and offsets are recovered from the
/// slice planes (s_0 = 0, plane at s_j + w_j / 2) and chain lengths from the
/// panel heights; bridge widths use `support_factor`.
BranchNetwork parse_network_csv(const std::string& text, double support_factor = 0.5);

/// Header `r,lambda,phi,K,H,valid`.
std::string curvature_grid_csv(const CurvatureMap& map);

/// Header `field,phi,r1,lambda1,r2,lambda2`, one zero-contour segment per row.
std::string contour_csv(const CurvatureMap& map);

/// Header `psi,K`, then `# sign_change,<psi>` lines.
std::string trace_csv(const CurvatureTrace& trace);

}  // namespace popup
