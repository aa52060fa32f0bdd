#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "popup/branching.hpp"

using namespace popup;
using popup::testing::cylinder_designs;
using popup::testing::design_from;
using popup::testing::error_kind;

namespace {

int count_tag(const BranchNetwork& n, SegmentTag t) {
  int c = 0;
  for (const auto& s : n.segments) c += s.tag == t ? 1 : 0;
  return c;
}

}  // namespace

TEST_CASE("two single-unit slices: hand-traced network") {
  const std::vector<SliceDesign> d{design_from({1}, {1}, 1.0, 1.0, 0), design_from({1}, {1}, 1.0, 1.0, 1)};
  const BranchNetwork net = build_network(d);
  // slice 0: x-panel (0,0.5,1)->(1,0.5,1), z-panel (1,0.5,1)->(1,0.5,0)
  // slice 1: the same at y = 1.5; one separation at the bottom level
  REQUIRE(net.segments.size() == 5);
  CHECK(count_tag(net, SegmentTag::XPanel) == 2);
  CHECK(count_tag(net, SegmentTag::ZPanel) == 2);
  CHECK(count_tag(net, SegmentTag::Separation) == 1);
  CHECK(count_tag(net, SegmentTag::SupportStrip) == 0);
  REQUIRE(net.branches.size() == 1);
  CHECK(net.branches[0].levels == 1);
  CHECK(net.branches[0].terminated_at == -1);
  const auto& x0 = net.segments[0];
  CHECK(x0.tag == SegmentTag::XPanel);
  CHECK((x0.start - Vec3(0, 0.5, 1)).norm() < 1e-15);
  CHECK((x0.end - Vec3(1, 0.5, 1)).norm() < 1e-15);
  for (const auto& s : net.segments) {
    if (s.tag != SegmentTag::Separation) continue;
    CHECK((s.start - Vec3(1, 0.5, 0)).norm() < 1e-15);
    CHECK((s.end - Vec3(1, 1.5, 0)).norm() < 1e-15);
    CHECK(s.length == doctest::Approx(1.0));
    CHECK(s.width == doctest::Approx(0.5));
  }
  CHECK(net.connected());
}

TEST_CASE("a backward step terminates the branch") {
  const double t = 1.0 / 3.0;
  const std::vector<SliceDesign> d{design_from({t, t, t}, {t, t, t}, 1.0, 1.0, 0),
                                   design_from({t, 0.5, 1 - t - 0.5}, {t, t, t}, 1.0, 1.0, 1)};
  const BranchNetwork net = build_network(d);
  REQUIRE(net.branches.size() == 1);
  CHECK(net.branches[0].terminated_at == 2);
  CHECK(net.branches[0].levels == 1);
  CHECK(count_tag(net, SegmentTag::Separation) == 1);
}

TEST_CASE("every branch dying at its first step is an empty network") {
  const std::vector<SliceDesign> d{design_from({0.7, 0.3}, {0.5, 0.5}, 1.0, 1.0, 0),
                                   design_from({0.5, 0.5}, {0.5, 0.5}, 1.0, 1.0, 1)};
  CHECK(error_kind([&] { build_network(d); }) == ErrorKind::EmptyNetwork);
}

TEST_CASE("branches start on the shorter chain of a pair") {
  const std::vector<SliceDesign> d{design_from({1.2}, {1.2}, 1.2, 1.0, 0), design_from({1}, {1}, 1.0, 1.0, 1)};
  const BranchNetwork net = build_network(d);
  CHECK(net.branches[0].first_slice == 1);
  CHECK(net.branches[0].second_slice == 0);
  CHECK(net.branches[0].levels == 1);
  CHECK(net.connected());
}

TEST_CASE("quarter cylinder, N = 3, ten slices") {
  const auto designs = cylinder_designs(3, 10, 1.0, 3.0);
  const BranchNetwork net = build_network(designs);
  CHECK(net.num_slices() == 10);
  CHECK(net.branches.size() == 5);
  CHECK(count_tag(net, SegmentTag::SupportStrip) == 4);
  CHECK(net.connected());
  const TopologyReport rep = validate_topology(net);
  CHECK(rep.connected);
  CHECK(rep.max_length_error < 1e-12);
  CHECK(rep.psi_checked.size() == 3);
  // Each pair is joined by its branch and neighbouring pairs by one support
  // strip, so the slice-level graph is a tree.
  CHECK(static_cast<int>(net.branches.size()) - 1 == count_tag(net, SegmentTag::SupportStrip));
  for (std::size_t k = 1; k < net.segments.size(); ++k) {
    const auto& a = net.segments[k - 1];
    const auto& b = net.segments[k];
    CHECK(std::pair(a.slice, a.level) <= std::pair(b.slice, b.level));
  }
}

TEST_CASE("topology validation rejects a reversed x-panel") {
  BranchNetwork net = build_network(cylinder_designs(3, 4, 1.0, 3.0));
  for (auto& s : net.segments) {
    if (s.tag == SegmentTag::XPanel && s.slice == 1 && s.level == 2) {
      std::swap(s.start, s.end);
      break;
    }
  }
  std::string msg;
  CHECK(error_kind([&] { validate_topology(net); }, &msg) == ErrorKind::TopologyBroken);
  CHECK(msg.find("ordering") != std::string::npos);
}

TEST_CASE("topology validation rejects a detached network") {
  BranchNetwork net = build_network(cylinder_designs(2, 2, 1.0, 2.0));
  std::vector<SegmentRecord> kept;
  for (const auto& s : net.segments) {
    if (s.tag != SegmentTag::Separation) kept.push_back(s);
  }
  net.segments = kept;
  CHECK_FALSE(net.connected());
  CHECK(error_kind([&] { validate_topology(net); }) == ErrorKind::TopologyBroken);
}

TEST_CASE("stitching patches") {
  const BranchNetwork a = build_network(cylinder_designs(3, 4, 1.0, 3.0));
  const BranchNetwork b = build_network(cylinder_designs(3, 3, 0.5, 3.0));
  const BranchNetwork parts[] = {a, b};
  const BranchNetwork s = stitch_networks(parts);
  CHECK(s.num_slices() == 7);
  CHECK(s.slice_offsets[4] == doctest::Approx(4.0));
  CHECK(s.slice_widths[5] == doctest::Approx(0.5));
  CHECK(s.connected());
  CHECK_NOTHROW(validate_topology(s));
  CHECK(count_tag(s, SegmentTag::SupportStrip) ==
        count_tag(a, SegmentTag::SupportStrip) + count_tag(b, SegmentTag::SupportStrip) + 1);
}

TEST_CASE("segment tags round-trip through text") {
  for (auto t : {SegmentTag::XPanel, SegmentTag::ZPanel, SegmentTag::Separation, SegmentTag::SupportStrip}) {
    CHECK(parse_tag(to_string(t)) == t);
  }
  CHECK(error_kind([] { parse_tag("bogus"); }) == ErrorKind::InvalidConfig);
}
