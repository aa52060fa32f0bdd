#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <regex>
#include <sstream>

#include "helpers.hpp"
#include "popup/csv_io.hpp"
#include "popup/deployment.hpp"
#include "popup/io.hpp"
#include "popup/pattern.hpp"
#include "popup/stl.hpp"

using namespace popup;
using popup::testing::cylinder_designs;
using popup::testing::design_from;
using popup::testing::error_kind;

namespace {

BranchNetwork single_unit(double w) {
  const std::vector<SliceDesign> d{design_from({w}, {w}, w, w, 0)};
  return build_network(d);
}

struct SvgLine {
  std::string id;
  Vec2 a, b;
  std::string kind;
};

// Minimal reader for the <line .../> elements of the emitted document.
std::vector<SvgLine> parse_svg_lines(const std::string& svg) {
  static const std::regex re(
      R"re(<line id="([^"]+)" x1="([^"]+)" y1="([^"]+)" x2="([^"]+)" y2="([^"]+)" data-kind="([^"]+)")re");
  std::vector<SvgLine> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.push_back({m[1], Vec2(std::stod(m[2]), std::stod(m[3])), Vec2(std::stod(m[4]), std::stod(m[5])), m[6]});
  }
  return out;
}

float read_f32(const std::string& s, std::size_t off) {
  float f;
  std::memcpy(&f, s.data() + off, 4);
  return f;
}

}  // namespace

TEST_CASE("thickening") {
  SUBCASE("one segment gives 4 vertices and 2 faces") {
    BranchNetwork net;
    net.segments.push_back(SegmentRecord::make({0, 0, 1}, {1, 0, 1}, SegmentTag::XPanel, 0, 1, 0.5));
    net.slice_widths = {0.5};
    net.slice_offsets = {0.0};
    net.slice_lengths = {1.0};
    const TriMesh m = thicken_to_mesh(net, kPi / 2);
    CHECK(m.num_vertices() == 4);
    CHECK(m.num_faces() == 2);
    CHECK(m.total_area() == doctest::Approx(0.5));
  }
  SUBCASE("quarter cylinder network") {
    const BranchNetwork net = build_network(cylinder_designs(3, 10, 1.0, 3.0));
    for (double psi : {0.0, 0.4, kPi / 2}) {
      const TriMesh m = thicken_to_mesh(net, psi);
      CHECK(m.num_faces() == 2 * net.segments.size());
      CHECK(m.total_area() == doctest::Approx(panel_area(net)).epsilon(1e-12));
    }
  }
  SUBCASE("zero-length panels are rejected") {
    BranchNetwork net;
    net.segments.push_back(SegmentRecord::make({1, 0, 1}, {1, 0, 1}, SegmentTag::XPanel, 0, 1, 0.5));
    CHECK(error_kind([&] { thicken_to_mesh(net, kPi / 2); }) == ErrorKind::DegeneratePanel);
  }
}

TEST_CASE("deployment frames") {
  const BranchNetwork net = build_network(cylinder_designs(3, 4, 1.0, 3.0));
  SUBCASE("two frames: flat and deployed") {
    const auto frames = deployment_frames(net, {2});
    REQUIRE(frames.size() == 2);
    for (const auto& v : frames[0].vertices) CHECK(std::abs(v.z()) < 1e-15);
    const TriMesh deployed = thicken_to_mesh(net, kPi / 2);
    for (std::size_t i = 0; i < deployed.vertices.size(); ++i) {
      CHECK((frames[1].vertices[i] - deployed.vertices[i]).norm() < 1e-15);
    }
  }
  SUBCASE("area and connectivity constant over 30 frames") {
    const auto frames = deployment_frames(net, {30});
    const double a0 = frames.front().total_area();
    for (const auto& f : frames) {
      CHECK(std::abs(f.total_area() - a0) < 1e-9);
      CHECK(f.connectivity_hash() == frames.front().connectivity_hash());
    }
  }
  SUBCASE("schedule needs two frames") {
    CHECK(error_kind([&] { deployment_frames(net, {1}); }) == ErrorKind::InvalidConfig);
    const auto psi = DeploymentSchedule{5}.angles();
    CHECK(psi.front() == 0.0);
    CHECK(psi.back() == kPi / 2);
    CHECK(psi[2] == doctest::Approx(kPi / 4));
  }
}

TEST_CASE("STL output") {
  TriMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0.5}};
  m.faces = {{0, 1, 2}, {0, 2, 3}};
  SUBCASE("text") {
    const std::string s = stl_text(m, "demo");
    std::size_t facets = 0;
    for (std::size_t p = s.find("facet normal"); p != std::string::npos; p = s.find("facet normal", p + 1)) ++facets;
    CHECK(facets == 2);
    CHECK(s.rfind("solid demo", 0) == 0);
    CHECK(s.find("endsolid demo") != std::string::npos);
  }
  SUBCASE("binary") {
    const std::string s = stl_binary(m);
    REQUIRE(s.size() == 84 + 50 * 2);
    std::uint32_t count;
    std::memcpy(&count, s.data() + 80, 4);
    CHECK(count == 2);
    for (std::size_t f = 0; f < 2; ++f) {
      const std::size_t off = 84 + 50 * f;
      const Vec3 n(read_f32(s, off), read_f32(s, off + 4), read_f32(s, off + 8));
      CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  SUBCASE("frame files") {
    const auto dir = std::filesystem::temp_directory_path() / "popup_stl_frames";
    std::filesystem::remove_all(dir);
    const TriMesh frames[] = {m, m, m};
    const double psi[] = {0.0, 0.5, kPi / 2};
    const FrameExport fx = write_frames(dir, frames, psi);
    REQUIRE(fx.files.size() == 3);
    CHECK(fx.files[0].filename() == "frame_0001.stl");
    CHECK(std::filesystem::file_size(fx.files[2]) == 84 + 50 * 2);
    const std::string meta = read_file(fx.metadata);
    CHECK(meta.find("frames = 3") != std::string::npos);
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("cut-fold pattern") {
  SUBCASE("single unit: two cuts, three folds") {
    const CutFoldPattern p = build_pattern(single_unit(3.0));
    CHECK(p.count(LineKind::Cut) == 2);
    CHECK(p.count(LineKind::Fold) == 3);
    CHECK(p.area() == doctest::Approx(18.0));
  }
  SUBCASE("ten unit-width slices span 10 cm") {
    const BranchNetwork net = build_network(cylinder_designs(5, 10, 1.0, 5.0));
    const CutFoldPattern p = build_pattern(net);
    CHECK(p.max.x() - p.min.x() == doctest::Approx(10.0));
    CHECK(p.area() == doctest::Approx(panel_area(net)).epsilon(1e-12));
    const std::string svg = emit_svg(p);
    CHECK(svg.find("width=\"10cm\"") != std::string::npos);
  }
  SUBCASE("SVG round trip") {
    PatternOptions o;
    o.scale_cm = 1.5;
    const CutFoldPattern p = build_pattern(build_network(cylinder_designs(3, 4, 1.0, 3.0)), o);
    const auto lines = parse_svg_lines(emit_svg(p, o));
    REQUIRE(lines.size() == p.lines.size());
    std::size_t cuts = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      // groups are written cuts first, then folds, then support strips
      const auto it = std::find_if(p.lines.begin(), p.lines.end(), [&](const PatternLine& l) { return l.id == lines[i].id; });
      REQUIRE(it != p.lines.end());
      CHECK((it->a - lines[i].a).norm() < 1e-6);
      CHECK((it->b - lines[i].b).norm() < 1e-6);
      CHECK(lines[i].kind == (it->kind == LineKind::Cut ? "cut" : "fold"));
      cuts += lines[i].kind == "cut" ? 1 : 0;
    }
    CHECK(cuts == p.count(LineKind::Cut));
  }
  SUBCASE("micro-cut dashes") {
    PatternOptions o;
    o.microcuts = true;
    const CutFoldPattern p = build_pattern(single_unit(3.0), o);
    CHECK(emit_svg(p, o).find("id=\"microcuts\"") != std::string::npos);
    o.micro_cut = 0.0;
    CHECK(error_kind([&] { emit_svg(p, o); }) == ErrorKind::InvalidConfig);
  }
}

TEST_CASE("network CSV") {
  const BranchNetwork net = build_network(cylinder_designs(3, 5, 0.8, 2.5));
  const std::string csv = network_csv(net);
  CHECK(csv.rfind("tag,x1,y1,z1,x2,y2,z2,length,slice,level\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  const BranchNetwork back = parse_network_csv(csv, net.support_factor);
  REQUIRE(back.segments.size() == net.segments.size());
  for (std::size_t k = 0; k < net.segments.size(); ++k) {
    const auto& a = net.segments[k];
    const auto& b = back.segments[k];
    CHECK(a.tag == b.tag);
    CHECK(a.slice == b.slice);
    CHECK(a.level == b.level);
    CHECK((a.start - b.start).norm() < 1e-8);
    CHECK((a.end - b.end).norm() < 1e-8);
    CHECK(a.width == doctest::Approx(b.width).epsilon(1e-8));
  }
  for (int j = 0; j < net.num_slices(); ++j) {
    CHECK(back.slice_widths[j] == doctest::Approx(net.slice_widths[j]).epsilon(1e-8));
    CHECK(back.slice_lengths[j] == doctest::Approx(net.slice_lengths[j]).epsilon(1e-8));
  }
  // lengths are recomputed from the rounded endpoints, so only that column may move
  const std::string again = network_csv(back);
  std::istringstream sa(csv), sb(again);
  std::string la, lb;
  while (std::getline(sa, la) && std::getline(sb, lb)) {
    if (la == lb) continue;
    const auto cut = [](const std::string& s, int field) {
      std::size_t p = 0;
      for (int i = 0; i < field; ++i) p = s.find(',', p) + 1;
      return s.substr(p, s.find(',', p) - p);
    };
    for (int f = 0; f < 10; ++f) {
      if (f == 7) CHECK(std::stod(cut(la, f)) == doctest::Approx(std::stod(cut(lb, f))).epsilon(1e-8));
      else CHECK(cut(la, f) == cut(lb, f));
    }
  }
  CHECK(network_csv(parse_network_csv(again, net.support_factor)) == again);
  CHECK_NOTHROW(validate_topology(back));
  CHECK(error_kind([] { parse_network_csv("a,b\n"); }) == ErrorKind::InvalidConfig);
  CHECK(error_kind([] { parse_network_csv("tag,x1,y1,z1,x2,y2,z2,length,slice,level\n"); }) == ErrorKind::EmptyNetwork);
}

TEST_CASE("atomic writes leave no temporary file") {
  const auto dir = std::filesystem::temp_directory_path() / "popup_atomic";
  std::filesystem::remove_all(dir);
  ensure_directory(dir);
  write_file_atomic(dir / "a.txt", "hello\n");
  CHECK(read_file(dir / "a.txt") == "hello\n");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK(error_kind([&] { read_file(dir / "missing.txt"); }) == ErrorKind::Io);
  std::filesystem::remove_all(dir);
}
