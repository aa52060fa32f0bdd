// Acceptance checks, one PASS/FAIL line each. Usage: popup_acceptance <configs dir>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "popup/assembly.hpp"
#include "popup/config.hpp"
#include "popup/deployment.hpp"
#include "popup/discrete_curvature.hpp"
#include "popup/io.hpp"
#include "popup/pattern.hpp"
#include "popup/pipeline.hpp"
#include "popup/slice_optimizer.hpp"
#include "popup/tri_mesh.hpp"
#include "popup/unit_kinematics.hpp"

using namespace popup;

namespace {

std::filesystem::path g_configs;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << what;
    ok = ok && cond;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double K_at(double r, double lambda) { return assembly_curvature({r, kPi / 4, lambda}).K; }
double H_at(double r, double lambda) { return assembly_curvature({r, kPi / 4, lambda}).H; }

// 1: both K = 0 loci, with a sign flip across each.
void k_loci(Outcome& o) {
  const auto t0 = Clock::now();
  const double d = 1e-3;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double lambda = 0.5 + i / 49.0;
    for (int locus = 0; locus < 2; ++locus) {
      const double r = locus == 0 ? (1 + 2 * lambda) / std::sqrt(2.0) : 3 / std::sqrt(2.0);
      worst = std::max(worst, std::abs(K_at(r, lambda)));
      // the two loci meet at lambda = 1, where K touches zero without crossing
      if (std::abs(lambda - 1.0) < 0.02) continue;
      const double lo = K_at(r - d, lambda);
      const double hi = K_at(r + d, lambda);
      if (lo * hi >= 0) {
        std::ostringstream m;
        m << "no sign flip at lambda " << lambda << " locus " << locus;
        o.require(false, m.str());
      }
    }
  }
  std::ostringstream m;
  m << "max |K| " << worst;
  o.require(worst < 1e-6, m.str());
  o.require(seconds_since(t0) < 1.0, "slower than 1 s");
  if (o.ok) o.detail << "max |K| on 100 locus points " << worst << ", " << seconds_since(t0) << " s";
}

// 2: H = 0 locus.
void h_locus(Outcome& o) {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double lambda = 0.5 + i / 49.0;
    worst = std::max(worst, std::abs(H_at((2 + lambda) / std::sqrt(2.0), lambda)));
  }
  o.require(worst < 1e-6, "max |H| too large");
  o.detail << (o.ok ? "" : ": ") << "max |H| on 50 points " << worst;
}

// 3: operators on meshes unrelated to the assembly.
void operators(Outcome& o) {
  VertexStar fan;
  fan.center = Vec3::Zero();
  fan.closed = true;
  for (int i = 0; i < 7; ++i) {
    const double a = 2 * kPi * i / 7 + 0.1 * std::sin(i);
    fan.ring.push_back(Vec3((1 + 0.3 * i) * std::cos(a), (1 + 0.3 * i) * std::sin(a), 0));
  }
  const double planar = angle_defect(fan);
  o.require(std::abs(planar) < 1e-12, "planar fan defect");

  VertexStar oct;
  oct.center = Vec3(0, 0, 1);
  oct.closed = true;
  oct.ring = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0)};
  const double od = angle_defect(oct);
  o.require(std::abs(od - 2 * kPi / 3) < 1e-12, "octahedron defect");

  const double R = 2.0;
  const TriMesh sphere = icosphere(R, 5);
  double worst = 0.0;
  for (std::size_t v = 0; v < sphere.vertices.size(); ++v) {
    const double H = cotan_mean_curvature(sphere, static_cast<int>(v));
    worst = std::max(worst, std::abs(std::abs(H) * R - 1));
  }
  o.require(worst < 0.02, "icosphere mean curvature error");
  o.detail << (o.ok ? "" : ": ") << "planar " << planar << ", octahedron " << od - 2 * kPi / 3 << ", icosphere "
           << sphere.vertices.size() << " vertices max relative error of H against 1/R " << worst;
}

// Quarter-circle oracle. Interior vertices sit on the unit arc at polar
// angles t_1 < ... < t_{N-1} from the z axis, so each design is a point on a
// (N-1)-dimensional grid.
std::vector<double> oracle_angles(int n) {
  auto loss = [n](const std::vector<double>& t) {
    std::vector<double> lx(n), lz(n);
    double px = 0, pz = 0;
    for (int i = 0; i < n; ++i) {
      const double x = i + 1 < n ? std::sin(t[i]) : 1.0;
      const double z = i + 1 < n ? 1 - std::cos(t[i]) : 1.0;
      lx[i] = x - px;
      lz[i] = z - pz;
      px = x;
      pz = z;
    }
    return loss_eval(lx, lz, 1.0 / n);
  };
  std::vector<double> best(n - 1, 0.0);
  double fbest = 1e300;
  auto search = [&](const std::vector<double>& lo, const std::vector<double>& hi, double step) {
    std::vector<double> t = lo;
    std::vector<double> found = best;
    while (true) {
      bool ordered = true;
      for (int i = 1; i + 1 < n; ++i) ordered = ordered && t[i] >= t[i - 1];
      if (ordered) {
        const double f = loss(t);
        if (f < fbest) fbest = f, found = t;
      }
      int k = 0;
      while (k < n - 1) {
        t[k] += step;
        if (t[k] <= hi[k] + 1e-15) break;
        t[k] = lo[k];
        ++k;
      }
      if (k == n - 1) break;
    }
    best = found;
  };
  search(std::vector<double>(n - 1, 0.0), std::vector<double>(n - 1, kPi / 2), 1e-3);
  std::vector<double> lo(n - 1), hi(n - 1);
  for (int i = 0; i < n - 1; ++i) lo[i] = best[i] - 2e-3, hi[i] = best[i] + 2e-3;
  search(lo, hi, 1e-5);
  return best;
}

// 4: optimizer vs exhaustive oracle.
void oracle(Outcome& o) {
  const auto t0 = Clock::now();
  for (int n : {2, 3}) {
    const std::vector<double> t = oracle_angles(n);
    const SliceDesign d = optimize_slice(SliceCurve::arc(1.0), n);
    double px = 0, pz = 0, worst = 0;
    for (int i = 0; i < n; ++i) {
      const double x = i + 1 < n ? std::sin(t[i]) : 1.0;
      const double z = i + 1 < n ? 1 - std::cos(t[i]) : 1.0;
      worst = std::max({worst, std::abs(d.cells[i].lx - (x - px)), std::abs(d.cells[i].lz - (z - pz))});
      px = x;
      pz = z;
    }
    std::ostringstream m;
    m << "N " << n << " parameter gap " << worst << ", residual " << d.residuals.max();
    o.require(worst < 1e-4 && d.residuals.max() < 1e-8, m.str());
    if (o.ok) o.detail << m.str() << "; ";
  }
  o.require(seconds_since(t0) < 10.0, "slower than 10 s");
  if (o.ok) o.detail << seconds_since(t0) << " s";
}

// 5: analytic gradients against central differences.
void gradients(Outcome& o) {
  std::mt19937 rng(20261019);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 6;
    std::uniform_real_distribution<double> U(0.2, 1.0);
    opt::Vector p(2 * n);
    double sx = 0, sz = 0;
    for (int i = 0; i < n; ++i) sx += (p(i) = U(rng)), sz += (p(n + i) = U(rng));
    for (int i = 0; i < n; ++i) p(i) /= sx, p(n + i) /= sz;  // isometric point
    opt::Vector g;
    loss_with_gradient(p, 1.0 / n, &g);
    const opt::Vector fd = opt::finite_difference_gradient(
        [n](const opt::Vector& x) { return loss_with_gradient(x, 1.0 / n, nullptr); }, p);
    worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), 1e-3));

    std::uniform_real_distribution<double> R(1.0, 2.2), L(0.5, 1.5);
    CurvatureTarget target;
    target.K = trial % 2 ? -0.5 : 0.5;
    target.H = 0.1;
    opt::Vector x(2);
    x << R(rng), L(rng);
    Vec2 cg;
    curvature_loss(target, 1.0, 1.0, Vec2(x(0), x(1)), &cg);
    const opt::Vector cfd = opt::finite_difference_gradient(
        [&](const opt::Vector& y) { return curvature_loss(target, 1.0, 1.0, Vec2(y(0), y(1)), nullptr); }, x);
    worst = std::max(worst, (Vec2(cfd(0), cfd(1)) - cg).norm() / std::max(cg.norm(), 1e-3));
  }
  o.require(worst < 1e-5, "gradient mismatch");
  o.detail << (o.ok ? "" : ": ") << "max relative error " << worst << " over 20 points";
}

// 6: azimuthal error profile and loss convergence.
void azimuthal(Outcome& o) {
  const auto t0 = Clock::now();
  for (int n : {5, 9, 15}) {
    const AzimuthalError e = azimuthal_error(optimize_slice(SliceCurve::arc(1.0), n));
    const int c = (n - 1) / 2;
    bool mono = true;
    for (int i = 0; i < c; ++i) mono = mono && e.normalized[i] > e.normalized[i + 1];
    for (int i = c; i + 1 < n; ++i) mono = mono && e.normalized[i] < e.normalized[i + 1];
    o.require(mono, "profile not monotone for N " + std::to_string(n));
  }
  const std::vector<int> ns{5, 10, 20, 40};
  const auto study = convergence_study(SliceCurve::arc(1.0), ns);
  for (std::size_t i = 1; i < study.size(); ++i) {
    o.require(study[i].loss < study[i - 1].loss, "loss not decreasing at N " + std::to_string(study[i].n));
  }
  o.require(seconds_since(t0) < 30.0, "slower than 30 s");
  if (o.ok) {
    o.detail << "minimum at the center for N 5, 9, 15; losses";
    for (const auto& p : study) o.detail << " " << p.loss;
    o.detail << "; " << seconds_since(t0) << " s";
  }
}

// 7: splay formulas.
void splay(Outcome& o) {
  double theta_err = 0.0, norm_err = 0.0, peak_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double psi = kPi * i / 99.0;
    for (int j = 0; j < 100; ++j) {
      const double alpha = 5.0 * j / 99.0;
      const double closed = 2 * std::atan(alpha * std::cos(psi / 2));
      theta_err = std::max(theta_err, std::abs(splay_theta(alpha, psi) - closed));
      const UnitCell cell{1, 1, 0.7, alpha};
      norm_err = std::max(norm_err, std::abs(splayed_vertex(cell, psi).norm() - 0.7));
    }
  }
  // On alpha cos(psi/2) = 1 the height reaches w; a dense scan of alpha at
  // fixed psi peaks there.
  for (int i = 0; i < 20; ++i) {
    const double psi = 0.1 + 2.8 * i / 19.0;
    const double star = 1 / std::cos(psi / 2);
    const UnitCell at{1, 1, 1, star};
    peak_err = std::max(peak_err, std::abs(splayed_vertex(at, psi).y() - 1.0));
    for (double f : {0.9, 0.99, 1.01, 1.1}) {
      const UnitCell off{1, 1, 1, star * f};
      o.require(splayed_vertex(off, psi).y() < splayed_vertex(at, psi).y(), "height not maximal on the level set");
    }
  }
  o.require(theta_err < 1e-12, "theta closed form");
  o.require(norm_err < 1e-12, "vertex norm");
  o.require(peak_err < 1e-12, "peak height");
  o.detail << (o.ok ? "" : ": ") << "theta " << theta_err << ", |r| - w " << norm_err << ", peak " << peak_err;
}

// 8: one sign change for the shipped splay field.
void transition(Outcome& o) {
  const PipelineConfig c = load_config(g_configs / "splay.ini");
  const SplayStructure s = c.splay_structure();
  const double k16 = curvature_trace(s, {0.16 * kPi}).samples[0].K;
  const double k47 = curvature_trace(s, {0.47 * kPi}).samples[0].K;
  DeploymentSchedule sched{c.splay.samples};
  const CurvatureTrace trace = curvature_trace(s, sched.angles());
  o.require(k16 > 0, "K(0.16 pi) not positive");
  o.require(k47 < 0, "K(0.47 pi) not negative");
  o.require(trace.sign_changes.size() == 1, "sign change count " + std::to_string(trace.sign_changes.size()));
  o.detail << (o.ok ? "" : ": ") << "K(0.16pi) " << k16 << ", K(0.47pi) " << k47 << ", changes "
           << trace.sign_changes.size();
  if (!trace.sign_changes.empty()) o.detail << " at " << trace.sign_changes[0] / kPi << " pi";
}

struct SvgLine {
  std::string id;
  Vec2 a, b;
};

std::vector<SvgLine> svg_lines(const std::string& svg) {
  static const std::regex re(R"re(<line id="([^"]+)" x1="([^"]+)" y1="([^"]+)" x2="([^"]+)" y2="([^"]+)")re");
  std::vector<SvgLine> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.push_back({m[1], Vec2(std::stod(m[2]), std::stod(m[3])), Vec2(std::stod(m[4]), std::stod(m[5]))});
  }
  return out;
}

// 9: area, connectivity and round-trip conservation through the pipeline.
void conservation(Outcome& o) {
  const PipelineConfig c = load_config(g_configs / "cylinder_n5.ini");
  const DesignOutput d = run_design(c);
  const double flat = d.pattern.area() / (c.output.scale_cm * c.output.scale_cm);
  const auto frames = deployment_frames(d.network, c.deployment);
  double area_gap = 0.0;
  bool same_hash = true;
  for (const auto& f : frames) {
    area_gap = std::max(area_gap, std::abs(f.total_area() - flat));
    same_hash = same_hash && f.connectivity_hash() == frames.front().connectivity_hash();
  }
  o.require(frames.size() == 30, "frame count");
  o.require(area_gap < 1e-9, "area gap");
  o.require(same_hash, "connectivity hash changed");

  const auto lines = svg_lines(d.svg);
  double round_trip = 0.0;
  o.require(lines.size() == d.pattern.lines.size(), "SVG line count");
  for (std::size_t i = 0; i < lines.size() && i < d.pattern.lines.size(); ++i) {
    const PatternLine* match = nullptr;
    for (const auto& l : d.pattern.lines) {
      if (l.id == lines[i].id) match = &l;
    }
    if (!match) {
      o.require(false, "SVG id " + lines[i].id + " not in the pattern");
      break;
    }
    round_trip = std::max({round_trip, (match->a - lines[i].a).norm(), (match->b - lines[i].b).norm()});
  }
  o.require(round_trip < 1e-6, "SVG round trip");

  const DesignOutput unit = run_design(load_config(g_configs / "single_unit.ini"));
  const auto cuts = unit.pattern.count(LineKind::Cut);
  const auto folds = unit.pattern.count(LineKind::Fold);
  o.require(cuts == 2 && folds == 3, "single unit has " + std::to_string(cuts) + " cuts, " +
                                         std::to_string(folds) + " folds");
  o.detail << (o.ok ? "" : ": ") << "area gap " << area_gap << " over " << frames.size() << " frames, hash "
           << (same_hash ? "constant" : "varies") << ", SVG round trip " << round_trip << " cm, single unit " << cuts
           << " cuts + " << folds << " folds";
}

// 10: curvature-targeted assembly design.
void targeted(Outcome& o) {
  const auto t0 = Clock::now();
  for (double k : {-1.0, 0.0, 1.0}) {
    CurvatureTarget t;
    t.K = k;
    const CurvatureDesign d = optimize_assembly_curvature(t);
    const double achieved = K_at(d.r, d.lambda);
    std::ostringstream m;
    m << "K~ " << k << " -> r " << d.r << " lambda " << d.lambda << " K " << achieved;
    o.require(std::abs(achieved - k) < 1e-3, m.str());
    if (o.ok) o.detail << m.str() << "; ";
  }
  o.require(seconds_since(t0) < 5.0, "slower than 5 s");
  if (o.ok) o.detail << seconds_since(t0) << " s";
}

// 11: byte-identical reruns.
void determinism(Outcome& o) {
  PipelineConfig c = load_config(g_configs / "cylinder_n5.ini");
  const auto root = std::filesystem::temp_directory_path() / "popup_acceptance_determinism";
  std::filesystem::remove_all(root);
  c.output.dir = root / "a";
  const CommandResult a = cmd_design(c);
  c.output.dir = root / "b";
  const CommandResult b = cmd_design(c);
  o.require(a.files.size() == b.files.size(), "file lists differ");
  for (std::size_t i = 0; i < a.files.size() && i < b.files.size(); ++i) {
    o.require(read_file(a.files[i]) == read_file(b.files[i]), a.files[i].filename().string() + " differs");
  }
  std::filesystem::remove_all(root);
  if (o.ok) o.detail << a.files.size() << " files identical";
}

}  // namespace

int main(int argc, char** argv) {
  g_configs = argc > 1 ? argv[1] : "configs";
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"K = 0 loci", k_loci},
      {"H = 0 locus", h_locus},
      {"curvature operators", operators},
      {"optimizer vs grid oracle", oracle},
      {"gradient check", gradients},
      {"azimuthal error and convergence", azimuthal},
      {"splay formulas", splay},
      {"multi-state transition", transition},
      {"pipeline conservation", conservation},
      {"curvature-targeted design", targeted},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    failed += o.ok ? 0 : 1;
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail.str() << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
