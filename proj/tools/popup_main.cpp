#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "popup/config.hpp"
#include "popup/errors.hpp"
#include "popup/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  int frames = 0;
  std::string grid;
  std::optional<double> phi;
  std::string format;
  std::string input;
};

popup::PipelineConfig resolve(const Overrides& o) {
  popup::PipelineConfig c = o.config.empty() ? popup::PipelineConfig{} : popup::load_config(o.config);
  if (!o.out.empty()) c.output.dir = o.out;
  if (o.frames != 0) c.deployment.frames = o.frames;
  if (!o.grid.empty()) std::tie(c.curvature.r, c.curvature.lambda) = popup::parse_grid(o.grid);
  if (o.phi) c.curvature.phi = {*o.phi, *o.phi, 1};
  if (!o.format.empty()) c.output.format = o.format;
  if (o.frames != 0) c.splay.samples = o.frames;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Popup structure inverse design: curvature maps, slice design, deployment frames."};
  app.require_subcommand(1);
  Overrides o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Configuration file (INI sections)");
    sub->add_option("--out", o.out, "Output directory");
  };

  auto* cmap = app.add_subcommand("curvature-map", "K and H of the five-cell assembly over (r, lambda)");
  common(cmap);
  cmap->add_option("--grid", o.grid, "r_min:r_max:n,lambda_min:lambda_max:n");
  cmap->add_option("--phi", o.phi, "Polar angle of the central vertex, radians");

  auto* design = app.add_subcommand("design", "Slice, optimize, branch and export a cut-fold pattern");
  common(design);
  design->add_option("--format", o.format, "Restrict data output")->check(CLI::IsMember({"svg", "csv"}));

  auto* deploy = app.add_subcommand("deploy", "Write STL frames of the deployment sequence");
  common(deploy);
  deploy->add_option("--input", o.input, "Network CSV written by design (default: design from --config)");
  deploy->add_option("--frames", o.frames, "Number of deployment frames")->check(CLI::Range(2, 100000));
  deploy->add_option("--format", o.format, "STL flavour")->check(CLI::IsMember({"stl-bin", "stl-txt"}));

  auto* splay = app.add_subcommand("splay-study", "Central-vertex K over deployment for a splay field");
  common(splay);
  splay->add_option("--frames", o.frames, "Number of deployment samples")->check(CLI::Range(2, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const popup::PipelineConfig config = resolve(o);
    popup::CommandResult res;
    if (cmap->parsed()) {
      res = popup::cmd_curvature_map(config);
    } else if (design->parsed()) {
      res = popup::cmd_design(config);
    } else if (deploy->parsed()) {
      res = popup::cmd_deploy(config, o.input.empty() ? std::nullopt : std::optional<std::filesystem::path>(o.input));
    } else {
      res = popup::cmd_splay_study(config);
    }
    std::cout << res.summary;
    if (res.files.size() <= 4) {
      for (const auto& f : res.files) std::cerr << "popup: wrote " << f.string() << '\n';
    } else {
      std::cerr << "popup: wrote " << res.files.size() << " files to " << res.files.front().parent_path().string()
                << '\n';
    }
    return 0;
  } catch (const popup::Error& e) {
    std::cerr << "popup: error: " << e.what() << '\n';
    return e.kind() == popup::ErrorKind::InvalidConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "popup: error: " << e.what() << '\n';
    return 1;
  }
}
