// Command-line front door for the suspended-mirror conditional-state model.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mirrorstate/io.hpp"
#include "mirrorstate/runner.hpp"

namespace {

struct GlobalOpts {
  std::string config = MIRRORSTATE_DEFAULT_CONFIG;
  std::string out_dir;
  std::string backend = "residues";
  double eta = -1;
  bool eta_set = false;
};

void write_outputs(const mirrorstate::RunOutput& out, const GlobalOpts& g,
                   const std::string& subcommand) {
  if (g.out_dir.empty()) {
    for (const auto& a : out.artifacts) std::cout << a.content;
    std::cerr << out.manifest_json;
    return;
  }
  std::filesystem::create_directories(g.out_dir);
  for (const auto& a : out.artifacts) {
    std::ofstream f(std::filesystem::path(g.out_dir) / a.name, std::ios::binary);
    f << a.content;
  }
  std::ofstream m(std::filesystem::path(g.out_dir) / (subcommand + ".manifest.json"),
                  std::ios::binary);
  m << out.manifest_json;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional quantum state of a feedback-cooled suspended mirror"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config, "parameter file (key = value, CGS)");
  app.add_option("--out-dir", g.out_dir, "write artifacts here instead of stdout");
  app.add_option("--backend", g.backend, "residues|quadrature");
  app.add_option("--eta", g.eta, "override detection efficiency")
      ->each([&](const std::string&) { g.eta_set = true; });

  std::map<std::string, std::string> opts;
  auto bind = [&opts](CLI::App* cmd, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        std::string("--") + key,
        [&opts, key](const std::string& v) { opts[key] = v; }, help);
  };

  auto* steady = app.add_subcommand("steady", "steady-state beam profile and offsets");
  bind(steady, "delta", "normalized detuning");
  bind(steady, "sigma-samples", "number of beam positions");

  auto* modes = app.add_subcommand("modes", "normal-mode frequencies vs detuning");
  bind(modes, "delta-range", "a:b:n");

  auto* spectra = app.add_subcommand("spectra", "symmetrized spectral densities");
  bind(spectra, "delta", "normalized detuning");
  bind(spectra, "freq-range", "a:b:n in Hz");

  auto* filter = app.add_subcommand("filter", "causal estimation filter");
  bind(filter, "delta", "normalized detuning");
  bind(filter, "target", "dq|dp|dphi|dpi");
  bind(filter, "freq-range", "a:b:n in Hz");

  auto* covariance = app.add_subcommand("covariance", "conditional covariance matrices");
  bind(covariance, "delta", "normalized detuning");
  bind(covariance, "discard", "none|rotational|pendulum");
  bind(covariance, "filter", "two-mode|one-mode");
  bind(covariance, "ngamma", "dissipation multiplier for the one-mode filter");

  auto* sweep = app.add_subcommand("sweep", "covariances over a detuning grid");
  bind(sweep, "delta-range", "a:b:n");
  bind(sweep, "discard", "none|rotational|pendulum");
  bind(sweep, "filter", "two-mode|one-mode");
  bind(sweep, "ngamma", "dissipation multiplier for the one-mode filter");

  auto* nscan = app.add_subcommand("nscan", "one-mode-filter purity vs dissipation scale");
  bind(nscan, "delta", "normalized detuning");
  bind(nscan, "n-range", "a:b:n");
  bind(nscan, "discard", "none|rotational|pendulum");

  auto* wigner = app.add_subcommand("wigner", "Wigner ellipse SVG");
  bind(wigner, "delta", "normalized detuning");
  bind(wigner, "mode", "pendulum|rotational");
  bind(wigner, "filter", "two|one|all");
  bind(wigner, "discard", "none|rotational|pendulum");

  auto* negativity = app.add_subcommand("negativity", "two-mirror entanglement sweep");
  bind(negativity, "delta-range", "a:b:n");
  bind(negativity, "kappa-ratio", "differential/common decay ratio");

  auto* preset = app.add_subcommand("preset", "figure-reproduction presets");
  bind(preset, "preset", "fig8|fig9|fig10|fig11|fig12");
  bind(preset, "delta-range", "a:b:n");
  bind(preset, "n-range", "a:b:n");
  preset->add_option_function<std::string>(
      "name", [&opts](const std::string& v) { opts["preset"] = v; },
      "fig8|fig9|fig10|fig11|fig12");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    mirrorstate::LoadResult loaded = mirrorstate::load_params_file(g.config);
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";

    mirrorstate::RunManifest man;
    man.config_path = g.config;
    man.subcommand = app.get_subcommands().front()->get_name();
    man.options = opts;
    if (g.eta_set) man.options["eta"] = mirrorstate::format_sig(g.eta);
    if (g.backend != "residues") man.options["backend"] = g.backend;

    mirrorstate::RunOutput out = mirrorstate::run(loaded.params, man);
    write_outputs(out, g, man.subcommand);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
