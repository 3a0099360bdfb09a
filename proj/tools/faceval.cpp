#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "faceval/error.hpp"
#include "faceval/pipeline.hpp"

namespace {

using faceval::Errc;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::config_error:
      return 2;
    case Errc::degenerate_configuration:
    case Errc::rank_deficient:
    case Errc::zero_variance:
    case Errc::degenerate_hull:
    case Errc::zero_area:
    case Errc::zero_denominator:
    case Errc::coincident_landmarks:
      return 4;
    default:
      return 3;  // data error
  }
}

struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> crop_radius;
  std::optional<std::string> nose_tip;
  std::optional<int> n_perm;
  std::optional<int> n_boot;
  std::optional<double> alpha;
  bool no_scale_align = false;
};

void add_common_options(CLI::App* cmd, std::string& config_path, Overrides& over) {
  cmd->add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
  cmd->add_option("-o,--output-dir", over.output_dir, "Override output directory");
  cmd->add_option("--seed", over.seed, "Override RNG seed");
  cmd->add_option("--crop-radius", over.crop_radius, "Override crop radius (mm)");
  cmd->add_option("--nose-tip", over.nose_tip, "Override nose tip landmark name");
  cmd->add_option("--n-perm", over.n_perm, "Override permutation count");
  cmd->add_option("--n-boot", over.n_boot, "Override bootstrap replicate count");
  cmd->add_option("--alpha", over.alpha, "Override EDMA confidence alpha");
  cmd->add_flag("--no-scale-align", over.no_scale_align, "Rigid (no-scale) landmark alignment");
}

faceval::RunConfig load_with_overrides(const std::string& config_path, const Overrides& over) {
  faceval::RunConfig config = faceval::load_run_config(config_path);
  if (over.output_dir) config.output_dir = *over.output_dir;
  if (over.seed) config.seed = *over.seed;
  if (over.crop_radius) config.crop_radius_mm = *over.crop_radius;
  if (over.nose_tip) config.nose_tip_name = *over.nose_tip;
  if (over.n_perm) config.n_perm = *over.n_perm;
  if (over.n_boot) config.n_boot = *over.n_boot;
  if (over.alpha) config.alpha = *over.alpha;
  if (over.no_scale_align) config.align_allow_scale = false;

  if (config.crop_radius_mm <= 0.0) throw faceval::Error(Errc::config_error, "crop radius must be positive");
  if (config.n_perm < 1 || config.n_boot < 1)
    throw faceval::Error(Errc::config_error, "n_perm and n_boot must be positive");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw faceval::Error(Errc::config_error, "alpha must be in (0, 1)");
  return config;
}

void write_fragment(const faceval::RunConfig& config, const std::string& name, const nlohmann::json& fragment) {
  const std::string path = config.output_dir + "/" + name + ".json";
  std::filesystem::create_directories(config.output_dir);
  std::ofstream out(path, std::ios::trunc);
  out << fragment.dump(2) << "\n";
  std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric and morphometric evaluation of 3D facial reconstructions against a ground-truth scan"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides over;

  CLI::App* align = app.add_subcommand("align-crop", "Align low-cost scans onto ground truth and crop the face region");
  CLI::App* geom = app.add_subcommand("geom-compare", "Point-to-point and surface deviation metrics");
  CLI::App* gpa = app.add_subcommand("gpa-analyze", "GPA, PCA morphospace, hull IoU and permutation-tested PD");
  CLI::App* edma = app.add_subcommand("edma-compare", "EDMA form differences, significant distances and MD%");
  CLI::App* pipeline = app.add_subcommand("pipeline", "Run the full evaluation and write report.json");
  for (CLI::App* cmd : {align, geom, gpa, edma, pipeline}) add_common_options(cmd, config_path, over);

  CLI11_PARSE(app, argc, argv);

  try {
    const faceval::RunConfig config = load_with_overrides(config_path, over);

    if (pipeline->parsed()) {
      faceval::cmd_pipeline(config);
      std::cout << "wrote " << config.output_dir << "/report.json\n";
      return 0;
    }

    faceval::PipelineData data = faceval::load_inputs(config);
    const nlohmann::json alignment = faceval::cmd_align_crop(config, data);
    if (align->parsed()) {
      write_fragment(config, "alignment", alignment);
    } else if (geom->parsed()) {
      write_fragment(config, "geometric", faceval::cmd_geom_compare(config, data));
    } else if (gpa->parsed()) {
      write_fragment(config, "morphometric", faceval::cmd_gpa_analyze(config, data));
    } else if (edma->parsed()) {
      write_fragment(config, "edma", faceval::cmd_edma_compare(config, data));
    }
    return 0;
  } catch (const faceval::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
