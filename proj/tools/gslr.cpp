// Command-line front end: mask, phantom, recon, metrics, export.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gslr/array_io.hpp"
#include "gslr/fft.hpp"
#include "gslr/phantom.hpp"
#include "gslr/pipeline.hpp"
#include "gslr/sampling.hpp"

namespace {

gslr::SupportSet parse_support(const std::string &s)
{
  const auto x = s.find('x');
  if (x == std::string::npos) {
    const int n = std::stoi(s);
    return gslr::filter_support(n, n);
  }
  return gslr::filter_support(std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1)));
}

gslr::KArray spatial_part(const gslr::KArray &kspace) { return gslr::ifft2_unitary(kspace); }

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Generalized structured low-rank reconstruction"};
  app.require_subcommand(1);

  // mask
  auto *mask_cmd = app.add_subcommand("mask", "Generate a sampling mask");
  std::string mask_type = "radial";
  int nx = 64, ny = 64, spokes = 26;
  gslr::VariableDensityParams vd;
  std::string mask_out = "mask.arr";
  mask_cmd->add_option("--type", mask_type, "radial | variable-density")->check(CLI::IsMember({"radial", "variable-density"}));
  mask_cmd->add_option("--nx", nx)->check(CLI::PositiveNumber);
  mask_cmd->add_option("--ny", ny)->check(CLI::PositiveNumber);
  mask_cmd->add_option("--spokes", spokes)->check(CLI::PositiveNumber);
  mask_cmd->add_option("--accel", vd.target_accel);
  mask_cmd->add_option("--power", vd.density_power);
  mask_cmd->add_option("--center", vd.center_fraction);
  mask_cmd->add_option("--seed", vd.seed);
  mask_cmd->add_option("--out", mask_out);

  // phantom
  auto *ph_cmd = app.add_subcommand("phantom", "Synthesize a phantom (k-space, image and its two components)");
  gslr::SyntheticSpec spec;
  std::string kind = "mixed", edge = "3x3", ph_out = "phantom";
  int pnx = 64, pny = 64;
  ph_cmd->add_option("--kind", kind, "disk_pc | trig_region_pc | ramp_pl | mixed");
  ph_cmd->add_option("--nx", pnx)->check(CLI::PositiveNumber);
  ph_cmd->add_option("--ny", pny)->check(CLI::PositiveNumber);
  ph_cmd->add_option("--edge", edge, "edge polynomial support, e.g. 3x3");
  ph_cmd->add_option("--oversampling", spec.oversampling);
  ph_cmd->add_option("--seed", spec.seed);
  ph_cmd->add_option("--area", spec.area_fraction);
  ph_cmd->add_option("--slope", spec.slope);
  ph_cmd->add_option("--out", ph_out, "output prefix");

  // recon
  auto *recon_cmd = app.add_subcommand("recon", "Reconstruct from a config file and/or flags");
  std::string config;
  recon_cmd->add_option("--config", config, "flat key = value file");
  std::map<std::string, std::optional<std::string>> overrides;
  for (const auto &key : gslr::setting_keys()) {
    overrides[key];
    recon_cmd->add_option("--" + key, overrides[key]);
  }

  // metrics
  auto *met_cmd = app.add_subcommand("metrics", "SNR (dB) of one array against a reference");
  std::string met_recon, met_ref;
  met_cmd->add_option("recon", met_recon)->required();
  met_cmd->add_option("reference", met_ref)->required();

  // export
  auto *exp_cmd = app.add_subcommand("export", "Sum-of-squares magnitude to an 8-bit PGM");
  std::string exp_in, exp_out;
  std::optional<double> wmin, wmax;
  exp_cmd->add_option("input", exp_in)->required();
  exp_cmd->add_option("output", exp_out)->required();
  exp_cmd->add_option("--min", wmin);
  exp_cmd->add_option("--max", wmax);

  CLI11_PARSE(app, argc, argv);

  std::string out_dir;
  try {
    if (*mask_cmd) {
      const gslr::KGrid grid(nx, ny);
      const gslr::Mask m = mask_type == "radial" ? gslr::radial_mask(grid, spokes) : gslr::variable_density_mask(grid, vd);
      gslr::write_array(mask_out, gslr::to_array_file(m));
      std::printf("%zu samples, acceleration %.4f\n", m.count(), gslr::acceleration(m));
    } else if (*ph_cmd) {
      spec.kind = gslr::phantom_kind_from_string(kind);
      spec.grid = gslr::KGrid(pnx, pny);
      spec.edge_support = parse_support(edge);
      if (spec.grid.is_1d())
        spec.edge_support.fy = 1;
      const gslr::Synthetic s = gslr::make_synthetic(spec);
      gslr::Provenance prov{{"kind", kind}, {"seed", std::to_string(spec.seed)},
                            {"oversampling", std::to_string(spec.oversampling)}};
      gslr::write_array(ph_out + "_kspace.arr", gslr::to_array_file(s.kspace, gslr::DType::c128, prov));
      gslr::write_array(ph_out + "_image.arr", gslr::to_array_file(s.image, gslr::DType::c128, prov));
      gslr::write_array(ph_out + "_rho1.arr", gslr::to_array_file(spatial_part(s.pc_kspace), gslr::DType::c128, prov));
      gslr::write_array(ph_out + "_rho2.arr", gslr::to_array_file(spatial_part(s.pl_kspace), gslr::DType::c128, prov));
    } else if (*recon_cmd) {
      gslr::Settings settings;
      if (!config.empty())
        settings = gslr::load_settings(config);
      for (const auto &[k, v] : overrides)
        if (v)
          settings[k] = *v;
      const gslr::ReconJob job = gslr::job_from_settings(settings);
      out_dir = job.out;
      const gslr::RunReport report = gslr::run_recon(job);
      std::cout << report.metrics_json;
    } else if (*met_cmd) {
      const gslr::KArray a = gslr::to_karray(gslr::read_array(met_recon));
      const gslr::KArray b = gslr::to_karray(gslr::read_array(met_ref));
      std::printf("%.6f\n", gslr::snr_db(a, b));
    } else if (*exp_cmd) {
      const gslr::KArray a = gslr::to_karray(gslr::read_array(exp_in));
      std::optional<gslr::Window> w;
      const Eigen::ArrayXd img = gslr::combine_coils_sos(a);
      if (wmin || wmax)
        w = gslr::Window{wmin.value_or(0.0), wmax.value_or(img.maxCoeff())};
      gslr::export_grayscale(img, a.grid, exp_out, w);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!out_dir.empty())
      gslr::write_failure_record(out_dir, e.what());
    return 1;
  }
  return 0;
}
