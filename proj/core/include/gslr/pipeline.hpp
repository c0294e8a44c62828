#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gslr/grid.hpp"
#include "gslr/solver.hpp"

namespace gslr {

/// Pointwise sqrt(sum_c |x_c|^2) over a list of single-channel spatial images.
Eigen::ArrayXd combine_coils_sos(const std::vector<KArray> &images);
/// Same, over the channels of one array.
Eigen::ArrayXd combine_coils_sos(const KArray &coils);

struct Window
{
  double min = 0.0;
  double max = 1.0;
};

/// P5 bytes, linear window to 0..255 (default [0, max]; a flat window maps to 255).
std::vector<std::uint8_t> grayscale_bytes(const Eigen::ArrayXd &image, const KGrid &grid,
                                          std::optional<Window> window = std::nullopt);
void export_grayscale(const Eigen::ArrayXd &image, const KGrid &grid, const std::filesystem::path &path,
                      std::optional<Window> window = std::nullopt);

/// |<a - mean a, b - mean b>| / (|a - mean a| |b - mean b|) over complex entries.
double correlation(const KArray &a, const KArray &b);

using Settings = std::map<std::string, std::string>;

/// Flat `key = value` text; '#' starts a comment, blank lines are skipped.
Settings parse_settings(const std::string &text);
Settings load_settings(const std::filesystem::path &path);

///
/// One reconstruction job. Paths:
///   kspace  measured k-space, one channel per coil (optional)
///   image   ground-truth spatial image; simulated through mask + noise when
///           kspace is absent, and used for SNR / error map when present
///   rho1, rho2  ground-truth components for the decomposition metrics (optional)
///   mask    sampling mask (required)
///   out     output directory
///
struct ReconJob
{
  ReconConfig solver;
  std::string kspace;
  std::string image;
  std::string truth_rho1;
  std::string truth_rho2;
  std::string mask;
  std::string out = "out";
  double noise = 0.0; // std relative to max |rho_hat| of the truth
  std::uint64_t seed = 0;
};

/// Unknown keys and unparsable values raise ContractError.
ReconJob job_from_settings(const Settings &settings);
std::vector<std::string> setting_keys();

struct RunReport
{
  std::string metrics_json;
  std::vector<std::filesystem::path> written;
};

///
/// Reads inputs, reconstructs each coil independently, and writes rho, rho1,
/// rho2 (c128, one channel per coil), the error map when a truth is given,
/// metrics.json and PGM exports of the sum-of-squares magnitudes into job.out.
/// Missing inputs raise ArrayFormatError with "input not found".
///
RunReport run_recon(const ReconJob &job);
RunReport run_recon(const std::filesystem::path &config);

/// Diagnostic record written to <out>/metrics.json when a run fails.
void write_failure_record(const std::filesystem::path &out_dir, const std::string &message);

} // namespace gslr
