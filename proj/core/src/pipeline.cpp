#include "gslr/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "gslr/array_io.hpp"
#include "gslr/fft.hpp"

namespace gslr {

namespace {

using Json = nlohmann::json;

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string &key, const std::string &v)
{
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ContractError("setting '" + key + "': not a number: '" + v + "'");
  return out;
}

long long to_integer(const std::string &key, const std::string &v)
{
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ContractError("setting '" + key + "': not an integer: '" + v + "'");
  return out;
}

// "7" or "7x5" (fx x fy).
SupportSet to_filter(const std::string &key, const std::string &v)
{
  const auto x = v.find('x');
  if (x == std::string::npos) {
    const int n = static_cast<int>(to_integer(key, v));
    return filter_support(n, n);
  }
  return filter_support(static_cast<int>(to_integer(key, v.substr(0, x))),
                        static_cast<int>(to_integer(key, v.substr(x + 1))));
}

std::string filter_string(const SupportSet &s) { return std::to_string(s.fx) + "x" + std::to_string(s.fy); }

Json snr_json(double v)
{
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  return v;
}

KArray read_karray(const std::string &path) { return to_karray(read_array(path)); }

KArray single_channel(const KArray &x, int c)
{
  KArray out(x.grid, 1);
  out.data = x.channel(c);
  return out;
}

KArray real_array(const Eigen::ArrayXd &v, const KGrid &g)
{
  KArray out(g, 1);
  out.data = v.cast<cplx>();
  return out;
}

void put_channel(KArray &dst, int c, const KArray &src) { dst.channel(c) = src.data; }

} // namespace

Eigen::ArrayXd combine_coils_sos(const std::vector<KArray> &images)
{
  detail::require(!images.empty(), "combine_coils_sos: need at least one coil");
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(images.front().data.size()));
  for (const auto &im : images) {
    detail::require(im.same_shape(images.front()), "combine_coils_sos: coil shapes differ");
    acc += im.data.abs2();
  }
  return acc.sqrt();
}

Eigen::ArrayXd combine_coils_sos(const KArray &coils)
{
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(coils.grid.size()));
  for (int c = 0; c < coils.channels; ++c)
    acc += coils.channel(c).abs2();
  return acc.sqrt();
}

std::vector<std::uint8_t> grayscale_bytes(const Eigen::ArrayXd &image, const KGrid &grid, std::optional<Window> window)
{
  detail::require(static_cast<std::size_t>(image.size()) == grid.size(), "export_grayscale: image size does not match grid");
  detail::require(image.allFinite(), "export_grayscale: image is not finite");
  const Window w = window.value_or(Window{0.0, image.size() ? image.maxCoeff() : 0.0});
  const std::string header = "P5\n" + std::to_string(grid.nx) + " " + std::to_string(grid.ny) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + grid.size());
  const double span = w.max - w.min;
  for (double v : image) {
    double t = span > 0 ? (v - w.min) / span : (v >= w.max ? 1.0 : 0.0);
    t = std::clamp(t, 0.0, 1.0);
    out.push_back(static_cast<std::uint8_t>(std::lround(255.0 * t)));
  }
  return out;
}

void export_grayscale(const Eigen::ArrayXd &image, const KGrid &grid, const std::filesystem::path &path,
                      std::optional<Window> window)
{
  const auto bytes = grayscale_bytes(image, grid, window);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

double correlation(const KArray &a, const KArray &b)
{
  detail::require(a.data.size() == b.data.size() && a.data.size() > 0, "correlation: size mismatch");
  const Eigen::ArrayXcd x = a.data - a.data.mean();
  const Eigen::ArrayXcd y = b.data - b.data.mean();
  const double nx = std::sqrt(x.abs2().sum());
  const double ny = std::sqrt(y.abs2().sum());
  if (nx == 0.0 || ny == 0.0)
    return 0.0;
  return std::abs((x.conjugate() * y).sum()) / (nx * ny);
}

Settings parse_settings(const std::string &text)
{
  Settings out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractError("settings line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ContractError("settings line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Settings load_settings(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw ArrayFormatError(ArrayFormatError::Kind::not_found, "input not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_settings(ss.str());
}

std::vector<std::string> setting_keys()
{
  return {"lambda1", "lambda2", "p",       "filter1", "filter2", "gamma1", "gamma2", "outer_iters",
          "inner_iters", "admm_iters", "inner", "eps0",   "eps_eta", "mode", "seed",   "noise",
          "kspace",  "image",   "rho1",    "rho2",    "mask",    "out"};
}

ReconJob job_from_settings(const Settings &settings)
{
  ReconJob job;
  auto &c = job.solver;
  for (const auto &[k, v] : settings) {
    if (k == "lambda1")
      c.lambda1 = to_double(k, v);
    else if (k == "lambda2")
      c.lambda2 = to_double(k, v);
    else if (k == "p")
      c.p = to_double(k, v);
    else if (k == "filter1")
      c.filter1 = to_filter(k, v);
    else if (k == "filter2")
      c.filter2 = to_filter(k, v);
    else if (k == "gamma1")
      c.gamma1 = to_double(k, v);
    else if (k == "gamma2")
      c.gamma2 = to_double(k, v);
    else if (k == "outer_iters")
      c.outer_iters = static_cast<int>(to_integer(k, v));
    else if (k == "inner_iters" || k == "admm_iters")
      c.inner_iters = static_cast<int>(to_integer(k, v));
    else if (k == "inner")
      c.inner = inner_solver_from_string(v);
    else if (k == "eps0")
      c.eps0 = to_double(k, v);
    else if (k == "eps_eta")
      c.eps_eta = to_double(k, v);
    else if (k == "mode")
      c.mode = mode_from_string(v);
    else if (k == "seed")
      job.seed = static_cast<std::uint64_t>(to_integer(k, v));
    else if (k == "noise")
      job.noise = to_double(k, v);
    else if (k == "kspace")
      job.kspace = v;
    else if (k == "image")
      job.image = v;
    else if (k == "rho1")
      job.truth_rho1 = v;
    else if (k == "rho2")
      job.truth_rho2 = v;
    else if (k == "mask")
      job.mask = v;
    else if (k == "out")
      job.out = v;
    else
      throw ContractError("unknown setting '" + k + "'");
  }
  detail::require(job.noise >= 0.0, "noise must be non-negative");
  c.validate();
  return job;
}

RunReport run_recon(const std::filesystem::path &config) { return run_recon(job_from_settings(load_settings(config))); }

RunReport run_recon(const ReconJob &job)
{
  detail::require(!job.mask.empty(), "run_recon: a mask path is required");
  detail::require(!job.kspace.empty() || !job.image.empty(), "run_recon: need kspace or image");
  for (const auto &p : {job.mask, job.kspace, job.image, job.truth_rho1, job.truth_rho2})
    if (!p.empty() && !std::filesystem::exists(p))
      throw ArrayFormatError(ArrayFormatError::Kind::not_found, "input not found: " + p);

  const Mask mask = to_mask(read_array(job.mask));
  const KGrid grid = mask.grid;

  std::optional<KArray> truth_img;
  if (!job.image.empty()) {
    truth_img = read_karray(job.image);
    detail::require(truth_img->grid == grid, "run_recon: image grid does not match mask");
  }

  KArray b;
  if (!job.kspace.empty()) {
    b = apply_mask(read_karray(job.kspace), mask);
    detail::require(b.grid == grid, "run_recon: kspace grid does not match mask");
  } else {
    const KArray truth_hat = fft2_unitary(*truth_img);
    const double peak = truth_hat.data.abs().maxCoeff();
    b = measure(truth_hat, mask, NoiseModel{job.noise * peak, job.seed});
  }
  if (truth_img)
    detail::require(truth_img->channels == b.channels, "run_recon: image and kspace coil counts differ");

  ReconConfig cfg = job.solver;
  if (grid.is_1d()) {
    cfg.filter1.fy = 1;
    cfg.filter2.fy = 1;
  }

  const int coils = b.channels;
  std::vector<std::future<ReconResult>> jobs;
  for (int c = 0; c < coils; ++c) {
    jobs.push_back(std::async(std::launch::async, [&, c] {
      const KArray bc = single_channel(b, c);
      if (truth_img) {
        const KArray th = fft2_unitary(single_channel(*truth_img, c));
        return irls_reconstruct(bc, mask, cfg, &th);
      }
      return irls_reconstruct(bc, mask, cfg);
    }));
  }
  std::vector<ReconResult> results;
  for (auto &f : jobs)
    results.push_back(f.get());

  KArray rho(grid, coils), rho1(grid, coils), rho2(grid, coils);
  for (int c = 0; c < coils; ++c) {
    put_channel(rho, c, results[c].rho);
    put_channel(rho1, c, results[c].rho1);
    put_channel(rho2, c, results[c].rho2);
  }

  const std::filesystem::path out = job.out;
  std::filesystem::create_directories(out);
  RunReport report;
  Provenance prov{{"mode", to_string(cfg.mode)}, {"coils", std::to_string(coils)}};
  auto write = [&](const std::string &name, const ArrayFile &f) {
    write_array(out / name, f);
    report.written.push_back(out / name);
  };
  auto pgm = [&](const std::string &name, const Eigen::ArrayXd &img) {
    export_grayscale(img, grid, out / name);
    report.written.push_back(out / name);
  };

  prov["component"] = "rho";
  write("rho.arr", to_array_file(rho, DType::c128, prov));
  prov["component"] = "rho1";
  write("rho1.arr", to_array_file(rho1, DType::c128, prov));
  prov["component"] = "rho2";
  write("rho2.arr", to_array_file(rho2, DType::c128, prov));
  pgm("rho.pgm", combine_coils_sos(rho));
  pgm("rho1.pgm", combine_coils_sos(rho1));
  pgm("rho2.pgm", combine_coils_sos(rho2));

  Json m;
  m["status"] = "ok";
  m["mode"] = to_string(cfg.mode);
  m["coils"] = coils;
  m["coil_combination"] = "independent per-coil reconstruction, sum-of-squares combine";
  m["samples"] = mask.count();
  m["acceleration"] = acceleration(mask);
  m["config"] = {{"lambda1", cfg.lambda1},         {"lambda2", cfg.lambda2},       {"p", cfg.p},
                 {"filter1", filter_string(cfg.filter1)}, {"filter2", filter_string(cfg.filter2)},
                 {"gamma1", cfg.gamma1},           {"gamma2", cfg.gamma2},         {"outer_iters", cfg.outer_iters},
                 {"inner_iters", cfg.inner_iters},   {"eps0", cfg.eps0},             {"eps_eta", cfg.eps_eta},
                 {"inner", to_string(cfg.inner)},  {"noise", job.noise},           {"seed", job.seed}};

  Json hist = Json::array();
  for (const auto &r : results) {
    Json h = Json::array();
    for (const auto &rec : r.history)
      h.push_back(rec.objective);
    hist.push_back(h);
  }
  m["objective_history"] = hist;

  if (truth_img) {
    Json per = Json::array();
    for (const auto &r : results)
      per.push_back(snr_json(r.snr.value_or(std::numeric_limits<double>::quiet_NaN())));
    m["snr_db_per_coil"] = per;
    const double snr = coils == 1 ? snr_db(rho, *truth_img)
                                  : snr_db(real_array(combine_coils_sos(rho), grid),
                                           real_array(combine_coils_sos(*truth_img), grid));
    m["snr_db"] = snr_json(snr);
    m["snr_reference"] = coils == 1 ? "complex image" : "sum-of-squares magnitude";

    KArray err(grid, coils);
    err.data = rho.data - truth_img->data;
    const Eigen::ArrayXd emap = combine_coils_sos(err);
    prov["component"] = "error";
    write("error.arr", to_array_file(emap, grid, prov));
    pgm("error.pgm", emap);
  }

  if (!job.truth_rho1.empty() || !job.truth_rho2.empty()) {
    Json d;
    const auto corr = [&](const KArray &rec, const std::string &path) { return correlation(rec, read_karray(path)); };
    if (!job.truth_rho1.empty()) {
      d["rho1_vs_truth_rho1"] = corr(rho1, job.truth_rho1);
      d["rho2_vs_truth_rho1"] = corr(rho2, job.truth_rho1);
    }
    if (!job.truth_rho2.empty()) {
      d["rho1_vs_truth_rho2"] = corr(rho1, job.truth_rho2);
      d["rho2_vs_truth_rho2"] = corr(rho2, job.truth_rho2);
    }
    m["decomposition"] = d;
  }

  report.metrics_json = m.dump(2) + "\n";
  std::ofstream mf(out / "metrics.json", std::ios::binary | std::ios::trunc);
  mf << report.metrics_json;
  report.written.push_back(out / "metrics.json");
  return report;
}

void write_failure_record(const std::filesystem::path &out_dir, const std::string &message)
{
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  Json m{{"status", "error"}, {"message", message}};
  std::ofstream mf(out_dir / "metrics.json", std::ios::binary | std::ios::trunc);
  mf << m.dump(2) << "\n";
}

} // namespace gslr
