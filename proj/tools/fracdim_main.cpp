// fracdim: estimate fractal dimension and fractal curvatures of a planar set
// from a binary image, via the intrinsic volumes of its dilations.
//
// Pipeline: generate (IFS raster) -> measure (series CSV) -> estimate
// (report + result CSV); periodogram / lab / report are auxiliary stages.
// Exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracdim/fracdim.hpp"

namespace fd = fracdim;

namespace {

std::vector<int> parse_index_set(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (tok != "0" && tok != "1" && tok != "2")
      throw fd::DataError("J must be a comma list drawn from {0,1,2}");
    out.push_back(tok[0] - '0');
  }
  if (out.empty()) throw fd::DataError("empty J");
  return out;
}

fd::RadiiSchedule schedule_from_flags(double x_from, double x_to, double x_step,
                                      const std::string& radii, int stoyan,
                                      double min_radius) {
  fd::RadiiSchedule sched;
  if (!radii.empty()) {
    std::vector<double> rs;
    std::stringstream ss(radii);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) rs.push_back(std::stod(tok));
    }
    sched = fd::explicit_schedule(rs);
  } else if (stoyan > 0) {
    sched = fd::stoyan_schedule(stoyan);
  } else {
    sched = fd::log_range_schedule(x_to, x_from, x_step);
  }
  if (!sched.eps.empty() && sched.eps.back() < min_radius)
    std::cerr << "warning: smallest radius " << sched.eps.back() << " px is below the "
              << min_radius << " px minimum; discretization error grows quickly there\n";
  return sched;
}

fd::IfsSystem load_system(const std::string& spec) {
  for (const auto& name : fd::preset_names())
    if (spec == name) return fd::preset_ifs(spec);
  std::ifstream in(spec);
  if (!in) throw fd::DataError("unknown preset and unreadable IFS config: " + spec);
  auto slash = spec.find_last_of('/');
  return fd::parse_ifs_config(in, slash == std::string::npos ? spec : spec.substr(slash + 1));
}

fd::RasterRule parse_rule(const std::string& name) {
  if (name == "cover") return fd::RasterRule::CoverClosedSquare;
  if (name == "thin") return fd::RasterRule::CenterSample;
  if (name == "core") return fd::RasterRule::MeasureCore;
  throw fd::DataError("digitization must be cover, thin or core");
}

int cmd_generate(const std::string& system_spec, int side, int pad, const std::string& out_path,
                 bool ascii, std::optional<int> depth, const std::string& rule) {
  const fd::IfsSystem sys = load_system(system_spec);
  const fd::DepthPolicy policy =
      depth ? fd::DepthPolicy::fixed(*depth) : fd::DepthPolicy::automatic();
  fd::BinaryImage img = fd::rasterize(sys, side, policy, std::int64_t(1) << 26, parse_rule(rule));
  if (pad > 0) {
    fd::BinaryImage padded(side + 2 * pad, side + 2 * pad);
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x)
        if (img.at(x, y)) padded.set(x + pad, y + pad, 1);
    img = std::move(padded);
  }
  fd::write_image(img, out_path, ascii);
  const double s = fd::similarity_dimension(sys);
  const auto cls = fd::classify_arithmeticity(sys);
  std::cout << "wrote " << out_path << " (" << img.width << "x" << img.height << ", "
            << img.count_black() << " black pixels)\n";
  std::cout << "similarity dimension = " << fd::format_g17(s) << "\n";
  if (cls.arithmetic())
    std::cout << "arithmetic, h = " << fd::format_g17(cls.h) << "\n";
  else
    std::cout << "non-arithmetic\n";
  return 0;
}

int cmd_measure(const std::string& image_path, const fd::RadiiSchedule& sched,
                const std::string& out_csv, int max_side) {
  const fd::BinaryImage img = fd::read_image(image_path, max_side);
  fd::MeasureWarnings warn;
  fd::CurvatureSeries series = fd::measure_series(img, sched, &warn);
  if (warn.border_contact)
    std::cerr << "warning: largest dilation touches the canvas border (margin "
              << warn.margin_px << " px < eps " << sched.eps.front()
              << "); C0 and C1 will be biased\n";
  const fd::CurvatureSeries validated = fd::validate_signs(series);
  for (int k = 0; k < 3; ++k)
    if (validated.excluded[size_t(k)])
      std::cerr << "warning: C_" << k
                << " violates the fixed-sign assumption (or vanishes too often); "
                   "estimation will exclude it\n";
  fd::write_series_csv(series, out_csv);
  std::cout << "wrote " << out_csv << " (" << series.entries.size() << " radii)\n";
  return 0;
}

int cmd_estimate(const std::string& series_csv, const fd::EstimateOptions& opt,
                 const std::string& out_csv, const std::string& image_path,
                 const std::string& pgram_csv, int max_side) {
  const fd::CurvatureSeries series = fd::read_series_csv(series_csv);
  fd::EstimationResult res = fd::run_estimate(series, opt);
  if (!image_path.empty()) {
    const fd::BinaryImage img = fd::read_image(image_path, max_side);
    std::vector<int> deltas;
    for (int d = 2; d <= std::min(img.width, img.height) / 8; d *= 2) deltas.push_back(d);
    if (deltas.size() >= 3) res.box_count = fd::box_count_dimension(img, deltas);
  }
  if (!pgram_csv.empty()) {
    const fd::CurvatureSeries validated = fd::validate_signs(series);
    std::vector<int> J;
    for (int k = 0; k < 3; ++k)
      if (!validated.excluded[size_t(k)]) J.push_back(k);
    const fd::RegressionData data = fd::to_regression(validated, J);
    if (data.n() >= 8) {
      const double step = data.x[1] - data.x[0];
      const auto resid = fd::detrended_residuals(data, fd::lre_fit(data));
      const fd::Periodogram pg = fd::periodogram(resid, step, opt.pad_factor);
      std::ofstream out(pgram_csv);
      if (!out) throw fd::DataError("cannot open output file: " + pgram_csv);
      out << "freq,power\n";
      for (size_t i = 0; i < pg.t.size(); ++i)
        out << fd::format_g17(pg.t[i] / (2.0 * fd::kPi * pg.x_step)) << ','
            << fd::format_g17(pg.power[i]) << '\n';
    }
  }
  std::cout << fd::render_report(res);
  if (!out_csv.empty()) {
    fd::write_result_csv(res, out_csv);
    std::cout << "wrote " << out_csv << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractal dimension and fractal curvatures from binary images"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "rasterize an IFS attractor to a PBM image");
  std::string gen_system, gen_out = "out.pbm";
  int gen_side = 1024, gen_pad = 0;
  bool gen_ascii = false;
  std::string gen_rule = "cover";
  int gen_depth = -1;
  gen->add_option("system", gen_system, "preset name or IFS config file")->required();
  gen->add_option("side", gen_side, "fractal scale in pixels")->required();
  gen->add_option("-o,--out", gen_out, "output PBM path");
  gen->add_option("--pad", gen_pad, "white canvas padding in pixels (margin for dilations)");
  gen->add_option("--depth", gen_depth, "fixed subdivision depth (default: auto, sub-pixel)");
  gen->add_flag("--ascii", gen_ascii, "write plain P1 instead of raw P4");
  gen->add_option("--digitization", gen_rule,
                  "cover (closed-square Gauss rule, default) | thin (center sample) | "
                  "core (positive-measure core, the limit of point-plotted images)");

  // measure
  auto* mea = app.add_subcommand("measure", "measure intrinsic volumes over a radii schedule");
  std::string mea_image, mea_out = "series.csv", mea_radii;
  double mea_xfrom = 1.0, mea_xto = 4.5, mea_xstep = 0.02, mea_minr = 2.0;
  int mea_stoyan = 0, mea_maxside = 8192;
  mea->add_option("image", mea_image, "input PBM image")->required();
  mea->add_option("-o,--out", mea_out, "output series CSV");
  mea->add_option("--log-eps-min", mea_xfrom, "smallest log(eps) (default 1.0)");
  mea->add_option("--log-eps-max", mea_xto, "largest log(eps) (default 4.5)");
  mea->add_option("--log-step", mea_xstep, "log(eps) grid step (default 0.02)");
  mea->add_option("--radii", mea_radii, "explicit comma-separated radii (overrides the grid)");
  mea->add_option("--stoyan", mea_stoyan, "use the first n equal-area (Stoyan) radii");
  mea->add_option("--min-radius", mea_minr, "warn when radii fall below this (px)");
  mea->add_option("--max-side", mea_maxside, "maximum accepted image side");

  // estimate
  auto* est = app.add_subcommand("estimate", "fit dimension and curvatures from a series CSV");
  std::string est_series, est_out, est_image, est_pgram, est_J, est_method = "auto",
                          est_mode = "simultaneous";
  int est_m = 4, est_pad = 10, est_maxside = 8192;
  double est_h0 = 0.0, est_knowns = 0.0, est_thresh = 5.0;
  bool est_majority = false;
  est->add_option("series", est_series, "input series CSV")->required();
  est->add_option("--method", est_method, "lre | nre | auto (default auto)");
  est->add_option("--J", est_J, "comma list of curvature indices, e.g. 0,1,2");
  est->add_option("--m", est_m, "Fourier detail level (0 = estimate from the periodogram)");
  est->add_option("--h0", est_h0, "known period on the log scale");
  est->add_option("--known-s", est_knowns, "hold the dimension fixed at this value");
  est->add_option("--mode", est_mode, "simultaneous | separate (NRE)");
  est->add_option("--period-threshold", est_thresh,
                  "periodogram max/median needed to accept a period (default 5)");
  est->add_option("--pad", est_pad, "periodogram zero-padding factor (default 10)");
  est->add_flag("--majority-sign", est_majority, "keep majority-sign samples instead of "
                                                 "excluding mixed-sign indices");
  est->add_option("-o,--out", est_out, "result CSV path");
  est->add_option("--image", est_image, "original image, adds a box-counting comparison");
  est->add_option("--periodogram-out", est_pgram, "write the residual periodogram CSV");
  est->add_option("--max-side", est_maxside, "maximum accepted image side");

  // periodogram
  auto* pgr = app.add_subcommand("periodogram", "residual periodogram of a series CSV");
  std::string pgr_series, pgr_out = "periodogram.csv";
  int pgr_pad = 10;
  pgr->add_option("series", pgr_series, "input series CSV")->required();
  pgr->add_option("-o,--out", pgr_out, "output CSV (freq in cycles per log-radius unit)");
  pgr->add_option("--pad", pgr_pad, "zero-padding factor (default 10)");

  // lab
  auto* lab = app.add_subcommand("lab", "Monte Carlo consistency experiments");
  auto* lab_lre = lab->add_subcommand("lre", "RMSE / exceedance of the linear estimator");
  std::string ll_schedule = "power", ll_error = "iid", ll_n = "50,100,200,400",
              ll_out = "lab_lre.csv";
  double ll_s = 1.5, ll_c = 1.0, ll_delta = 0.4, ll_a0 = 0.0, ll_a = 1.0, ll_sigma = 0.1,
         ll_eps = 0.05;
  std::string ll_beta = "0.3,0.5,0.7";
  int ll_trials = 500, ll_window = 5;
  std::uint64_t ll_seed = 1;
  lab_lre->add_option("--schedule", ll_schedule, "power | arithmetic");
  lab_lre->add_option("--c", ll_c, "power schedule scale");
  lab_lre->add_option("--delta", ll_delta, "power schedule exponent");
  lab_lre->add_option("--a0", ll_a0, "arithmetic schedule offset");
  lab_lre->add_option("--a", ll_a, "arithmetic schedule step");
  lab_lre->add_option("--s", ll_s, "true dimension");
  lab_lre->add_option("--beta", ll_beta, "true intercepts beta0,beta1,beta2");
  lab_lre->add_option("--error", ll_error, "iid | ma");
  lab_lre->add_option("--sigma", ll_sigma, "error scale");
  lab_lre->add_option("--window", ll_window, "moving-average window");
  lab_lre->add_option("--n", ll_n, "comma list of sample counts");
  lab_lre->add_option("--trials", ll_trials, "trials per n");
  lab_lre->add_option("--eps", ll_eps, "exceedance radius");
  lab_lre->add_option("--seed", ll_seed, "RNG seed");
  lab_lre->add_option("-o,--out", ll_out, "report CSV");

  auto* lab_nor = lab->add_subcommand("normality", "standardized-statistic law under iid errors");
  std::string ln_out = "lab_normality.csv", ln_t = "1,0,0,0";
  double ln_sigma = 0.1, ln_s = 1.5;
  std::string ln_beta = "0.3,0.5,0.7";
  int ln_n = 1000, ln_trials = 2000;
  std::uint64_t ln_seed = 1;
  lab_nor->add_option("--n", ln_n, "samples per trial");
  lab_nor->add_option("--trials", ln_trials, "trial count");
  lab_nor->add_option("--sigma", ln_sigma, "error scale");
  lab_nor->add_option("--s", ln_s, "true dimension");
  lab_nor->add_option("--beta", ln_beta, "true intercepts");
  lab_nor->add_option("--t", ln_t, "contrast vector t (4 components)");
  lab_nor->add_option("--seed", ln_seed, "RNG seed");
  lab_nor->add_option("-o,--out", ln_out, "report CSV");

  // volumes
  auto* vol = app.add_subcommand("volumes", "intrinsic volumes of images, one CSV row each");
  std::vector<std::string> vol_images;
  std::string vol_out;
  int vol_maxside = 8192;
  vol->add_option("images", vol_images, "input PBM images")->required();
  vol->add_option("-o,--out", vol_out, "output CSV (default stdout)");
  vol->add_option("--max-side", vol_maxside, "maximum accepted image side");

  // report
  auto* rep = app.add_subcommand("report", "pretty-print a result CSV");
  std::string rep_csv;
  rep->add_option("result", rep_csv, "result CSV from estimate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // --help exits 0, usage errors exit 1
  }

  try {
    if (gen->parsed()) {
      std::optional<int> depth;
      if (gen_depth >= 0) depth = gen_depth;
      return cmd_generate(gen_system, gen_side, gen_pad, gen_out, gen_ascii, depth, gen_rule);
    }
    if (mea->parsed()) {
      const auto sched =
          schedule_from_flags(mea_xfrom, mea_xto, mea_xstep, mea_radii, mea_stoyan, mea_minr);
      return cmd_measure(mea_image, sched, mea_out, mea_maxside);
    }
    if (est->parsed()) {
      fd::EstimateOptions opt;
      opt.method = est_method;
      if (!est_J.empty()) opt.J = parse_index_set(est_J);
      opt.m = est_m;
      if (est->count("--h0") > 0) opt.h0 = est_h0;
      if (est->count("--known-s") > 0) opt.known_s = est_knowns;
      if (est_mode == "separate")
        opt.mode = fd::NreMode::Separate;
      else if (est_mode != "simultaneous")
        throw fd::DataError("mode must be simultaneous or separate");
      if (est_method != "lre" && est_method != "nre" && est_method != "auto")
        throw fd::DataError("method must be lre, nre or auto");
      opt.period_threshold = est_thresh;
      opt.pad_factor = est_pad;
      opt.majority_sign_mode = est_majority;
      return cmd_estimate(est_series, opt, est_out, est_image, est_pgram, est_maxside);
    }
    if (pgr->parsed()) {
      const fd::CurvatureSeries series = fd::read_series_csv(pgr_series);
      const fd::CurvatureSeries validated = fd::validate_signs(series);
      std::vector<int> J;
      for (int k = 0; k < 3; ++k)
        if (!validated.excluded[size_t(k)]) J.push_back(k);
      const fd::RegressionData data = fd::to_regression(validated, J);
      if (data.n() < 8) throw fd::DataError("periodogram: series shorter than 8");
      const double step = data.x[1] - data.x[0];
      for (int j = 2; j < data.n(); ++j)
        if (std::abs((data.x[size_t(j)] - data.x[size_t(j) - 1]) - step) > 1e-9 * step)
          throw fd::DataError("periodogram: schedule is not log-arithmetic");
      const auto resid = fd::detrended_residuals(data, fd::lre_fit(data));
      const fd::Periodogram pg = fd::periodogram(resid, step, pgr_pad);
      std::ofstream out(pgr_out);
      if (!out) throw fd::DataError("cannot open output file: " + pgr_out);
      out << "freq,power\n";
      for (size_t i = 0; i < pg.t.size(); ++i)
        out << fd::format_g17(pg.t[i] / (2.0 * fd::kPi * pg.x_step)) << ','
            << fd::format_g17(pg.power[i]) << '\n';
      const int m_hat = fd::estimate_m(pg);
      const auto pe = fd::estimate_period(pg, std::max(1, m_hat));
      std::cout << "wrote " << pgr_out << "\n";
      std::cout << "max/median power = " << pe.peak_ratio << ", m_hat = " << m_hat << "\n";
      if (pe.significant)
        std::cout << "estimated period h0 = " << fd::format_g17(pe.h0) << "\n";
      else
        std::cout << "no significant period\n";
      return 0;
    }
    if (lab_lre->parsed()) {
      auto parse3 = [](const std::string& s) {
        std::array<double, 3> v{};
        std::stringstream ss(s);
        std::string tok;
        for (int i = 0; i < 3; ++i) {
          if (!std::getline(ss, tok, ',')) throw fd::DataError("beta needs 3 components");
          v[size_t(i)] = std::stod(tok);
        }
        return v;
      };
      const auto beta = parse3(ll_beta);
      fd::LabSchedule sched = ll_schedule == "arithmetic"
                                  ? fd::LabSchedule::arithmetic(ll_a0, ll_a)
                                  : fd::LabSchedule::power(ll_c, ll_delta);
      fd::ErrorModel err = ll_error == "ma"
                               ? fd::ErrorModel::moving_average(ll_sigma, ll_window, ll_seed)
                               : fd::ErrorModel::iid(ll_sigma, ll_seed);
      std::vector<int> ns;
      std::stringstream ss(ll_n);
      std::string tok;
      while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
      const fd::TrialReport rep2 = fd::simulate_lre(beta, ll_s, sched, err, ns, ll_trials, ll_eps);
      std::ofstream out(ll_out);
      if (!out) throw fd::DataError("cannot open output file: " + ll_out);
      out << "n,rmse_s,rmse_beta0,rmse_beta1,rmse_beta2,exceed_freq,bound\n";
      for (const auto& r : rep2.rows)
        out << r.n << ',' << fd::format_g17(r.rmse_s) << ',' << fd::format_g17(r.rmse_beta[0])
            << ',' << fd::format_g17(r.rmse_beta[1]) << ',' << fd::format_g17(r.rmse_beta[2])
            << ',' << fd::format_g17(r.exceed_freq) << ',' << fd::format_g17(r.bound) << '\n';
      std::cout << "wrote " << ll_out << "\n";
      std::cout << "exceedance monotone in n: " << (rep2.exceedance_monotone ? "yes" : "no")
                << "\n";
      return 0;
    }
    if (lab_nor->parsed()) {
      std::array<double, 3> beta{};
      std::array<double, 4> tvec{};
      {
        std::stringstream ss(ln_beta);
        std::string tok;
        for (int i = 0; i < 3; ++i) {
          if (!std::getline(ss, tok, ',')) throw fd::DataError("beta needs 3 components");
          beta[size_t(i)] = std::stod(tok);
        }
        std::stringstream st(ln_t);
        for (int i = 0; i < 4; ++i) {
          if (!std::getline(st, tok, ',')) throw fd::DataError("t needs 4 components");
          tvec[size_t(i)] = std::stod(tok);
        }
      }
      const auto rep2 = fd::simulate_normality(beta, ln_s, fd::LabSchedule::arithmetic(0.0, 1.0),
                                               ln_sigma, ln_n, ln_trials, tvec, ln_seed);
      std::ofstream out(ln_out);
      if (!out) throw fd::DataError("cannot open output file: " + ln_out);
      out << "decile,empirical,normal\n";
      for (int d = 0; d < 9; ++d)
        out << (d + 1) * 10 << ',' << fd::format_g17(rep2.deciles[size_t(d)]) << ','
            << fd::format_g17(rep2.normal_deciles[size_t(d)]) << '\n';
      std::cout << "wrote " << ln_out << "\n";
      std::cout << "max decile error = " << rep2.max_decile_error
                << ", KS = " << rep2.ks_statistic << "\n";
      return 0;
    }
    if (vol->parsed()) {
      std::ostringstream csv;
      csv << "path,c0,c1,c2\n";
      for (const auto& path : vol_images) {
        const auto v = fd::intrinsic_volumes(fd::read_image(path, vol_maxside));
        csv << path << ',' << v.c0 << ',' << fd::format_g17(v.c1) << ','
            << fd::format_g17(v.c2) << '\n';
      }
      if (vol_out.empty()) {
        std::cout << csv.str();
      } else {
        std::ofstream out(vol_out);
        if (!out) throw fd::DataError("cannot open output file: " + vol_out);
        out << csv.str();
        std::cout << "wrote " << vol_out << "\n";
      }
      return 0;
    }
    if (rep->parsed()) {
      std::ifstream in(rep_csv);
      if (!in) throw fd::DataError("cannot open result CSV: " + rep_csv);
      std::cout << fd::render_report_from_csv(in);
      return 0;
    }
  } catch (const fd::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fd::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
