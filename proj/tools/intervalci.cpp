// Batch front-end for the critical-value solvers, the limiting coverage
// functions, and the Monte Carlo power engine.
//
// Exit codes: 0 success, 2 input/domain error, 3 numerical/engine failure.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "intervalci/config.hpp"
#include "intervalci/csv.hpp"
#include "intervalci/limit_power.hpp"
#include "intervalci/mc_engine.hpp"
#include "intervalci/svg_plot.hpp"

namespace {

using namespace intervalci;

int resolve_threads(int flag_threads) {
  if (flag_threads > 0) return flag_threads;
  if (const char* env = std::getenv("INTERVALCI_THREADS")) {
    int v = 0;
    try {
      v = std::stoi(env);
    } catch (const std::exception&) {
      throw DomainError("INTERVALCI_THREADS must be a positive integer");
    }
    if (v <= 0) throw DomainError("INTERVALCI_THREADS must be a positive integer");
    return v;
  }
  return 0;  // engine decides
}

struct CritvalArgs {
  int ci = 1;
  double alpha = 0.0;
  std::string delta;
  double sigma_l = 0.0;
  double sigma_u = 0.0;
  double rho = 0.0;
};

int run_critval(const CritvalArgs& args) {
  const double delta = parse_extended_real(args.delta);
  const Alpha alpha(args.alpha);
  const double q = 1.0 - args.alpha;
  if (args.ci == 1) {
    const CritScalar r = solve_c1(delta, args.sigma_l, args.sigma_u, alpha);
    CsvTable t({"c", "residual"});
    t.add_row({fmt_g9(r.c), fmt_g9(r.residual)});
    std::cout << t.to_string();
  } else {
    const CritPair p = solve_c2(delta, args.sigma_l, args.sigma_u, Corr(args.rho), alpha);
    CsvTable t({"c_l", "c_u", "residual_1", "residual_2", "binding_1", "binding_2",
                "objective"});
    t.add_row({fmt_g9(p.c_l), fmt_g9(p.c_u), fmt_g9(p.prob1 - q), fmt_g9(p.prob2 - q),
               p.binding1 ? "1" : "0", p.binding2 ? "1" : "0", fmt_g9(p.objective)});
    std::cout << t.to_string();
  }
  return 0;
}

struct LimitArgs {
  std::string fn;
  std::vector<std::string> sigma{"1"};
  std::vector<std::string> mu{"0"};
  std::vector<std::string> psi{"0"};
  double sigma_l = 1.0;
  double sigma_u = 1.0;
  double rho = 1.0;
  double alpha = 0.05;
};

std::vector<double> parse_reals(const std::vector<std::string>& in) {
  std::vector<double> out;
  out.reserve(in.size());
  for (const auto& s : in) out.push_back(parse_extended_real(s));
  return out;
}

int run_limit(const LimitArgs& args) {
  const Alpha alpha(args.alpha);
  if (args.fn == "h") {
    const auto sigmas = parse_reals(args.sigma);
    const auto mus = parse_reals(args.mu);
    const auto psis = parse_reals(args.psi);
    CsvTable t({"sigma", "mu", "psi", "alpha", "value"});
    for (double s : sigmas)
      for (double m : mus)
        for (double p : psis)
          t.add_row({fmt_g9(s), fmt_g9(m), fmt_g9(p), fmt_g9(args.alpha),
                     fmt_g9(eval_h(s, m, p, alpha))});
    std::cout << t.to_string();
    return 0;
  }
  if (args.fn == "w") {
    const LimitSigmas sig(args.sigma_l, args.sigma_u, Corr(args.rho));
    const auto mus = parse_reals(args.mu);
    const auto psis = parse_reals(args.psi);
    CsvTable t({"sigma_l", "sigma_u", "rho", "mu", "psi", "alpha", "value"});
    for (double m : mus)
      for (double p : psis)
        t.add_row({fmt_g9(args.sigma_l), fmt_g9(args.sigma_u), fmt_g9(args.rho), fmt_g9(m),
                   fmt_g9(p), fmt_g9(args.alpha),
                   fmt_g9(eval_w(sig, DriftParams(m, p), alpha))});
    std::cout << t.to_string();
    return 0;
  }
  if (args.fn == "h-scan") {
    std::vector<double> sigmas;
    if (args.sigma.size() == 1 && args.sigma[0] == "1") {
      for (double s = 0.5; s <= 3.0 + 1e-12; s += 0.05) sigmas.push_back(s);
    } else {
      sigmas = parse_reals(args.sigma);
    }
    std::vector<double> mus = parse_reals(args.mu);
    std::vector<double> psis = parse_reals(args.psi);
    if (args.mu.size() == 1 && args.mu[0] == "0") mus = {0.0, 0.5, 1.0, 2.0};
    if (args.psi.size() == 1 && args.psi[0] == "0") psis = {0.0, 0.5, 1.0, 2.0, 5.0};
    std::vector<HGridPoint> grid;
    for (double s : sigmas)
      for (double m : mus)
        for (double p : psis) grid.push_back({s, m, p});
    const HScanReport report = h_monotonicity_scan(grid, alpha);
    CsvTable t({"sigma_lo", "sigma_hi", "mu", "psi", "h_lo", "h_hi"});
    for (const auto& v : report.violations)
      t.add_row({fmt_g9(v.sigma_lo), fmt_g9(v.sigma_hi), fmt_g9(v.mu), fmt_g9(v.psi),
                 fmt_g9(v.h_lo), fmt_g9(v.h_hi)});
    std::cout << t.to_string();
    std::cerr << "h-scan: " << report.pairs_checked << " pairs checked, "
              << report.violations.size() << " violations\n";
    return 0;
  }
  throw DomainError("unknown --fn '" + args.fn + "' (expected h, w, or h-scan)");
}

DgpSpec dgp_from_config(const ConfigFile& cfg) {
  DgpSpec spec;
  spec.theta_l = cfg.get_real("dgp", "theta_l");
  spec.theta_u = cfg.get_real("dgp", "theta_u");
  spec.sigma_l = cfg.get_real("dgp", "sigma_l");
  spec.sigma_u = cfg.get_real("dgp", "sigma_u");
  spec.rho = cfg.get_real("dgp", "rho");
  spec.noise_tau = cfg.get_real_or("dgp", "tau", 0.0);
  spec.sigma_lo_bound = cfg.get_real_or("dgp", "sigma_sq_lo", 0.01);
  spec.sigma_hi_bound = cfg.get_real_or("dgp", "sigma_sq_hi", 100.0);
  spec.delta_bar = cfg.get_real_or("dgp", "delta_bar", 100.0);
  spec.plugin_noise = cfg.get_bool_or("dgp", "plugin_noise", false);
  spec.noise_scale = cfg.get_real_or("dgp", "noise_scale", 1.0);
  spec.validate();
  return spec;
}

int run_power(const std::string& config_path, int flag_threads) {
  ConfigFile cfg = ConfigFile::parse_file(config_path);
  cfg.enforce_schema({
      {"experiment", {"ci", "alpha", "reps", "seed", "n", "output", "plot"}},
      {"dgp",
       {"theta_l", "theta_u", "sigma_l", "sigma_u", "rho", "tau", "sigma_sq_lo",
        "sigma_sq_hi", "delta_bar", "plugin_noise", "noise_scale"}},
      {"alternative", {"kind", "theta_bar", "psi"}},
  });

  const Alpha alpha(cfg.get_real("experiment", "alpha"));
  const std::int64_t reps = cfg.get_int("experiment", "reps");
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("experiment", "seed"));
  const auto n_grid = cfg.get_int_list("experiment", "n");
  const std::string output = cfg.get_string("experiment", "output");
  const std::string plot = cfg.get_string_or("experiment", "plot", "");

  std::vector<CiKind> kinds;
  for (std::int64_t k : cfg.get_int_list("experiment", "ci")) {
    if (k == 1)
      kinds.push_back(CiKind::ci1);
    else if (k == 2)
      kinds.push_back(CiKind::ci2);
    else
      throw DomainError("config: ci must list 1 and/or 2");
  }

  const DgpSpec spec = dgp_from_config(cfg);

  AlternativeSeq alt;
  const std::string kind = cfg.get_string("alternative", "kind");
  std::vector<double> psi_grid;
  if (kind == "fixed") {
    alt.kind = AlternativeSeq::Kind::fixed;
    alt.theta_bar = cfg.get_real("alternative", "theta_bar");
  } else if (kind == "local_lower" || kind == "local_upper") {
    alt.kind = kind == "local_lower" ? AlternativeSeq::Kind::local_lower
                                     : AlternativeSeq::Kind::local_upper;
    psi_grid = cfg.get_real_list("alternative", "psi");
  } else {
    throw DomainError("config: alternative kind must be fixed, local_lower, or local_upper");
  }

  const int threads = resolve_threads(flag_threads);

  CsvTable table({"ci_kind", "n", "psi", "theta", "cover_e", "cover_i", "diff", "mc_se",
                  "reps", "seed"});
  struct SeriesKey {
    std::string label;
    std::vector<double> x, ye, yi;
  };
  std::vector<SeriesKey> plot_data;
  for (CiKind ci : kinds) {
    const auto rows = power_curve(spec, alt, n_grid, psi_grid, ci, alpha, reps, seed, threads);
    for (const auto& row : rows) {
      const PowerPoint& pt = row.point;
      table.add_row({to_string(ci), fmt_int(pt.n), row.psi ? fmt_g9(*row.psi) : "",
                     fmt_g9(pt.theta), fmt_g9(pt.cover_rate_e), fmt_g9(pt.cover_rate_i),
                     fmt_g9(pt.cover_rate_e - pt.cover_rate_i), fmt_g9(pt.mc_se),
                     fmt_int(pt.reps), fmt_uint(pt.seed)});
    }
    if (!plot.empty() && alt.kind != AlternativeSeq::Kind::fixed) {
      for (const std::int64_t n : n_grid) {
        SeriesKey sk;
        sk.label = std::string(to_string(ci)) + " n=" + std::to_string(n);
        for (const auto& row : rows) {
          if (row.point.n != n || !row.psi) continue;
          sk.x.push_back(*row.psi);
          sk.ye.push_back(row.point.cover_rate_e);
          sk.yi.push_back(row.point.cover_rate_i);
        }
        plot_data.push_back(std::move(sk));
      }
    }
  }

  std::ofstream out(output, std::ios::binary);
  if (!out) throw DomainError("cannot open output file '" + output + "'");
  out << table.to_string();
  out.close();
  std::cerr << "wrote " << output << " (" << table.row_count() << " rows)\n";

  if (!plot.empty() && !plot_data.empty()) {
    static const char* colors[] = {"#1f6fb2", "#c23b22", "#2e8540", "#b58900"};
    std::vector<PlotSeries> series;
    int ci_idx = 0;
    for (const auto& sk : plot_data) {
      PlotSeries e{sk.label + " efficient", colors[ci_idx % 4], false, sk.x, sk.ye};
      PlotSeries i{sk.label + " inefficient", colors[(ci_idx + 1) % 4], true, sk.x, sk.yi};
      series.push_back(std::move(e));
      series.push_back(std::move(i));
      ci_idx += 2;
    }
    write_line_plot(plot, "coverage vs psi", "psi", "coverage", series);
    std::cerr << "wrote " << plot << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confidence intervals for interval-identified parameters"};
  app.require_subcommand(1);
  app.fallthrough();

  int flag_threads = 0;
  app.add_option("--threads", flag_threads,
                 "worker threads (overrides INTERVALCI_THREADS; 0 = auto)");

  CritvalArgs critval;
  CLI::App* cmd_critval = app.add_subcommand("critval", "solve critical values");
  cmd_critval->add_option("--ci", critval.ci, "interval type (1 or 2)")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  cmd_critval->add_option("--alpha", critval.alpha, "significance level")->required();
  cmd_critval->add_option("--delta", critval.delta, "scaled interval length, inf allowed")
      ->required();
  cmd_critval->add_option("--sigma-l", critval.sigma_l, "lower-bound sigma")->required();
  cmd_critval->add_option("--sigma-u", critval.sigma_u, "upper-bound sigma")->required();
  cmd_critval->add_option("--rho", critval.rho, "correlation (used by --ci 2)");

  LimitArgs limit;
  CLI::App* cmd_limit = app.add_subcommand("limit", "evaluate limiting coverage functions");
  cmd_limit->add_option("--fn", limit.fn, "h, w, or h-scan")->required();
  cmd_limit->add_option("--sigma", limit.sigma, "sigma grid (comma/space separated)")
      ->delimiter(',');
  cmd_limit->add_option("--mu", limit.mu, "mu grid, inf allowed")->delimiter(',');
  cmd_limit->add_option("--psi", limit.psi, "psi grid, inf allowed")->delimiter(',');
  cmd_limit->add_option("--sigma-l", limit.sigma_l, "sigma_l for fn=w");
  cmd_limit->add_option("--sigma-u", limit.sigma_u, "sigma_u for fn=w");
  cmd_limit->add_option("--rho", limit.rho, "rho for fn=w");
  cmd_limit->add_option("--alpha", limit.alpha, "significance level");

  std::string config_path;
  CLI::App* cmd_power = app.add_subcommand("power", "run a Monte Carlo power experiment");
  cmd_power->add_option("--config", config_path, "experiment configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_critval) return run_critval(critval);
    if (*cmd_limit) return run_limit(limit);
    if (*cmd_power) return run_power(config_path, flag_threads);
    return 2;
  } catch (const intervalci::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const intervalci::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
