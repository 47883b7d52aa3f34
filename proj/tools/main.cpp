#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bregman/config.hpp"
#include "bregman/hardness.hpp"
#include "bregman/stationarity.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;  // config / precondition / assumption failures
constexpr int kExitNumeric = 2;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  bool force = false;
  bool log_domain = false;
  std::optional<unsigned> seed;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_out_default) {
  cmd->add_option("--config", o.config_path, "Path to the JSON config")
      ->required();
  cmd->add_option("--out", o.out_path, "Output path");
  cmd->add_option("--format", o.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--force", o.force, "Run even if the assumption checks fail");
  cmd->add_flag("--log-domain", o.log_domain,
                "Keep Shannon-kernel iterates as logs");
  cmd->add_option_function<unsigned>(
      "--seed", [&o](unsigned s) { o.seed = s; },
      "Seed for generated instances and sweeps");
  (void)needs_out_default;
}

std::string fmt_double(double v) {
  char buf[40];
  auto [p, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, p);
}

int report_assumptions(const bregman::AssumptionReport& rep, bool force,
                       std::ostream& os) {
  os << "assumption checks:\n"
     << "  domain inclusion : " << (rep.domain_inclusion ? "pass" : "FAIL")
     << "  (" << rep.domain_note << ")\n"
     << "  strict interior  : " << (rep.strict_interior ? "pass" : "FAIL")
     << "  (" << rep.interior_note << ")\n"
     << "  well-posedness   : " << (rep.well_posed ? "pass" : "FAIL") << "  ("
     << rep.well_posed_note << ")\n";
  if (rep.all_pass()) return kExitOk;
  if (force) {
    os << "continuing under --force\n";
    return kExitOk;
  }
  return kExitUser;
}

int cmd_run(const CommonOpts& o) {
  auto cfg = bregman::load_config_file(o.config_path, o.seed);
  if (!cfg.problem)
    throw bregman::ConfigError("run: config carries no instance");
  const auto& problem = *cfg.problem;

  auto rep = bregman::check_assumptions(problem);
  if (report_assumptions(rep, o.force, std::cerr) != kExitOk) {
    std::cerr << "refusing to run (use --force to override)\n";
    return kExitUser;
  }

  bregman::RunConfig rc = cfg.run;
  if (o.log_domain) rc.mode = bregman::RunConfig::Mode::LogDomain;
  Eigen::VectorXd x0 = cfg.x0 ? *cfg.x0 : problem.x_interior;
  bregman::Trajectory traj = bregman::run(problem, x0, rc);

  std::string out_path =
      o.out_path.empty()
          ? (o.format == "csv" ? "trajectory.csv" : "trajectory.json")
          : o.out_path;
  std::ofstream out(out_path);
  if (!out) throw bregman::ConfigError("cannot open output file: " + out_path);
  if (o.format == "csv") bregman::write_csv(traj, out);
  else out << bregman::summary_json(traj) << "\n";
  std::cerr << "status=" << bregman::to_string(traj.status)
            << " iters=" << traj.iterations << " wrote " << out_path << "\n";
  if (traj.status == bregman::RunStatus::SolverError) {
    std::cerr << "solver error: " << traj.error << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_trap(const CommonOpts& o, const std::string& plot_script) {
  auto cfg = bregman::load_config_file(o.config_path, o.seed);

  std::optional<bregman::TrapResult> entropy, poly;
  bregman::TrapConfig tc;
  tc.eps = cfg.trap_eps;
  tc.t = cfg.t;
  tc.K = cfg.trap_K;
  tc.alpha = cfg.trap_alpha;
  tc.log_domain = o.log_domain;
  if (cfg.trap_entropy) {
    tc.instance = bregman::TrapConfig::Instance::Entropy;
    entropy = bregman::run_trap(tc);
  }
  if (cfg.trap_poly) {
    tc.instance = bregman::TrapConfig::Instance::Poly;
    tc.log_domain = false;
    poly = bregman::run_trap(tc);
  }

  for (const auto* r : {&entropy, &poly}) {
    if (r->has_value() &&
        (*r)->trajectory.status == bregman::RunStatus::SolverError) {
      std::cerr << "solver error: " << (*r)->trajectory.error << "\n";
      return kExitNumeric;
    }
  }

  std::string out_path = o.out_path.empty() ? "trap.csv" : o.out_path;
  std::ofstream out(out_path);
  if (!out) throw bregman::ConfigError("cannot open output file: " + out_path);
  out << "k";
  if (entropy) out << ",x1_entropy";
  if (poly) out << ",x1_poly";
  out << "\n";
  std::size_t rows = 0;
  if (entropy) rows = entropy->trajectory.points.size();
  if (poly) rows = std::max(rows, poly->trajectory.points.size());
  for (std::size_t i = 0; i < rows; ++i) {
    out << i;
    if (entropy && i < entropy->trajectory.points.size())
      out << "," << fmt_double(entropy->trajectory.points[i].x[0]);
    else if (entropy)
      out << ",";
    if (poly && i < poly->trajectory.points.size())
      out << "," << fmt_double(poly->trajectory.points[i].x[0]);
    else if (poly)
      out << ",";
    out << "\n";
  }
  out.close();

  if (entropy)
    std::cout << "entropy trapped: " << (entropy->trapped ? "true" : "false")
              << "\n";
  if (poly)
    std::cout << "poly trapped: " << (poly->trapped ? "true" : "false")
              << "  (per-step ball: " << (poly->ball_trapped ? "true" : "false")
              << ")\n";
  std::cerr << "wrote " << out_path << "\n";

  if (!plot_script.empty()) {
    std::ofstream ps(plot_script);
    ps << "#!/usr/bin/env python3\n"
          "import csv, sys\n"
          "import matplotlib.pyplot as plt\n"
          "path = sys.argv[1] if len(sys.argv) > 1 else "
       << std::quoted(out_path)
       << "\n"
          "rows = list(csv.DictReader(open(path)))\n"
          "ks = [int(r['k']) for r in rows]\n"
          "for col in rows[0]:\n"
          "    if col == 'k':\n"
          "        continue\n"
          "    ys = [float(r[col]) for r in rows if r[col]]\n"
          "    plt.semilogy(ks[:len(ys)], ys, label=col)\n"
          "plt.xlabel('k'); plt.ylabel('x1'); plt.legend()\n"
          "plt.savefig(path.rsplit('.', 1)[0] + '.png', dpi=150)\n";
    std::cerr << "wrote " << plot_script << "\n";
  }
  return kExitOk;
}

int cmd_scan(const CommonOpts& o) {
  auto cfg = bregman::load_config_file(o.config_path, o.seed);
  if (!cfg.problem)
    throw bregman::ConfigError("scan: config carries no instance");
  const auto& problem = *cfg.problem;

  std::vector<std::pair<Eigen::VectorXd, bregman::StationarityReport>> found;
  try {
    found = bregman::find_spurious_candidates(problem, cfg.t, cfg.scan_tol);
  } catch (const bregman::PreconditionError& e) {
    std::cerr << "scan refused: " << e.what() << "\n";
    return kExitUser;
  } catch (const bregman::NonCompactError& e) {
    std::cerr << "scan refused: " << e.what() << "\n";
    return kExitUser;
  } catch (const bregman::TooLargeError& e) {
    std::cerr << "scan refused: " << e.what() << "\n";
    return kExitUser;
  }

  nlohmann::json out = nlohmann::json::array();
  for (const auto& [vertex, rep] : found) {
    nlohmann::json item;
    item["vertex"] =
        std::vector<double>(vertex.data(), vertex.data() + vertex.size());
    item["report"] = nlohmann::json::parse(rep.to_json());
    out.push_back(item);
  }
  std::string text = out.dump(2);
  if (o.out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream f(o.out_path);
    if (!f) throw bregman::ConfigError("cannot open output: " + o.out_path);
    f << text << "\n";
    std::cerr << "wrote " << o.out_path << " (" << found.size()
              << " spurious points)\n";
  }
  return kExitOk;
}

int cmd_check(const CommonOpts& o) {
  auto cfg = bregman::load_config_file(o.config_path, o.seed);
  if (!cfg.problem)
    throw bregman::ConfigError("check: config carries no instance");
  auto rep = bregman::check_assumptions(*cfg.problem);
  return report_assumptions(rep, false, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bregman proximal methods, stationarity measures and "
               "spurious-point experiments"};
  app.require_subcommand(1);

  CommonOpts run_o, trap_o, scan_o, check_o;
  std::string plot_script;

  auto* run_cmd = app.add_subcommand("run", "Iterate an instance to a file");
  add_common(run_cmd, run_o, true);
  auto* trap_cmd =
      app.add_subcommand("trap", "Finite-step trap experiments near (0,1)");
  add_common(trap_cmd, trap_o, true);
  trap_cmd->add_option("--plot-script", plot_script,
                       "Also write a small matplotlib script");
  auto* scan_cmd =
      app.add_subcommand("scan", "Scan polytope vertices for spurious points");
  add_common(scan_cmd, scan_o, false);
  auto* check_cmd =
      app.add_subcommand("check", "Print the assumption report");
  add_common(check_cmd, check_o, false);

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return cmd_run(run_o);
    if (trap_cmd->parsed()) return cmd_trap(trap_o, plot_script);
    if (scan_cmd->parsed()) return cmd_scan(scan_o);
    if (check_cmd->parsed()) return cmd_check(check_o);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const bregman::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUser;
  } catch (const bregman::ConstructionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUser;
  } catch (const bregman::UnknownInstanceError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUser;
  } catch (const bregman::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUser;
}
