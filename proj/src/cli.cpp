#include "semlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "semlab/ax.hpp"
#include "semlab/basis.hpp"
#include "semlab/bench.hpp"
#include "semlab/int_list.hpp"
#include "semlab/oracle.hpp"
#include "semlab/perf_model.hpp"
#include "semlab/solver.hpp"

namespace semlab {

namespace {

using nlohmann::json;

constexpr double kVerifyTolerance = 1e-12;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (format == a) return;
  throw UsageError("unsupported --format '" + format + "'");
}

std::vector<int> degree_list(const std::string& text) {
  std::vector<int> out;
  for (auto v : parse_int_list(text)) {
    if (v < 1 || v > SpectralBasis::kMaxDegree)
      throw UsageError("degree " + std::to_string(v) + " outside [1, 31]");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Integral values print as JSON integers ("t_max": 4).
json number_json(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15)
    return static_cast<std::int64_t>(v);
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json report_json(const ModelReport& r) {
  json j = {{"degree", r.degree},
            {"feasible", true},
            {"adds", r.cost.adds},
            {"mults", r.cost.mults},
            {"flops_per_dof", r.cost.flops()},
            {"loads", r.traffic.loads},
            {"writes", r.traffic.writes},
            {"intensity", r.intensity},
            {"freq_mhz", r.freq_hz * 1e-6},
            {"t_bandwidth_dofs_per_s", r.t_bandwidth_dofs_per_s},
            {"t_bandwidth_per_cycle", r.t_bandwidth_per_cycle},
            {"t_resource", number_json(r.t_resource)},
            {"t_raw", r.t_raw},
            {"t_max", number_json(r.t_max)},
            {"p_max_gflops", r.p_max_gflops},
            {"bound", to_string(r.bound)},
            {"roofline_gflops", r.roofline_gflops}};
  if (r.attainable_gflops) j["attainable_gflops"] = *r.attainable_gflops;
  if (r.measured_dofs_per_cycle) j["measured_dofs_per_cycle"] = *r.measured_dofs_per_cycle;
  if (r.model_error_percent) j["model_error_percent"] = *r.model_error_percent;
  return j;
}

int run_model(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_format(cfg.format, {"table", "json", "csv"});
  const auto device = load_device(cfg.device);
  const auto degrees = degree_list(cfg.degrees);

  struct Row {
    int degree;
    std::optional<ModelReport> report;
    std::string reason;
  };
  std::vector<Row> rows;
  bool infeasible = false;
  for (int n : degrees) {
    try {
      rows.push_back({n, peak_performance(device, n), {}});
    } catch (const InfeasibleError& e) {
      infeasible = true;
      err << "infeasible: " << e.what() << '\n';
      rows.push_back({n, std::nullopt, e.what()});
    }
  }

  if (cfg.format == "json") {
    auto reports = json::array();
    for (const auto& row : rows)
      reports.push_back(row.report ? report_json(*row.report)
                                   : json{{"degree", row.degree},
                                          {"feasible", false},
                                          {"reason", row.reason}});
    out << json{{"device", device.name},
                {"bandwidth_gbs", device.bandwidth_gbs},
                {"throughput_rule", to_string(device.throughput_rule)},
                {"reports", reports}}
               .dump(2)
        << '\n';
  } else if (cfg.format == "csv") {
    out << "degree,adds,mults,intensity,freq_mhz,t_bandwidth_per_cycle,t_resource,t_raw,t_max,"
           "p_max_gflops,bound,roofline_gflops,measured_dofs_per_cycle,model_error_percent\n";
    for (const auto& row : rows) {
      if (!row.report) continue;
      const auto& r = *row.report;
      out << r.degree << ',' << r.cost.adds << ',' << r.cost.mults << ',' << r.intensity << ','
          << r.freq_hz * 1e-6 << ',' << r.t_bandwidth_per_cycle << ',' << r.t_resource << ','
          << r.t_raw << ',' << r.t_max << ',' << r.p_max_gflops << ',' << to_string(r.bound)
          << ',' << r.roofline_gflops << ','
          << (r.measured_dofs_per_cycle ? std::to_string(*r.measured_dofs_per_cycle) : "") << ','
          << (r.model_error_percent ? std::to_string(*r.model_error_percent) : "") << '\n';
    }
  } else {
    out << device.name << "  (B = " << device.bandwidth_gbs
        << " GB/s, rule = " << to_string(device.throughput_rule) << ")\n";
    out << std::setw(4) << "N" << std::setw(10) << "I(N)" << std::setw(9) << "f MHz"
        << std::setw(9) << "T_B/f" << std::setw(10) << "T_res" << std::setw(8) << "T"
        << std::setw(11) << "P_max" << std::setw(11) << "roofline" << std::setw(11) << "bound"
        << std::setw(10) << "err %" << '\n';
    out << std::fixed;
    for (const auto& row : rows) {
      if (!row.report) {
        out << std::setw(4) << row.degree << "  infeasible: " << row.reason << '\n';
        continue;
      }
      const auto& r = *row.report;
      out << std::setw(4) << r.degree << std::setprecision(3) << std::setw(10) << r.intensity
          << std::setprecision(0) << std::setw(9) << r.freq_hz * 1e-6 << std::setprecision(2)
          << std::setw(9) << r.t_bandwidth_per_cycle << std::setw(10) << r.t_resource
          << std::setw(8) << r.t_max << std::setprecision(1) << std::setw(11) << r.p_max_gflops
          << std::setw(11) << r.roofline_gflops << std::setw(11) << to_string(r.bound);
      if (r.model_error_percent)
        out << std::setprecision(2) << std::setw(10) << *r.model_error_percent;
      out << '\n';
    }
  }
  return infeasible ? kExitInfeasible : kExitOk;
}

int run_roofline(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  require_format(cfg.format, {"table", "json", "csv"});
  const auto device = load_device(cfg.device);
  const auto degrees = degree_list(cfg.degrees);
  if (cfg.format == "json") {
    auto rows = json::array();
    for (int n : degrees)
      rows.push_back({{"degree", n},
                      {"intensity", intensity(n)},
                      {"roofline_gflops", intensity(n) * device.bandwidth_gbs}});
    out << json{{"device", device.name}, {"bandwidth_gbs", device.bandwidth_gbs}, {"rows", rows}}
               .dump(2)
        << '\n';
    return kExitOk;
  }
  const char sep = cfg.format == "csv" ? ',' : ' ';
  out << "degree" << sep << "intensity" << sep << "roofline_gflops\n";
  for (int n : degrees)
    out << n << sep << std::setprecision(17) << intensity(n) << sep
        << intensity(n) * device.bandwidth_gbs << '\n';
  return kExitOk;
}

int run_basis_dump(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto basis = build_basis(cfg.degree);
  const int nx = basis.num_points();
  auto deriv = json::array();
  for (int i = 0; i < nx; ++i) {
    auto row = json::array();
    for (int j = 0; j < nx; ++j) row.push_back(basis.deriv()(i, j));
    deriv.push_back(row);
  }
  out << json{{"degree", basis.degree()},
              {"points", std::vector<double>(basis.points().begin(), basis.points().end())},
              {"weights", std::vector<double>(basis.weights().begin(), basis.weights().end())},
              {"deriv", deriv}}
             .dump(2)
      << '\n';
  return kExitOk;
}

int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_format(cfg.format, {"text", "json"});
  if (cfg.degree > kOracleMaxDegree) throw UsageError("verify supports N <= 6");
  VerifyOptions opt;
  opt.degree = cfg.degree;
  opt.extents = parse_extents(cfg.elements.empty() ? "8" : cfg.elements);
  opt.deformation = cfg.deformation;
  opt.fields = cfg.fields;
  opt.seed = cfg.seed;
  opt.threads = cfg.threads;
  const auto report = verify_variants(opt);
  const bool pass = report.max_rel_error() <= kVerifyTolerance;

  if (cfg.format == "json") {
    auto variants = json::array();
    for (const auto& v : report.variants)
      variants.push_back({{"kernel", v.variant.id()}, {"max_rel_error", v.max_rel_error}});
    out << json{{"degree", report.degree},
                {"elements", report.elements},
                {"deformation", report.deformation},
                {"fields", report.fields},
                {"seed", cfg.seed},
                {"variants", variants},
                {"quadrature_vs_probe", report.quadrature_vs_probe},
                {"max_rel_error", report.max_rel_error()},
                {"tolerance", kVerifyTolerance},
                {"pass", pass}}
               .dump(2)
        << '\n';
  } else {
    out << "verify N=" << report.degree << " E=" << report.elements
        << " deformation=" << report.deformation << " fields=" << report.fields
        << " variants=" << report.variants.size() << " max_rel_error=" << std::scientific
        << std::setprecision(3) << report.max_rel_error() << (pass ? " PASS" : " FAIL") << '\n';
  }
  if (!pass) err << "verification failed: max relative error exceeds 1e-12\n";
  return pass ? kExitOk : kExitVerificationFailed;
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_format(cfg.format, {"text", "json"});
  const auto basis = build_basis(cfg.degree);
  const auto mesh = build_box_mesh(parse_extents(cfg.elements.empty() ? "2,2,2" : cfg.elements),
                                   {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, cfg.deformation);
  PoissonOperator::Options options;
  options.kernel = KernelVariant::parse(cfg.kernel);
  options.threads = cfg.threads;
  const auto result = solve_manufactured(mesh, basis, cfg.tol, cfg.max_iters, options);
  const auto& cg = result.cg;
  const double final_rel =
      cg.residual_history.front() > 0.0 ? cg.residual_history.back() / cg.residual_history.front()
                                        : 0.0;

  if (cfg.format == "json") {
    out << json{{"degree", cfg.degree},
                {"elements", mesh.num_elements()},
                {"kernel", options.kernel.id()},
                {"iterations", cg.iterations},
                {"converged", cg.converged},
                {"final_relative_residual", final_rel},
                {"residual_history", cg.residual_history},
                {"max_nodal_error", result.max_nodal_error},
                {"ax_gflops", cg.ax_gflops}}
               .dump(2)
        << '\n';
  } else {
    out << "iterations " << cg.iterations << '\n';
    out << "final_relative_residual " << std::scientific << std::setprecision(3) << final_rel
        << '\n';
    out << "max_nodal_error " << result.max_nodal_error << '\n';
    out << std::fixed << std::setprecision(3);
    for (std::size_t i = 0; i < cg.ax_gflops.size(); ++i)
      out << "iter " << i + 1 << " ax_gflops " << cg.ax_gflops[i] << '\n';
  }
  if (!cg.converged) {
    err << "cg did not converge in " << cfg.max_iters << " iterations\n";
    return kExitVerificationFailed;
  }
  return kExitOk;
}

int run_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_format(cfg.format, {"csv", "json"});
  SweepOptions opt;
  opt.kernel = KernelVariant::parse(cfg.kernel);
  opt.degrees = degree_list(cfg.degrees);
  opt.elements = parse_int_list(cfg.elements.empty() ? "1..4096:x8" : cfg.elements);
  opt.reps = cfg.reps;
  opt.threads = cfg.threads;
  opt.seed = cfg.seed;
  if (opt.reps < 3) throw UsageError("--reps must be >= 3");
  for (auto e : opt.elements)
    if (e < 1) throw UsageError("element counts must be >= 1");

  const auto result = run_sweep(opt);
  if (cfg.format == "json")
    out << records_to_json(result.records).dump(2) << '\n';
  else
    out << records_to_csv(result.records);
  for (const auto& f : result.failures)
    err << "N=" << f.degree << " E=" << f.elements << ": " << f.message << '\n';
  return result.failures.empty() ? kExitOk : kExitVerificationFailed;
}

int run_plotdata(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  require_format(cfg.format, {"csv", "json"});
  std::stringstream buffer;
  if (cfg.input == "-") {
    buffer << std::cin.rdbuf();
  } else {
    std::ifstream in(cfg.input);
    if (!in) throw UsageError("cannot open " + cfg.input);
    buffer << in.rdbuf();
  }
  const auto records = records_from_csv(buffer.str());
  const auto plot = reshape_for_plot(records, cfg.bar_elements);
  if (cfg.format == "json")
    out << plot_to_json(plot).dump(2) << '\n';
  else
    out << plot_to_csv(plot);
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"semlab: spectral-element Ax kernels, verification, solver and performance model"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto threads_opt = [&](CLI::App* sub) {
    return sub->add_option("--threads", cfg.threads, "OpenMP threads (0 = runtime default)");
  };

  auto* basis = app.add_subcommand("basis-dump", "Print GLL points, weights and D as JSON");
  basis->add_option("--degree", cfg.degree, "Polynomial degree N")->required();

  auto* verify = app.add_subcommand("verify", "Check every kernel variant against the dense oracle");
  verify->add_option("--degree", cfg.degree, "Polynomial degree N (<= 6)")->required();
  verify->add_option("--elements", cfg.elements, "Element count or Ex,Ey,Ez");
  verify->add_option("--seed", cfg.seed, "Random seed");
  verify->add_option("--deform", cfg.deformation, "Mesh deformation in [0, 0.2)");
  verify->add_option("--fields", cfg.fields, "Random fields per variant");
  verify->add_option("--format", cfg.format, "text|json")->default_str("text");
  threads_opt(verify);

  auto* model = app.add_subcommand("model", "Evaluate the performance model for a device");
  model->add_option("--device", cfg.device, "Device file")->required();
  model->add_option("--degrees", cfg.degrees, "Degrees, e.g. 1..15 or 7,11,15");
  model->add_option("--format", cfg.format, "table|json|csv");

  auto* roofline = app.add_subcommand("roofline", "Emit (N, intensity, roofline) rows");
  roofline->add_option("--device", cfg.device, "Device file")->required();
  roofline->add_option("--degrees", cfg.degrees, "Degrees");
  roofline->add_option("--format", cfg.format, "csv|json|table");

  auto* solve = app.add_subcommand("solve", "CG solve of a manufactured Poisson problem");
  solve->add_option("--degree", cfg.degree, "Polynomial degree N")->required();
  solve->add_option("--elements", cfg.elements, "Ex,Ey,Ez");
  solve->add_option("--tol", cfg.tol, "Relative residual tolerance");
  solve->add_option("--max-iters", cfg.max_iters, "Iteration limit");
  solve->add_option("--kernel", cfg.kernel, "ref|buffered|unrollU|padP");
  solve->add_option("--deform", cfg.deformation, "Mesh deformation in [0, 0.2)");
  solve->add_option("--format", cfg.format, "text|json");
  threads_opt(solve);

  auto* bench = app.add_subcommand("bench", "Timed kernel sweep");
  bench->add_option("--kernel", cfg.kernel, "ref|buffered|unrollU|padP");
  bench->add_option("--degrees", cfg.degrees, "Degrees");
  bench->add_option("--elements", cfg.elements, "Element counts, e.g. 1..4096:x8");
  bench->add_option("--reps", cfg.reps, "Timed repetitions (>= 3)");
  bench->add_option("--seed", cfg.seed, "Random seed");
  bench->add_option("--format", cfg.format, "csv|json");
  threads_opt(bench);

  auto* plot = app.add_subcommand("plotdata", "Reshape bench CSV into plot series");
  plot->add_option("--input", cfg.input, "Bench CSV file, - for stdin");
  plot->add_option("--bar-elements", cfg.bar_elements, "Element count for the bar chart");
  plot->add_option("--format", cfg.format, "csv|json");

  // CLI11 consumes arguments from the back.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kExitUsage;
  }

  const auto* chosen = app.get_subcommands().front();
  cfg.subcommand = chosen->get_name();
  auto default_format = [&](const char* f) {
    if (cfg.format.empty()) cfg.format = f;
  };

  try {
    if (cfg.subcommand == "basis-dump") return run_basis_dump(cfg, out, err);
    if (cfg.subcommand == "verify") {
      default_format("text");
      return run_verify(cfg, out, err);
    }
    if (cfg.subcommand == "model") {
      default_format("table");
      return run_model(cfg, out, err);
    }
    if (cfg.subcommand == "roofline") {
      default_format("csv");
      return run_roofline(cfg, out, err);
    }
    if (cfg.subcommand == "solve") {
      default_format("text");
      return run_solve(cfg, out, err);
    }
    if (cfg.subcommand == "bench") {
      default_format("csv");
      if (cfg.degrees == "1..15") cfg.degrees = "1,3,5,7,9,11,13,15";
      return run_bench(cfg, out, err);
    }
    if (cfg.subcommand == "plotdata") {
      default_format("csv");
      return run_plotdata(cfg, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DeviceFileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kExitVerificationFailed;
  }
  err << "unknown subcommand\n";
  return kExitUsage;
}

}  // namespace semlab
