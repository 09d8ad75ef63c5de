// Command-line front end: matrix analysis, iterative solves, and ring traffic models.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "itersolve/itersolve.hpp"

namespace {

using namespace itersolve;
using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string num(double v, int digits = 10) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string describe(const Method& m) {
  std::string s(name(m.kind));
  if (m.kind == MethodKind::SOR) s += " (omega=" + num(m.omega) + ")";
  return s;
}

void line(const std::string& key, const std::string& value) { std::printf("%-30s %s\n", (key + ":").c_str(), value.c_str()); }

DenseMatrix load_matrix(const std::string& path) {
  return std::visit([](const auto& m) { return to_dense(m); }, io::parse_matrix(io::read_file(path)));
}

// Rethrows the zero-diagonal condition the profile recorded, naming the row.
void require_usable(const MatrixProfile& p) {
  if (p.first_zero_diagonal_row) throw ZeroDiagonalError(*p.first_zero_diagonal_row);
}

json estimate_json(const std::optional<SpectralEstimate>& e) {
  if (!e) return nullptr;
  return {{"rho", e->rho}, {"converged", e->converged}, {"iterations", e->iterations_used}};
}

json profile_json(const MatrixProfile& p) {
  json dom = json::array();
  for (auto d : p.row_dominance) dom.push_back(d == RowDominance::Strict ? "strict" : d == RowDominance::Weak ? "weak" : "none");
  json basis;
  for (auto k : {MethodKind::Jacobi, MethodKind::GaussSeidel, MethodKind::SOR})
    basis[std::string(name(k))] = std::string(name(convergence_basis(p, k)));
  json j = {
      {"size", p.size},
      {"symmetric", p.is_symmetric},
      {"strictly_diagonally_dominant", p.is_strictly_diag_dominant},
      {"weakly_diagonally_dominant", p.is_weakly_diag_dominant},
      {"tridiagonal", p.is_tridiagonal},
      {"positive_definite", p.is_positive_definite},
      {"zero_diagonal", p.has_zero_diagonal},
      {"row_dominance", dom},
      {"spectral_radius",
       {{"jacobi", estimate_json(p.jacobi)}, {"gauss-seidel", estimate_json(p.gauss_seidel)}, {"sor", estimate_json(p.sor)}}},
      {"sor_omega", p.sor_omega},
      {"sor_omega_optimal", p.sor_omega_optimal},
      {"omega_star", p.omega_star ? json(*p.omega_star) : json(nullptr)},
      {"convergence_basis", basis},
  };
  j["recommendation"] = p.recommendation
                            ? json{{"method", std::string(name(p.recommendation->kind))}, {"omega", p.recommendation->omega}}
                            : json(nullptr);
  return j;
}

void print_profile(const MatrixProfile& p) {
  line("size", std::to_string(p.size) + "x" + std::to_string(p.size));
  line("symmetric", yes_no(p.is_symmetric));
  line("strictly diagonally dominant", yes_no(p.is_strictly_diag_dominant));
  line("weakly diagonally dominant", yes_no(p.is_weakly_diag_dominant));
  line("tridiagonal", yes_no(p.is_tridiagonal));
  line("positive definite", yes_no(p.is_positive_definite));
  line("zero diagonal", p.first_zero_diagonal_row ? "row " + std::to_string(*p.first_zero_diagonal_row) : "no");
  for (auto k : {MethodKind::Jacobi, MethodKind::GaussSeidel, MethodKind::SOR}) {
    const auto& e = p.estimate(k);
    std::string key = "rho(" + std::string(name(k));
    if (k == MethodKind::SOR) key += ", omega=" + num(p.sor_omega, 7) + (p.sor_omega_optimal ? "" : " non-optimal");
    key += ")";
    line(key, e ? num(e->rho, 6) + "  [" + std::string(name(convergence_basis(p, k))) + "]" : "n/a");
  }
  line("omega*", p.omega_star ? num(*p.omega_star, 7) : "n/a");
  line("recommendation", p.recommendation ? describe(*p.recommendation) : "none convergent");
}

int run_analyze(const std::string& matrix_path, bool as_json) {
  const auto a = load_matrix(matrix_path);
  const auto p = classify(a);
  if (as_json) {
    std::cout << profile_json(p).dump(2) << "\n";
  } else {
    print_profile(p);
  }
  return 0;
}

struct SolveArgs {
  std::string matrix, rhs, method = "auto", x0, history;
  std::optional<double> omega;
  double eta = 1e-3;
  std::size_t max_iter = 100000;
  bool timing = false;
};

// `auto` selects from the profile; an explicit `sor` without --omega uses the profiled weight.
Method resolve_method(const std::string& choice, std::optional<double> omega, const MatrixProfile& p) {
  if (choice == "auto") {
    require_usable(p);
    return select_method(p).method;
  }
  const auto kind = parse_method_kind(choice);
  if (!kind) throw InvalidArgument("unknown method '" + choice + "'");
  if (*kind == MethodKind::SOR) return Method::sor(omega.value_or(p.sor_omega));
  return {*kind, 1.0};
}

void print_report(const SolveReport& r, bool timing) {
  line("method", describe(r.method));
  line("converged", yes_no(r.converged));
  line("iterations", std::to_string(r.iterations_run));
  line("predicted iterations", r.predicted_iterations ? std::to_string(*r.predicted_iterations) : "n/a");
  line("final residual norm", num(r.final_residual_norm));
  if (timing) line("wall time (s)", num(r.wall_time, 6));
}

int run_solve(const SolveArgs& args) {
  const auto a = load_matrix(args.matrix);
  const auto b = io::parse_vector(io::read_file(args.rhs));
  if (b.size() != a.rows()) {
    throw InvalidArgument("rhs has " + std::to_string(b.size()) + " entries, matrix has " + std::to_string(a.rows()) + " rows");
  }
  const auto profile = classify(a);
  SolverConfig cfg;
  cfg.method = resolve_method(args.method, args.omega, profile);
  cfg.eta = args.eta;
  cfg.max_iterations = args.max_iter;
  if (!args.x0.empty()) cfg.initial_guess = io::parse_vector(io::read_file(args.x0));
  const auto report = solve(a, b, cfg, &profile);

  print_report(report, args.timing);
  std::printf("solution:\n");
  for (std::size_t i = 0; i < report.solution.size(); ++i) std::printf("  x[%zu] = %s\n", i, num(report.solution[i], 12).c_str());
  if (!args.history.empty()) io::write_file(args.history, io::write_history_csv(report.residual_history));
  return report.converged ? 0 : kExitNumerical;
}

struct TrafficArgs {
  std::string network, aadt, out, method = "auto";
  std::vector<std::string> close;
  std::optional<double> omega;
  double eta = 1e-3;
  std::size_t max_iter = 100000;
  bool timing = false;
};

int run_traffic_solve(const TrafficArgs& args) {
  if (args.network.empty() == args.aadt.empty()) throw CLI::ValidationError("traffic solve", "give exactly one of <network> or --aadt");
  auto net = args.aadt.empty() ? io::parse_network(io::read_file(args.network))
                               : traffic::generate_ring(io::parse_aadt(io::read_file(args.aadt)));
  if (!args.close.empty()) net = traffic::close_exits(net, args.close);

  traffic::TrafficOptions opts;
  opts.eta = args.eta;
  opts.max_iterations = args.max_iter;
  opts.omega = args.omega;
  if (args.method != "auto") {
    opts.method = parse_method_kind(args.method);
    if (!opts.method) throw InvalidArgument("unknown method '" + args.method + "'");
  }
  const auto result = traffic::solve_traffic(net, opts);
  const auto& p = result.profile;

  line("exits", std::to_string(net.nodes().size()));
  line("omega*", p.omega_star ? num(*p.omega_star, 7) : "n/a");
  if (const auto rho = p.rho_for(result.report.method)) line("spectral radius", num(*rho, 6));
  print_report(result.report, args.timing);
  line("shift constant", num(result.segments.shift_constant));
  line("fit residual norm", num(result.segments.residual_norm));
  if (result.unbalanced_inflows) {
    std::fprintf(stderr, "warning: external flows do not sum to zero; flows are a least-squares fit\n");
  }
  std::printf("segments:\n");
  for (std::size_t k = 0; k < result.segments.flows.size(); ++k) {
    const auto& br = net.branches()[k];
    std::printf("  %3zu  %6s -> %-6s %s\n", k, net.nodes()[br.from].id.c_str(), net.nodes()[br.to].id.c_str(),
                num(result.segments.flows[k], 10).c_str());
  }
  if (!args.out.empty()) io::write_file(args.out, io::write_segments_csv(net, result.segments.flows));
  return result.report.converged ? 0 : kExitNumerical;
}

int run_traffic_generate(std::size_t exits, const std::string& aadt, const std::string& out) {
  const auto spec = io::parse_aadt(io::read_file(aadt));
  if (spec.size() != exits) {
    throw InvalidArgument("--exits " + std::to_string(exits) + " does not match the " + std::to_string(spec.size()) +
                          " rows in '" + aadt + "'");
  }
  io::write_file(out, io::write_network(traffic::generate_ring(spec)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobi / Gauss-Seidel / SOR solver with convergence analysis and ring traffic models"};
  app.require_subcommand(1);

  std::string analyze_path;
  bool analyze_json = false;
  auto* analyze = app.add_subcommand("analyze", "Classify a matrix and estimate each method's spectral radius");
  analyze->add_option("matrix", analyze_path, "Matrix file")->required();
  analyze->add_flag("--json", analyze_json, "Emit a JSON object");

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Solve A x = b iteratively");
  solve_cmd->add_option("matrix", sa.matrix, "Matrix file")->required();
  solve_cmd->add_option("rhs", sa.rhs, "Right-hand side vector file")->required();
  solve_cmd->add_option("--method", sa.method, "auto|jacobi|gauss-seidel|sor")
      ->check(CLI::IsMember({"auto", "jacobi", "gauss-seidel", "sor"}));
  solve_cmd->add_option("--omega", sa.omega, "SOR weight");
  solve_cmd->add_option("--eta", sa.eta, "Residual threshold")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iter", sa.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--x0", sa.x0, "Initial guess vector file");
  solve_cmd->add_option("--history", sa.history, "Write residual history CSV");
  solve_cmd->add_flag("--timing", sa.timing, "Report wall time");

  auto* traffic_cmd = app.add_subcommand("traffic", "Ring traffic network models");
  traffic_cmd->require_subcommand(1);

  TrafficArgs ta;
  auto* tsolve = traffic_cmd->add_subcommand("solve", "Estimate per-segment volumes");
  tsolve->add_option("network", ta.network, "Network file");
  tsolve->add_option("--aadt", ta.aadt, "AADT CSV (exit,inflow,outflow)");
  tsolve->add_option("--close-exit", ta.close, "Close an exit (repeatable)");
  tsolve->add_option("--eta", ta.eta, "Residual threshold")->check(CLI::PositiveNumber);
  tsolve->add_option("--max-iter", ta.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  tsolve->add_option("--method", ta.method, "auto|jacobi|gauss-seidel|sor")
      ->check(CLI::IsMember({"auto", "jacobi", "gauss-seidel", "sor"}));
  tsolve->add_option("--omega", ta.omega, "SOR weight");
  tsolve->add_option("--out", ta.out, "Write segments CSV");
  tsolve->add_flag("--timing", ta.timing, "Report wall time");

  std::size_t gen_exits = 0;
  std::string gen_aadt, gen_out;
  auto* tgen = traffic_cmd->add_subcommand("generate", "Write the ring network for an AADT table");
  tgen->add_option("--exits", gen_exits, "Number of exits")->required()->check(CLI::PositiveNumber);
  tgen->add_option("--aadt", gen_aadt, "AADT CSV")->required();
  tgen->add_option("--out", gen_out, "Output network file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*analyze) return run_analyze(analyze_path, analyze_json);
    if (*solve_cmd) return run_solve(sa);
    if (*tsolve) return run_traffic_solve(ta);
    if (*tgen) return run_traffic_generate(gen_exits, gen_aadt, gen_out);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
