#include "zeff/cli.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "zeff/io.hpp"
#include "zeff/lattice.hpp"
#include "zeff/network.hpp"
#include "zeff/verify.hpp"
#include "zeff/zproblem.hpp"

namespace zeff::cli {

namespace {

using io::json;

void emit(const json& doc, const std::string& format, std::ostream& out,
          const std::string& text) {
  if (format == "json") {
    out << doc.dump(2) << '\n';
  } else {
    out << text;
  }
}

std::string flag(bool b) { return b ? "yes" : "no"; }

int run_dtn(const RunConfig& cfg, std::ostream& out) {
  const auto file = io::read_network(cfg.input_path);
  if (!file.boundary) throw ParseError("network file has no 'boundary' field");
  const auto net = file.network(cfg.tol);
  const BoundaryPartition bp(net.graph().node_count(), *file.boundary);

  json doc;
  doc["command"] = "dtn";
  doc["input"] = cfg.input_path;
  doc["seed"] = cfg.seed;
  doc["method"] = cfg.method;
  json boundary_names = json::array();
  for (Index b : bp.boundary()) boundary_names.push_back(file.node_names[b]);
  doc["boundary"] = boundary_names;

  std::ostringstream text;
  text << "dtn map for " << cfg.input_path << " (seed " << cfg.seed << ")\n";
  text << "boundary:";
  for (Index b : bp.boundary()) text << ' ' << file.node_names[b];
  text << '\n';

  RealMat reference;
  if (cfg.method == "schur" || cfg.method == "both") {
    const RealMat lambda = dtn_schur(net, bp);
    doc["lambda_schur"] = io::matrix_to_json(lambda);
    text << "lambda (schur route):\n" << io::format_matrix(lambda);
    reference = lambda;
  }
  if (cfg.method == "zproblem" || cfg.method == "both") {
    const RealMat lambda = dtn_zproblem(net, bp);
    doc["lambda_zproblem"] = io::matrix_to_json(lambda);
    text << "lambda (z-problem route):\n" << io::format_matrix(lambda);
    if (cfg.method == "both") {
      const double agreement = max_abs_diff(reference, lambda);
      doc["agreement_residual"] = agreement;
      text << "route agreement residual: " << agreement << '\n';
    } else {
      reference = lambda;
    }
  }

  const bool sa = is_selfadjoint(reference, cfg.tol);
  const bool psd = is_psd(reference, cfg.tol);
  const double const_kernel =
      reference.size() ? (reference * RealVec::Ones(reference.cols())).norm() : 0.0;
  doc["selfadjoint"] = sa;
  doc["psd"] = psd;
  doc["constant_kernel_residual"] = const_kernel;
  text << "selfadjoint: " << flag(sa) << "  psd: " << flag(psd)
       << "  constant-kernel residual: " << const_kernel << '\n';

  emit(doc, cfg.format, out, text.str());
  return 0;
}

int run_effcond(const RunConfig& cfg, std::ostream& out) {
  const auto file = io::read_network(cfg.input_path);
  const auto comma = cfg.pair.find(',');
  if (cfg.pair.empty() || comma == std::string::npos)
    throw ParseError("--pair expects two node names, e.g. --pair p1,p3");
  const Index p = file.node_id(cfg.pair.substr(0, comma));
  const Index q = file.node_id(cfg.pair.substr(comma + 1));
  const auto net = file.network(cfg.tol);

  const double sigma_eff = effective_conductivity(net, p, q);
  const double r_eff = effective_resistance_from(sigma_eff, cfg.tol);
  const auto zero_report = effcond_zero_test(net, p, q);

  json doc;
  doc["command"] = "effcond";
  doc["input"] = cfg.input_path;
  doc["seed"] = cfg.seed;
  doc["pair"] = {file.node_names[p], file.node_names[q]};
  doc["sigma_eff"] = sigma_eff;
  if (std::isinf(r_eff)) {
    doc["r_eff"] = "inf";
  } else {
    doc["r_eff"] = r_eff;
  }
  doc["zero_by_structure"] = zero_report.is_zero;

  std::ostringstream text;
  text << "effective conductivity for " << cfg.input_path << " (seed " << cfg.seed << ")\n";
  text << "pair: " << file.node_names[p] << ", " << file.node_names[q] << '\n';
  text << std::setprecision(17) << "sigma_eff: " << sigma_eff << '\n';
  if (std::isinf(r_eff)) {
    text << "r_eff: inf\n";
  } else {
    text << "r_eff: " << r_eff << '\n';
  }
  text << "zero by structural test: " << flag(zero_report.is_zero) << '\n';

  emit(doc, cfg.format, out, text.str());
  return 0;
}

int run_lattice(const RunConfig& cfg, std::ostream& out) {
  const auto file = io::read_lattice(cfg.input_path);
  const auto net = file.network(cfg.tol);
  const auto& lat = net.lattice();

  const auto triple = lattice_hodge<double>(lat, cfg.tol);
  const auto pound = periodic_dirichlet_decomp<double>(lat, cfg.tol);
  const double sigma_star = lattice_sigma_star(net);
  const auto existence = effcond_exists(net);
  const auto compression = compression_check(net);

  json doc;
  doc["command"] = "lattice";
  doc["input"] = cfg.input_path;
  doc["seed"] = cfg.seed;
  doc["d"] = lat.dim();
  doc["tau"] = lat.tau();
  doc["dims"] = {{"U", triple.part(0).dim()},       {"E", triple.part(1).dim()},
                 {"J", triple.part(2).dim()},       {"U_pound", pound.part(0).dim()},
                 {"E_pound", pound.part(1).dim()},  {"J_pound", pound.part(2).dim()}};
  doc["sigma_star"] = sigma_star;
  doc["effcond_exists"] = existence.exists;
  doc["compression_residual"] = compression.residual;

  std::ostringstream text;
  text << "lattice report for " << cfg.input_path << " (seed " << cfg.seed << ")\n";
  text << "d = " << lat.dim() << ", tau =";
  for (Index t : lat.tau()) text << ' ' << t;
  text << '\n';
  text << "dims: U = " << triple.part(0).dim() << ", E = " << triple.part(1).dim()
       << ", J = " << triple.part(2).dim() << "; U# = " << pound.part(0).dim()
       << ", E# = " << pound.part(1).dim() << ", J# = " << pound.part(2).dim() << '\n';
  text << std::setprecision(17) << "sigma_star: " << sigma_star << '\n';
  text << "effective conductivity exists: " << flag(existence.exists) << '\n';
  text << "compression residual: " << compression.residual << '\n';

  emit(doc, cfg.format, out, text.str());
  return 0;
}

int run_zsolve(const RunConfig& cfg, std::ostream& out) {
  const auto file = io::read_zproblem(cfg.input_path);
  if (cfg.e0_literal.empty()) throw ParseError("--e0 expects comma-separated U coordinates");
  const RealVec e0_coords = io::parse_vector_literal(cfg.e0_literal);
  if (e0_coords.size() != file.u_dim)
    throw ParseError("--e0 must have " + std::to_string(file.u_dim) + " coordinates");

  const auto zp = file.problem(cfg.tol);
  RealVec e0 = RealVec::Zero(zp.decomp().ambient_dim());
  e0.head(file.u_dim) = e0_coords;
  const auto sol = solve(zp, e0);
  const auto eff = effective_operator(zp);

  json doc;
  doc["command"] = "zsolve";
  doc["input"] = cfg.input_path;
  doc["seed"] = cfg.seed;
  doc["e0"] = io::vector_to_json(sol.e0);
  doc["j0"] = io::vector_to_json(sol.j0);
  doc["e"] = io::vector_to_json(sol.e_particular);
  doc["j"] = io::vector_to_json(sol.j);
  doc["kernel_dim"] = sol.e_kernel.dim();
  doc["residual"] = sol.residual(zp.sigma());
  doc["effective_operator"] = io::matrix_to_json(eff.matrix);
  doc["effective_operator_on_all_U"] = eff.exists_on_all_U;

  std::ostringstream text;
  text << "z-problem solution for " << cfg.input_path << " (seed " << cfg.seed << ")\n";
  text << "e0: " << io::format_vector(sol.e0) << '\n';
  text << "j0: " << io::format_vector(sol.j0) << '\n';
  text << "e:  " << io::format_vector(sol.e_particular) << '\n';
  text << "j:  " << io::format_vector(sol.j) << '\n';
  text << "kernel dimension: " << sol.e_kernel.dim() << '\n';
  text << "residual: " << sol.residual(zp.sigma()) << '\n';
  text << "effective operator (U coordinates):\n" << io::format_matrix(eff.matrix);
  text << "defined on all of U: " << flag(eff.exists_on_all_U) << '\n';

  emit(doc, cfg.format, out, text.str());
  return 0;
}

int run_verify(const RunConfig& cfg, std::ostream& out) {
  verify::Options options;
  options.seed = cfg.seed;
  options.suite = cfg.suite;
  options.tol = cfg.tol;
  const auto results = verify::run(options);

  int failed = 0;
  double max_residual = 0.0;
  for (const auto& r : results) {
    if (!r.pass) ++failed;
    max_residual = std::max(max_residual, r.residual);
  }

  json doc;
  doc["command"] = "verify";
  doc["suite"] = cfg.suite;
  doc["seed"] = cfg.seed;
  doc["passed"] = static_cast<int>(results.size()) - failed;
  doc["failed"] = failed;
  doc["max_residual"] = max_residual;
  json checks = json::array();
  for (const auto& r : results)
    checks.push_back({{"suite", r.suite},
                      {"name", r.name},
                      {"pass", r.pass},
                      {"residual", r.residual},
                      {"note", r.note}});
  doc["checks"] = std::move(checks);

  std::ostringstream text;
  for (const auto& r : results) {
    text << (r.pass ? "PASS" : "FAIL") << "  " << r.suite << " :: " << r.name;
    if (r.residual > 0.0) text << "  (residual " << r.residual << ')';
    if (!r.note.empty() && !r.pass) text << "  [" << r.note << ']';
    text << '\n';
  }
  text << results.size() - failed << " passed, " << failed << " failed (suite " << cfg.suite
       << ", seed " << cfg.seed << ", max residual " << max_residual << ")\n";

  emit(doc, cfg.format, out, text.str());
  return failed == 0 ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.command == "dtn") return run_dtn(config, out);
    if (config.command == "effcond") return run_effcond(config, out);
    if (config.command == "lattice") return run_lattice(config, out);
    if (config.command == "zsolve") return run_zsolve(config, out);
    if (config.command == "verify") return run_verify(config, out);
    err << "error: unknown command '" << config.command << "'\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace zeff::cli
