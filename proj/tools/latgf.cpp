#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "latgf/acceptance.hpp"
#include "latgf/latgf.hpp"

namespace {

using namespace latgf;

enum Exit { kOk = 0, kInvalid = 1, kNumerical = 2, kEstimateNotMet = 3 };

struct Options {
  PipelineConfig pipe;
  std::vector<std::string> x_list;
  int L_min = 0, L_max = 0, L_step = 1;
  double epsilon = 0;
  std::string output;
  std::string format = "csv";
  std::uint64_t seed = 1;
  int n_max = 400;
  long walks = 100000;
  double tail_tol = 1e-6;
  double tol = 1e-3;
  std::string method = "subtraction";
  double domain_radius = 0;
  std::vector<int> only;
};

LatticePoint parse_point(const std::string& s, int d) {
  std::vector<int> v;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(tok, &used));
      require(used == tok.size(), "");
    } catch (...) {
      throw InvalidArgument("--x '" + s + "': expected comma-separated integers");
    }
  }
  if (static_cast<int>(v.size()) != d)
    throw InvalidArgument("--x '" + s + "': has " + std::to_string(v.size()) + " coordinates, --dim is " +
                          std::to_string(d));
  return LatticePoint::from_range(v);
}

std::vector<LatticePoint> requested_points(const Options& o) {
  std::vector<LatticePoint> xs;
  for (const auto& s : o.x_list) xs.push_back(parse_point(s, o.pipe.dim));
  if (o.L_min > 0 || o.L_max > 0) {
    auto sweep = axis_sweep(o.pipe.dim, o.L_min, o.L_max, o.L_step);
    xs.insert(xs.end(), sweep.begin(), sweep.end());
  }
  return xs;
}

std::string config_echo(const Options& o, const Problem& p) {
  std::ostringstream s;
  s << "dim=" << o.pipe.dim << " model=" << p.model.id << " grid_n=" << p.grid.n_per_axis
    << " max_grid_n=" << p.grid.max_axis_n << " bump_inner=" << fmt12(p.chi.r_inner())
    << " bump_outer=" << fmt12(p.chi.r_outer());
  return s.str();
}

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open --output '" + o.output + "' for writing");
  out << text;
}

void check_format(const Options& o) {
  require(o.format == "csv" || o.format == "json", "--format must be csv or json");
}

int cmd_constants(const Options& o) {
  require(o.pipe.dim >= 3, "dimension must be >= 3, got " + std::to_string(o.pipe.dim));
  const auto c = constants(o.pipe.dim);
  const auto model = load_model(o.pipe.model, o.pipe.dim);
  const double h0 = h_at_zero(model.D);
  std::ostringstream s;
  s << "# latgf constants schema_version=" << kSchemaVersion << " dim=" << o.pipe.dim << " model=" << model.id
    << "\n";
  s << "name,value\n";
  s << "a_d," << fmt12(c.a) << "\n";
  s << "n_d," << c.n << "\n";
  s << "p_d," << fmt12(c.p) << "\n";
  s << "q_d," << fmt12(c.q) << "\n";
  s << "sigma2," << fmt12(moment(model.D, 2)) << "\n";
  s << "h0," << fmt12(h0) << "\n";
  s << "leading_constant," << fmt12(c.a * h0) << "\n";
  emit(o, s.str());
  return kOk;
}

int cmd_green(const Options& o) {
  check_format(o);
  auto p = make_problem(o.pipe);
  require(o.method == "subtraction" || o.method == "riesz", "--method must be subtraction or riesz");
  auto rows = o.method == "riesz" ? green_rows_riesz(p, requested_points(o), o.domain_radius)
                                  : green_rows(p, requested_points(o));
  int status = kOk;
  for (const auto& r : rows)
    if (r.error_estimate > o.tol * std::abs(r.f_total)) {
      std::cerr << "green: x = " << point_string(r.x, ',') << " error estimate " << fmt12(r.error_estimate)
                << " exceeds tol * |f| = " << fmt12(o.tol * std::abs(r.f_total)) << "\n";
      status = kEstimateNotMet;
    }
  std::ostringstream s;
  if (o.format == "csv") {
    s << "# latgf green schema_version=" << kSchemaVersion << " " << config_echo(o, p) << "\n";
    s << "x,i1,i2,total,error_estimate,method\n";
    for (const auto& r : rows)
      s << point_string(r.x) << "," << fmt12(r.i1.real()) << "," << fmt12(r.i2.real()) << ","
        << fmt12(r.f_total.real()) << "," << fmt12(r.error_estimate) << "," << r.method_tag << "\n";
  } else {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["d"] = o.pipe.dim;
    j["model_id"] = p.model.id;
    j["grid_n"] = p.grid.n_per_axis;
    j["r_inner"] = p.chi.r_inner();
    j["r_outer"] = p.chi.r_outer();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json e;
      e["x"] = std::vector<int>(r.x.begin(), r.x.end());
      e["i1"] = r.i1.real();
      e["i2"] = r.i2.real();
      e["total"] = r.f_total.real();
      e["error_estimate"] = r.error_estimate;
      e["method"] = r.method_tag;
      arr.push_back(e);
    }
    j["rows"] = arr;
    s << j.dump(2) << "\n";
  }
  emit(o, s.str());
  return status;
}

int cmd_asymptote(const Options& o) {
  check_format(o);
  auto p = make_problem(o.pipe);
  require(o.L_max > 0, "asymptote: --L-min/--L-max/--L-step sweep required");
  require(o.epsilon >= 0 && o.epsilon < 1, "--epsilon must lie in [0, 1)");
  auto xs = axis_sweep(o.pipe.dim, o.L_min, o.L_max, o.L_step);
  auto rep = asymptote_report(p, xs);
  std::ostringstream s;
  if (o.format == "csv") {
    std::ostringstream echo;
    echo << config_echo(o, p) << " norm_grid_n=" << rep.norm_grid_n << " L_min=" << o.L_min << " L_max=" << o.L_max
         << " L_step=" << o.L_step;
    s << to_csv(rep, echo.str());
  } else {
    auto j = to_json(rep);
    if (o.epsilon > 0) {
      j["epsilon"] = o.epsilon;
      for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        auto t = j2_tail(p.h, p.chi, rep.rows[i].x, o.epsilon, p.grid);
        j["rows"][i]["j2_scaled"] = t.scaled;
        j["rows"][i]["j2_error"] = t.error;
      }
    }
    s << j.dump(2) << "\n";
  }
  emit(o, s.str());
  return kOk;
}

int cmd_oracle(const Options& o) {
  require(o.pipe.dim >= 3, "dimension must be >= 3, got " + std::to_string(o.pipe.dim));
  const auto model = load_model(o.pipe.model, o.pipe.dim);
  auto xs = requested_points(o);
  if (xs.empty()) xs = {zero_point(o.pipe.dim), axis_point(o.pipe.dim, 1)};
  sort_by_norm(xs);
  bool mc_ok = true;
  for (const auto& [pt, w] : model.D.support()) mc_ok = mc_ok && w >= 0;
  if (!mc_ok) std::cerr << "oracle: negative step weights; Monte Carlo branch disabled\n";
  require(o.walks >= 2, "--walks must be >= 2");
  auto series = green_series_oracle(model.D, xs, o.n_max, o.tail_tol);
  int status = kOk;
  std::ostringstream s;
  s << "# latgf oracle schema_version=" << kSchemaVersion << " dim=" << o.pipe.dim << " model=" << model.id
    << " n_max=" << o.n_max << " walks=" << o.walks << " seed=" << o.seed << "\n";
  s << "x,series,tail_estimate,partial_sum,mc_mean,mc_stderr,mc_step_cap\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& r = series[i];
    if (!r.converged) {
      std::cerr << "oracle: x = " << point_string(xs[i], ',') << " tail estimate " << fmt12(r.tail_estimate)
                << " exceeds tail_tol " << fmt12(o.tail_tol) << "\n";
      status = kEstimateNotMet;
    }
    s << point_string(xs[i]) << "," << fmt12(r.value) << "," << fmt12(r.tail_estimate) << ","
      << fmt12(r.partial_sum) << ",";
    if (mc_ok) {
      auto mc = green_mc_oracle(model.D, xs[i], o.walks, o.seed + i);
      s << fmt12(mc.mean) << "," << fmt12(mc.stderr_) << "," << mc.step_cap << "\n";
    } else {
      s << ",,\n";
    }
  }
  emit(o, s.str());
  return status;
}

int cmd_verify(const Options& o, const std::string& self) {
  AcceptanceOptions a;
  a.cli_path = self;
  a.only = std::set<int>(o.only.begin(), o.only.end());
  std::ostringstream s;
  auto results = run_acceptance(a, [&](const CriterionResult& r) {
    std::cerr << format_result(r) << std::endl;
    s << format_result(r) << "\n";
  });
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  s << (all ? "ALL PASS" : "SOME FAILED") << "\n";
  emit(o, s.str());
  return all ? kOk : kEstimateNotMet;
}

std::string self_path(const char* argv0) {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::string(argv0) : p.string();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Lattice functions from torus symbols: decomposition pipeline, oracles and asymptotics"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* c) {
    c->add_option("--dim", o.pipe.dim, "Lattice dimension d (>= 3)")->capture_default_str();
    c->add_option("--model", o.pipe.model, "srw, spread-out-R, or a model-spec JSON file")->capture_default_str();
    c->add_option("--output", o.output, "Output file (default: standard output)");
  };
  auto numeric = [&](CLI::App* c) {
    c->add_option("--grid-n", o.pipe.grid_n, "Base offset-grid nodes per axis (0: by dimension)")
        ->capture_default_str();
    c->add_option("--max-grid-n", o.pipe.max_grid_n, "Per-axis node limit before an aliasing error")
        ->capture_default_str();
    c->add_option("--bump-inner", o.pipe.bump_inner, "Cutoff inner radius r_inner")->capture_default_str();
    c->add_option("--bump-outer", o.pipe.bump_outer, "Cutoff outer radius r_outer")->capture_default_str();
    c->add_option("--format", o.format, "csv or json")->capture_default_str();
  };
  auto sweep = [&](CLI::App* c) {
    c->add_option("--L-min", o.L_min, "Axis sweep start");
    c->add_option("--L-max", o.L_max, "Axis sweep end");
    c->add_option("--L-step", o.L_step, "Axis sweep step")->capture_default_str();
  };

  auto* constants_cmd = app.add_subcommand("constants", "Print a_d, n_d, p_d and h(0) for a model");
  common(constants_cmd);

  auto* green_cmd = app.add_subcommand("green", "f(x) = I1(x) + I2(x) with error estimates");
  common(green_cmd);
  numeric(green_cmd);
  sweep(green_cmd);
  green_cmd->add_option("--x", o.x_list, "Lattice point, e.g. 1,0,0 (repeatable)");
  green_cmd->add_option("--method", o.method, "I1 method: subtraction or riesz")->capture_default_str();
  green_cmd->add_option("--domain-radius", o.domain_radius, "Riesz real-space radius (0: 4|x| + 40)")
      ->capture_default_str();
  green_cmd->add_option("--tol", o.tol, "Relative error target for the exit status")->capture_default_str();

  auto* asym_cmd = app.add_subcommand("asymptote", "Axis sweep, decay fit, Sobolev norms and bound ratio");
  common(asym_cmd);
  numeric(asym_cmd);
  sweep(asym_cmd);
  asym_cmd->add_option("--norm-grid-n", o.pipe.norm_grid_n, "Grid for the Sobolev norms (0: by dimension)")
      ->capture_default_str();
  asym_cmd->add_option("--epsilon", o.epsilon, "Adds |x|^{d-2} J2 at this epsilon to JSON rows (0: off)")
      ->capture_default_str();

  auto* oracle_cmd = app.add_subcommand("oracle", "Convolution-series and Monte Carlo values of C(x)");
  common(oracle_cmd);
  oracle_cmd->add_option("--x", o.x_list, "Lattice point, e.g. 1,0,0 (repeatable; default 0 and e1)");
  sweep(oracle_cmd);
  oracle_cmd->add_option("--n-max", o.n_max, "Series terms summed before the tail fit")->capture_default_str();
  oracle_cmd->add_option("--walks", o.walks, "Monte Carlo walks per point")->capture_default_str();
  oracle_cmd->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
  oracle_cmd->add_option("--tail-tol", o.tail_tol, "Tail estimate target for the exit status")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
  verify_cmd->add_option("--output", o.output, "Output file (default: standard output)");
  verify_cmd->add_option("--only", o.only, "Run only these criteria (1-12)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*constants_cmd) return cmd_constants(o);
    if (*green_cmd) return cmd_green(o);
    if (*asym_cmd) return cmd_asymptote(o);
    if (*oracle_cmd) return cmd_oracle(o);
    if (*verify_cmd) return cmd_verify(o, self_path(argv[0]));
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kInvalid;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kInvalid;
}
