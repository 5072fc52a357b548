#include "graphfilter/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "graphfilter/analysis.hpp"
#include "graphfilter/approx.hpp"
#include "graphfilter/io.hpp"
#include "graphfilter/spectral.hpp"
#include "json.hpp"

namespace graphfilter {
namespace {

using nlohmann::json;

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

Graph load_graph(const RunConfig& cfg) {
  require(!cfg.graph_path.empty(), "--graph is required for " + cfg.command);
  return parse_edge_list(read_text_file(cfg.graph_path));
}

FeatureMatrix load_features(const RunConfig& cfg, const Graph& g) {
  if (cfg.features_path.empty()) return random_features(g.num_nodes(), cfg.feature_dim, cfg.seed);
  return parse_features(read_text_file(cfg.features_path));
}

FilterSpec load_filter(const RunConfig& cfg) {
  require(!cfg.filter.empty(), "--filter is required for " + cfg.command);
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), cfg.filter) != names.end())
    return make_preset(cfg.filter, cfg.params);
  if (std::filesystem::exists(cfg.filter)) {
    require(cfg.params.empty(), "--param applies to presets, not FilterSpec files");
    return filter_from_json(read_text_file(cfg.filter));
  }
  throw Error(ErrorCode::UnknownModel, "'" + cfg.filter + "' is neither a preset nor a file");
}

// CSV to the output file, or to the summary stream when there is none.
void emit(const Context& ctx, const std::function<void(std::ostream&)>& writer) {
  std::ostringstream ss;
  writer(ss);
  if (ctx.cfg.output_path.empty()) {
    ctx.out << ss.str();
  } else {
    write_text_file(ctx.cfg.output_path, ss.str());
  }
}

TargetSignal load_target(const RunConfig& cfg) {
  if (cfg.target == "step") return step_target(cfg.threshold, cfg.lo, cfg.hi);
  require(cfg.target == "filter", "--target must be 'step' or 'filter'");
  return preset_target(load_filter(cfg), cfg.lo, cfg.hi);
}

FitFamily parse_family(const std::string& s) {
  if (s == "polynomial") return FitFamily::Polynomial;
  if (s == "rational") return FitFamily::Rational;
  throw Error(ErrorCode::InvalidConfig, "--family must be 'polynomial' or 'rational'");
}

int cmd_filter(const Context& ctx) {
  const Graph g = load_graph(ctx.cfg);
  const FeatureMatrix x = load_features(ctx.cfg, g);
  const FilterSpec f = load_filter(ctx.cfg);
  const FeatureMatrix z = apply_filter(f, g, x);
  emit(ctx, [&](std::ostream& os) { write_matrix_csv(os, z, "z"); });
  return kExitOk;
}

int cmd_spectrum(const Context& ctx) {
  const Graph g = load_graph(ctx.cfg);
  const auto scheme = parse_scheme(ctx.cfg.scheme);
  if (!scheme || *scheme == Scheme::Derived)
    throw Error(ErrorCode::UnsupportedScheme, "unknown scheme " + ctx.cfg.scheme);
  const auto dec = eigendecompose(basis_operator(g, *scheme));
  emit(ctx, [&](std::ostream& os) { write_eigenvalues_csv(os, dec.eigenvalues); });
  return kExitOk;
}

int cmd_response(const Context& ctx) {
  const FilterSpec f = load_filter(ctx.cfg);
  const auto grid = uniform_grid(ctx.cfg.lo, ctx.cfg.hi, ctx.cfg.grid_size);
  const auto curve = frequency_response(f, grid);
  emit(ctx, [&](std::ostream& os) { write_curve_csv(os, curve); });
  if (!ctx.cfg.output_path.empty()) ctx.out << "axis=" << axis_name(curve.axis) << '\n';
  return kExitOk;
}

int cmd_equivalence(const Context& ctx) {
  const Graph g = load_graph(ctx.cfg);
  const FeatureMatrix x = load_features(ctx.cfg, g);
  const FilterSpec f = load_filter(ctx.cfg);
  const auto report = check_equivalence(f, g, x, ctx.cfg.tolerance);
  if (!ctx.cfg.output_path.empty())
    write_text_file(ctx.cfg.output_path, [&] {
      std::ostringstream ss;
      write_matrix_csv(ss, report.spatial, "z");
      return ss.str();
    }());
  ctx.out << "max_rel_error=" << format_double(report.max_rel_error) << '\n'
          << "route=" << report.route << '\n'
          << "pass=" << (report.pass ? "true" : "false") << '\n';
  return report.pass ? kExitOk : kExitCheckFailed;
}

int cmd_fit(const Context& ctx) {
  const auto target = load_target(ctx.cfg);
  const auto family = parse_family(ctx.cfg.family);
  const std::size_t den = ctx.cfg.den_degree != 0 ? ctx.cfg.den_degree : ctx.cfg.degree;
  const FitResult r = family == FitFamily::Polynomial
                          ? fit_polynomial(target, ctx.cfg.degree, ctx.cfg.grid_size)
                          : fit_rational(target, ctx.cfg.degree, den, ctx.cfg.grid_size);
  if (!ctx.cfg.output_path.empty()) write_text_file(ctx.cfg.output_path, filter_to_json(r.coeffs));
  ctx.out << "max_error=" << format_double(r.max_error) << '\n'
          << "rms_error=" << format_double(r.rms_error) << '\n'
          << "iterations=" << r.iterations << '\n';
  return kExitOk;
}

int cmd_converge(const Context& ctx) {
  const auto target = load_target(ctx.cfg);
  const auto family = parse_family(ctx.cfg.family);
  const auto study = convergence_study(target, family, ctx.cfg.degrees, ctx.cfg.grid_size);
  emit(ctx, [&](std::ostream& os) { write_convergence_csv(os, study); });
  ctx.out << (family == FitFamily::Polynomial ? "loglog_slope=" : "log_vs_sqrt_slope=")
          << format_double(study.slope) << '\n';
  return kExitOk;
}

int cmd_oversmooth(const Context& ctx) {
  const Graph g = load_graph(ctx.cfg);
  const FeatureMatrix x = load_features(ctx.cfg, g);
  const FilterSpec f = load_filter(ctx.cfg);
  const auto prof = oversmoothing_profile(g, x, f, ctx.cfg.depths);
  emit(ctx, [&](std::ostream& os) { write_profile_csv(os, prof); });
  if (!prof.connected) ctx.out << "warning=disconnected_graph\n";
  return kExitOk;
}

int cmd_walkcheck(const Context& ctx) {
  const Graph g = load_graph(ctx.cfg);
  WalkConfig wc;
  wc.window = ctx.cfg.window;
  wc.num_walks = ctx.cfg.num_walks;
  wc.walk_length = ctx.cfg.walk_length;
  wc.seed = ctx.cfg.seed;
  const auto check = monte_carlo_walk_check(g, wc);
  if (!ctx.cfg.output_path.empty())
    write_text_file(ctx.cfg.output_path, [&] {
      std::ostringstream ss;
      write_matrix_csv(ss, check.empirical, "n");
      return ss.str();
    }());
  const bool pass = check.max_abs_dev <= ctx.cfg.tolerance;
  ctx.out << "max_abs_dev=" << format_double(check.max_abs_dev) << '\n'
          << "pass=" << (pass ? "true" : "false") << '\n';
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_bench(const Context& ctx) {
  const FilterSpec f = load_filter(ctx.cfg);
  const auto rows = bench_filter(f, ctx.cfg.sizes, ctx.cfg.feature_dim, ctx.cfg.repetitions,
                                 ctx.cfg.regular_degree, ctx.cfg.seed);
  emit(ctx, [&](std::ostream& os) { write_bench_csv(os, rows); });
  if (rows.size() >= 2) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& r : rows) {
      lx.push_back(std::log(static_cast<double>(r.nodes)));
      ly.push_back(std::log(r.seconds));
    }
    ctx.out << "loglog_slope_nodes=" << format_double(fitted_slope(lx, ly)) << '\n';
  }
  return kExitOk;
}

using Handler = int (*)(const Context&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"filter", cmd_filter},         {"spectrum", cmd_spectrum},
      {"response", cmd_response},     {"equivalence", cmd_equivalence},
      {"fit", cmd_fit},               {"converge", cmd_converge},
      {"oversmooth", cmd_oversmooth}, {"walkcheck", cmd_walkcheck},
      {"bench", cmd_bench},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"filter", "spectrum",   "response",
                                              "equivalence", "fit", "converge",
                                              "oversmooth", "walkcheck", "bench"};
  return names;
}

void load_config_json(const std::string& text, RunConfig& cfg) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") cfg.command = v.get<std::string>();
      else if (key == "graph") cfg.graph_path = v.get<std::string>();
      else if (key == "features") cfg.features_path = v.get<std::string>();
      else if (key == "feature_dim") cfg.feature_dim = v.get<std::size_t>();
      else if (key == "filter") cfg.filter = v.get<std::string>();
      else if (key == "param") cfg.params = v.get<ParamMap>();
      else if (key == "out") cfg.output_path = v.get<std::string>();
      else if (key == "tol") cfg.tolerance = v.get<double>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "grid") cfg.grid_size = v.get<std::size_t>();
      else if (key == "scheme") cfg.scheme = v.get<std::string>();
      else if (key == "lo") cfg.lo = v.get<double>();
      else if (key == "hi") cfg.hi = v.get<double>();
      else if (key == "target") cfg.target = v.get<std::string>();
      else if (key == "threshold") cfg.threshold = v.get<double>();
      else if (key == "family") cfg.family = v.get<std::string>();
      else if (key == "degree") cfg.degree = v.get<std::size_t>();
      else if (key == "den_degree") cfg.den_degree = v.get<std::size_t>();
      else if (key == "degrees") cfg.degrees = v.get<std::vector<std::size_t>>();
      else if (key == "depths") cfg.depths = v.get<std::vector<std::size_t>>();
      else if (key == "window") cfg.window = v.get<std::size_t>();
      else if (key == "walks") cfg.num_walks = v.get<std::size_t>();
      else if (key == "walk_length") cfg.walk_length = v.get<std::size_t>();
      else if (key == "sizes") cfg.sizes = v.get<std::vector<std::size_t>>();
      else if (key == "reps") cfg.repetitions = v.get<std::size_t>();
      else if (key == "regular_degree") cfg.regular_degree = v.get<std::size_t>();
      else throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverDiverged:
    case ErrorCode::SingularDenominator:
    case ErrorCode::PoleInDomain:
    case ErrorCode::IllConditioned:
    case ErrorCode::NotConverged:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto it = handlers().find(cfg.command);
    if (it == handlers().end())
      throw Error(ErrorCode::InvalidConfig, "unknown command '" + cfg.command + "'");
    if (!(cfg.tolerance > 0.0)) throw Error(ErrorCode::InvalidConfig, "--tol must be positive");
    return it->second(Context{cfg, out});
  } catch (const Error& e) {
    err << "error=" << error_code_name(e.code()) << " detail=\"" << e.what() << "\"\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error=Internal detail=\"" << e.what() << "\"\n";
    return kExitNumerical;
  }
}

}  // namespace graphfilter
