#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graphfilter/cli.hpp"
#include "graphfilter/io.hpp"

namespace gf = graphfilter;

namespace {

// Flag values staged separately so that --config can be applied first and
// explicitly given flags override it.
struct Staged {
  std::vector<std::function<void(gf::RunConfig&)>> apply;
};

template <typename T, typename Set>
void flag(CLI::App& app, Staged& staged, const std::string& name, const std::string& help,
          Set set) {
  auto value = std::make_shared<T>();
  CLI::Option* opt = app.add_option(name, *value, help);
  staged.apply.push_back([opt, value, set](gf::RunConfig& cfg) {
    if (opt->count() > 0) set(cfg, *value);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph filter toolkit: spatial filters, spectral oracle, fitting and analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Staged staged;
  std::string config_path;
  std::vector<std::string> params;
  app.add_option("--config", config_path, "JSON file of option values; flags override it");
  app.add_option("--param", params, "Preset parameter k=v (repeatable)");

  using C = gf::RunConfig;
  using Sizes = std::vector<std::size_t>;
  flag<std::string>(app, staged, "--graph", "Edge-list file", [](C& c, auto v) { c.graph_path = v; });
  flag<std::string>(app, staged, "--features", "Feature CSV (default: random from --seed)",
                    [](C& c, auto v) { c.features_path = v; });
  flag<std::size_t>(app, staged, "--feature-dim", "Columns of random features",
                    [](C& c, auto v) { c.feature_dim = v; });
  flag<std::string>(app, staged, "--filter", "Preset name or FilterSpec JSON file",
                    [](C& c, auto v) { c.filter = v; });
  flag<std::string>(app, staged, "--out", "Output file", [](C& c, auto v) { c.output_path = v; });
  flag<double>(app, staged, "--tol", "Pass tolerance", [](C& c, auto v) { c.tolerance = v; });
  flag<std::uint64_t>(app, staged, "--seed", "RNG seed", [](C& c, auto v) { c.seed = v; });
  flag<std::size_t>(app, staged, "--grid", "Grid size", [](C& c, auto v) { c.grid_size = v; });
  flag<std::string>(app, staged, "--scheme", "Operator for spectrum",
                    [](C& c, auto v) { c.scheme = v; });
  flag<double>(app, staged, "--lo", "Lower end of the lambda domain", [](C& c, auto v) { c.lo = v; });
  flag<double>(app, staged, "--hi", "Upper end of the lambda domain", [](C& c, auto v) { c.hi = v; });
  flag<std::string>(app, staged, "--target", "Fit target: step or filter",
                    [](C& c, auto v) { c.target = v; });
  flag<double>(app, staged, "--threshold", "Step location", [](C& c, auto v) { c.threshold = v; });
  flag<std::string>(app, staged, "--family", "polynomial or rational",
                    [](C& c, auto v) { c.family = v; });
  flag<std::size_t>(app, staged, "--degree", "Fit (numerator) degree",
                    [](C& c, auto v) { c.degree = v; });
  flag<std::size_t>(app, staged, "--den-degree", "Rational denominator degree",
                    [](C& c, auto v) { c.den_degree = v; });
  flag<Sizes>(app, staged, "--degrees", "Degrees for converge", [](C& c, auto v) { c.degrees = v; });
  flag<Sizes>(app, staged, "--depths", "Depths for oversmooth", [](C& c, auto v) { c.depths = v; });
  flag<std::size_t>(app, staged, "--window", "Walk window t", [](C& c, auto v) { c.window = v; });
  flag<std::size_t>(app, staged, "--walks", "Walks per start node",
                    [](C& c, auto v) { c.num_walks = v; });
  flag<std::size_t>(app, staged, "--walk-length", "Nodes per walk",
                    [](C& c, auto v) { c.walk_length = v; });
  flag<Sizes>(app, staged, "--sizes", "Graph sizes for bench", [](C& c, auto v) { c.sizes = v; });
  flag<std::size_t>(app, staged, "--reps", "Bench repetitions",
                    [](C& c, auto v) { c.repetitions = v; });
  flag<std::size_t>(app, staged, "--regular-degree", "Degree of bench graphs",
                    [](C& c, auto v) { c.regular_degree = v; });

  const std::map<std::string, std::string> about{
      {"filter", "Apply a filter, write Z as CSV"},
      {"spectrum", "Eigenvalues of an operator"},
      {"response", "Frequency response curve"},
      {"equivalence", "Spatial vs spectral check; exit 0 iff within --tol"},
      {"fit", "Fit one polynomial or rational approximant"},
      {"converge", "Error table and slope over --degrees"},
      {"oversmooth", "Energy and spread over --depths"},
      {"walkcheck", "Monte-Carlo walk counts vs closed form"},
      {"bench", "Timing over --sizes on random regular graphs"},
  };
  for (const auto& name : gf::command_names()) {
    const auto it = about.find(name);
    app.add_subcommand(name, it == about.end() ? "" : it->second)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error=Usage detail=\"" << e.what() << "\"\n";
    return gf::kExitUsage;
  }

  gf::RunConfig cfg;
  try {
    if (!config_path.empty()) gf::load_config_json(gf::read_text_file(config_path), cfg);
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0)
        throw gf::Error(gf::ErrorCode::InvalidParam, "--param expects k=v, got '" + p + "'");
      std::size_t used = 0;
      const double v = std::stod(p.substr(eq + 1), &used);
      if (used != p.size() - eq - 1)
        throw gf::Error(gf::ErrorCode::InvalidParam, "--param value is not a number: '" + p + "'");
      cfg.params[p.substr(0, eq)] = v;
    }
  } catch (const gf::Error& e) {
    std::cerr << "error=" << gf::error_code_name(e.code()) << " detail=\"" << e.what() << "\"\n";
    return gf::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error=InvalidParam detail=\"" << e.what() << "\"\n";
    return gf::kExitUsage;
  }
  for (const auto& set : staged.apply) set(cfg);
  cfg.command = app.get_subcommands().front()->get_name();
  return gf::run_command(cfg, std::cout, std::cerr);
}
