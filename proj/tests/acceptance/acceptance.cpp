// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [all | c1 ... c9] [--csv-dir DIR]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "graphfilter/analysis.hpp"
#include "graphfilter/approx.hpp"
#include "graphfilter/filter.hpp"
#include "graphfilter/io.hpp"
#include "graphfilter/spectral.hpp"
#include "oracle.hpp"

using namespace graphfilter;

namespace {

// Tolerances and sizes, fixed by the acceptance criteria.
constexpr double kEquivTol = 1e-8;
constexpr double kEquivSeconds = 30.0;
constexpr double kResponseTol = 1e-12;
constexpr std::size_t kResponseGrid = 256;
constexpr double kReductionTol = 1e-10;
constexpr double kNode2VecTol = 1e-12;
constexpr double kRowSumTol = 1e-10;
constexpr double kSlopeTarget = -1.0;
constexpr double kSlopeBand = 0.5;
constexpr double kRationalGain = 10.0;
constexpr double kFitSeconds = 60.0;
constexpr std::size_t kFitGrid = 1024;
constexpr double kResidualTol = 1e-10;
constexpr double kFixedVsDenseTol = 1e-8;
constexpr double kWalkTol = 0.01;
constexpr std::size_t kWalks = 50000;
constexpr double kSmoothDecay = 1e-6;
constexpr double kRestartFloor = 0.01;
constexpr std::size_t kSmoothDepth = 200;
constexpr double kBenchSlope = 1.0;
constexpr double kBenchBand = 0.3;
constexpr std::size_t kSuiteGraphs = 20;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Instance {
  std::string label;
  FilterSpec filter;
};

// The twelve preset configurations of the equivalence suite.
std::vector<Instance> suite_filters() {
  return {
      {"gcn", make_preset("gcn")},
      {"sage", make_preset("sage")},
      {"gin", make_preset("gin", {{"eps", 0.1}})},
      {"chebnet_K3", make_preset("chebnet", {{"theta0", 0.8}, {"theta1", -0.45}, {"theta2", 0.3}})},
      {"dcnn_K3", make_preset("dcnn", {{"psi1", 0.6}, {"psi2", -0.25}, {"psi3", 0.15}})},
      {"sgc_K2", make_preset("sgc", {{"K", 2}})},
      {"sgc_K5", make_preset("sgc", {{"K", 5}})},
      {"ar_lp_a0.5", make_preset("ar_lp", {{"alpha", 0.5}})},
      {"ppnp_a0.1", make_preset("ppnp", {{"alpha", 0.1}})},
      {"ppnp_a0.5", make_preset("ppnp", {{"alpha", 0.5}})},
      {"ppnp_a0.9", make_preset("ppnp", {{"alpha", 0.9}})},
      {"arma_a0.4_b0.6", make_preset("arma", {{"a", 0.4}, {"b", 0.6}})},
  };
}

struct SuiteGraph {
  Graph g;
  FeatureMatrix x;
};

// Seeded random graphs with N in [8, 64], half of them weighted.
std::vector<SuiteGraph> suite_graphs() {
  std::vector<SuiteGraph> out;
  for (std::size_t i = 0; i < kSuiteGraphs; ++i) {
    const std::size_t n = 8 + (i * 29) % 57;
    const std::size_t extra = std::min(n, n * (n - 1) / 2 - (n - 1));
    Graph g = random_connected_graph(n, extra, 1000 + i, i % 2 == 1);
    FeatureMatrix x = random_features(n, 4, 2000 + i);
    out.push_back({std::move(g), std::move(x)});
  }
  return out;
}

struct SuiteRun {
  double worst = 0.0;
  std::size_t failures = 0;
  std::size_t count = 0;
  std::string csv;
};

SuiteRun run_equivalence_suite() {
  SuiteRun run;
  std::ostringstream csv;
  csv << "filter,graph,nodes,max_rel_error,route\n";
  std::ostringstream outputs;
  const auto graphs = suite_graphs();
  for (const auto& inst : suite_filters()) {
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      const auto r = check_equivalence(inst.filter, graphs[gi].g, graphs[gi].x, kEquivTol);
      run.worst = std::max(run.worst, r.max_rel_error);
      run.failures += r.pass ? 0 : 1;
      ++run.count;
      csv << inst.label << ',' << gi << ',' << graphs[gi].g.num_nodes() << ','
          << format_double(r.max_rel_error) << ',' << r.route << '\n';
      outputs << "# " << inst.label << " graph " << gi << '\n';
      write_matrix_csv(outputs, r.spatial, "z");
    }
  }
  run.csv = csv.str() + outputs.str();
  return run;
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteRun run = run_equivalence_suite();
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = run.failures == 0 && run.worst <= kEquivTol && secs < kEquivSeconds;
  o.detail = std::to_string(run.count) + " instances, worst max_rel_error=" + num(run.worst) +
             " (tol " + num(kEquivTol) + "), failures=" + std::to_string(run.failures) +
             ", time=" + num(secs) + "s (limit " + num(kEquivSeconds) + "s)";
  return o;
}

double chebyshev_t(std::size_t k, double u) {
  // cos(k acos u) on [-1, 1].
  return std::cos(static_cast<double>(k) * std::acos(std::clamp(u, -1.0, 1.0)));
}

Outcome c2() {
  struct Row {
    std::string label;
    FilterSpec f;
    std::function<double(double)> table;
    double lo = 0.0;
    double hi = 2.0;
  };
  const double eps = 0.1, alpha_ar = 0.5, alpha_pp = 0.1, a = 0.4, b = 0.6;
  const std::vector<double> theta{0.8, -0.45, 0.3};
  const std::vector<double> psi{0.6, -0.25, 0.15};
  const std::vector<Row> rows{
      {"gcn", make_preset("gcn"), [](double l) { return 1.0 - l; }},
      // The mean aggregator D^-1(I + A) on its own normalised axis.
      {"sage", make_preset("sage"), [](double l) { return 1.0 - l; }},
      {"gin", make_preset("gin", {{"eps", eps}}), [&](double l) { return 1.0 + eps + l; }, -4.0, 4.0},
      {"chebnet",
       make_preset("chebnet", {{"theta0", theta[0]}, {"theta1", theta[1]}, {"theta2", theta[2]}}),
       [&](double l) {
         double s = 0.0;
         for (std::size_t k = 0; k < theta.size(); ++k) s += theta[k] * chebyshev_t(k, l - 1.0);
         return s;
       }},
      {"dcnn", make_preset("dcnn", {{"psi1", psi[0]}, {"psi2", psi[1]}, {"psi3", psi[2]}}),
       [&](double l) {
         double s = 0.0;
         for (std::size_t k = 0; k < psi.size(); ++k) s += psi[k] * std::pow(1.0 - l, double(k + 1));
         return s;
       }},
      {"sgc_K2", make_preset("sgc", {{"K", 2}}), [](double l) { return std::pow(1.0 - l, 2); }},
      {"sgc_K5", make_preset("sgc", {{"K", 5}}), [](double l) { return std::pow(1.0 - l, 5); }},
      {"ar_lp", make_preset("ar_lp", {{"alpha", alpha_ar}}),
       [&](double l) { return 1.0 / (1.0 + alpha_ar * l); }},
      {"ppnp", make_preset("ppnp", {{"alpha", alpha_pp}}),
       [&](double l) { return alpha_pp / (alpha_pp + (1.0 - alpha_pp) * l); }},
      {"arma", make_preset("arma", {{"a", a}, {"b", b}}),
       [&](double l) { return b / (1.0 - a + a * l); }},
  };
  double worst = 0.0;
  std::string worst_label;
  for (const auto& row : rows) {
    const auto grid = uniform_grid(row.lo, row.hi, kResponseGrid);
    const auto curve = frequency_response(row.f, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double err = std::abs(curve.values[i] - row.table(grid[i]));
      if (err > worst) {
        worst = err;
        worst_label = row.label;
      }
    }
  }
  Outcome o;
  o.pass = worst <= kResponseTol;
  o.detail = std::to_string(rows.size()) + " presets on " + std::to_string(kResponseGrid) +
             "-point grids, worst |g - closed form|=" + num(worst) +
             (worst_label.empty() ? "" : " (" + worst_label + ")") + " (tol " + num(kResponseTol) + ")";
  return o;
}

double rel(const Matrix& got, const Matrix& want) {
  const double scale = max_abs(want);
  return scale > 0.0 ? max_abs_diff(got, want) / scale : max_abs_diff(got, want);
}

Outcome c3() {
  double sgc_worst = 0.0, arma_worst = 0.0, n2v_worst = 0.0, row_worst = 0.0;
  const FilterSpec gcn = make_preset("gcn");
  for (const auto& sg : suite_graphs()) {
    for (int k = 1; k <= 6; ++k) {
      FeatureMatrix z = sg.x;
      for (int layer = 0; layer < k; ++layer) z = apply_filter(gcn, sg.g, z);
      const auto sgc = apply_filter(make_preset("sgc", {{"K", double(k)}}), sg.g, sg.x);
      sgc_worst = std::max(sgc_worst, rel(sgc, z));
    }
    for (double a : {0.1, 0.4, 0.5, 0.9}) {
      const SolverOptions tight{1000, 1e-13};
      const auto arma = apply_filter(make_preset("arma", {{"a", a}, {"b", 1.0 - a}}), sg.g, sg.x, tight);
      const auto ppnp = apply_filter(make_preset("ppnp", {{"alpha", 1.0 - a}}), sg.g, sg.x, tight);
      arma_worst = std::max(arma_worst, rel(arma, ppnp));
    }
    const auto a = oracle::adjacency(sg.g.num_nodes(), sg.g.edges());
    const auto p = oracle::scheme(a, Scheme::AdjRW);
    const oracle::MatrixXd want = oracle::MatrixXd::Identity(p.rows(), p.cols()) + p * p;
    n2v_worst = std::max(n2v_worst,
                         oracle::max_abs(oracle::to_eigen(node2vec_operator(sg.g, 1.0, 1.0)) - want));
    for (std::size_t t : {1u, 2u, 5u}) {
      const Matrix m = dense_filter_matrix(deepwalk_operator(sg.g, t), sg.g);
      for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (double v : m.row(i)) s += v;
        row_worst = std::max(row_worst, std::abs(s - 1.0));
      }
    }
  }
  Outcome o;
  o.pass = sgc_worst <= kReductionTol && arma_worst <= kReductionTol && n2v_worst <= kNode2VecTol &&
           row_worst <= kRowSumTol;
  o.detail = "sgc vs stacked gcn " + num(sgc_worst) + ", arma(a,1-a) vs ppnp(1-a) " +
             num(arma_worst) + " (tol " + num(kReductionTol) + "), node2vec(1,1) vs I+P^2 " +
             num(n2v_worst) + " (tol " + num(kNode2VecTol) + "), deepwalk row sums " +
             num(row_worst) + " (tol " + num(kRowSumTol) + ")";
  return o;
}

Outcome c4() {
  const auto t0 = std::chrono::steady_clock::now();
  const TargetSignal step = step_target();
  const auto poly = convergence_study(step, FitFamily::Polynomial, {4, 8, 16, 32, 64}, kFitGrid);
  const FitResult rat = fit_rational(step, 4, 4, kFitGrid);
  const double secs = seconds_since(t0);

  std::vector<double> lk, lrms;
  for (const auto& r : poly.rows) {
    lk.push_back(std::log(static_cast<double>(r.degree)));
    lrms.push_back(std::log(r.rms_error));
  }
  const double p8 = poly.rows[1].max_error;
  const double p64 = poly.rows.back().max_error;
  const bool slope_ok = std::abs(poly.slope - kSlopeTarget) <= kSlopeBand;
  const bool gain_ok = rat.max_error * kRationalGain <= p8;
  const bool beats64 = rat.max_error < p64;
  Outcome o;
  o.pass = slope_ok && gain_ok && beats64 && secs < kFitSeconds;
  o.detail = "poly sup-error log-log slope=" + num(poly.slope) + " (want " + num(kSlopeTarget) +
             " +/- " + num(kSlopeBand) + (slope_ok ? ", ok" : ", MISS") + "); rational(4,4) " +
             num(rat.max_error) + " vs poly8 " + num(p8) + " (want >= " + num(kRationalGain) +
             "x smaller" + (gain_ok ? ", ok" : ", MISS") + "); vs poly64 " + num(p64) +
             (beats64 ? " ok" : " MISS") + "; rms slope=" + num(fitted_slope(lk, lrms)) +
             " (info); time=" + num(secs) + "s";
  return o;
}

Outcome c5() {
  double worst_res = 0.0;
  std::size_t solves = 0;
  const auto graphs = suite_graphs();
  for (const auto& inst : suite_filters()) {
    const auto* rat = std::get_if<RationalFilter>(&inst.filter.family);
    if (rat == nullptr) continue;
    for (const auto& sg : graphs) {
      const auto basis = basis_operator(sg.g, inst.filter.basis);
      const FeatureMatrix z = apply_rational(inst.filter, sg.g, sg.x);
      worst_res = std::max(worst_res, rational_residual(*rat, basis, sg.x, z));
      ++solves;
    }
  }
  double worst_agree = 0.0;
  for (double alpha : {0.1, 0.5, 0.9}) {
    const FilterSpec f = make_preset("ppnp", {{"alpha", alpha}});
    const auto& rat = std::get<RationalFilter>(f.family);
    for (const auto& sg : graphs) {
      const auto basis = basis_operator(sg.g, f.basis);
      const auto fp = solve_rational(rat, basis, sg.x, {1000, 1e-10, SolveMethod::FixedPoint});
      const auto dd = solve_rational(rat, basis, sg.x, {1000, 1e-10, SolveMethod::DenseDirect});
      worst_agree = std::max(worst_agree, rel(fp.z, dd.z));
    }
  }
  Outcome o;
  o.pass = worst_res <= kResidualTol && worst_agree <= kFixedVsDenseTol;
  o.detail = std::to_string(solves) + " rational solves, worst residual=" + num(worst_res) +
             " (tol " + num(kResidualTol) + "); ppnp FixedPoint vs DenseDirect " +
             num(worst_agree) + " (tol " + num(kFixedVsDenseTol) + ")";
  return o;
}

Outcome c6() {
  const std::vector<std::pair<std::string, Graph>> graphs{
      {"K3", build_graph(std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}})},
      {"N16", random_connected_graph(16, 12, 16)},
  };
  bool pass = true;
  std::ostringstream detail;
  for (const auto& [name, g] : graphs) {
    for (std::size_t t : {1u, 2u}) {
      WalkConfig cfg;
      cfg.window = t;
      cfg.num_walks = kWalks;
      cfg.seed = 7;
      const double dev = monte_carlo_walk_check(g, cfg).max_abs_dev;
      cfg.num_walks = 2 * kWalks;
      double dev2 = monte_carlo_walk_check(g, cfg).max_abs_dev;
      double base = dev;
      bool retried = false;
      if (dev2 > base) {
        // One reseeded retry of the doubling comparison.
        retried = true;
        cfg.seed = 8;
        cfg.num_walks = kWalks;
        base = monte_carlo_walk_check(g, cfg).max_abs_dev;
        cfg.num_walks = 2 * kWalks;
        dev2 = monte_carlo_walk_check(g, cfg).max_abs_dev;
      }
      const bool ok = dev <= kWalkTol && dev2 <= base;
      pass = pass && ok;
      detail << name << " t=" << t << ": dev=" << num(dev) << " doubled=" << num(dev2)
             << (retried ? " (reseeded)" : "") << (ok ? "" : " MISS") << "; ";
    }
  }
  Outcome o;
  o.pass = pass;
  o.detail = detail.str() + "tol " + num(kWalkTol);
  return o;
}

Graph smoothing_graph() {
  for (std::uint64_t seed = 1;; ++seed) {
    Graph g = random_regular_graph(16, 4, seed);
    if (g.is_connected() && !g.is_bipartite()) return g;
  }
}

Outcome c7() {
  const Graph g = smoothing_graph();
  const FeatureMatrix x = random_features(16, 4, 77);
  const std::vector<std::size_t> depths{0, kSmoothDepth};
  const auto sgc = oversmoothing_profile(g, x, make_preset("sgc", {{"K", 1}}), depths);
  const auto ppnp = oversmoothing_profile(g, x, make_preset("ppnp", {{"alpha", 0.2}}), depths);
  const double sgc_ratio = sgc.energy[1] / sgc.energy[0];
  const double ppnp_ratio = ppnp.energy[1] / ppnp.energy[0];
  Outcome o;
  o.pass = sgc_ratio <= kSmoothDecay && ppnp_ratio >= kRestartFloor;
  o.detail = "4-regular N=16: sgc energy ratio at depth 200=" + num(sgc_ratio) + " (want <= " +
             num(kSmoothDecay) + "), ppnp(0.2) ratio=" + num(ppnp_ratio) + " (want >= " +
             num(kRestartFloor) + ")";
  return o;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fitted_slope(lx, ly);
}

Outcome c8() {
  // Narrow features keep the working set in cache at every size, so the
  // slope reflects operation count rather than the memory hierarchy.
  constexpr std::size_t features = 4;
  constexpr std::size_t reps = 31;
  const auto rows = bench_filter(make_preset("gcn"), {1000, 2000, 4000, 8000}, features, reps);
  std::vector<double> ns, ts;
  for (const auto& r : rows) {
    ns.push_back(static_cast<double>(r.nodes));
    ts.push_back(r.seconds);
  }
  const double slope_n = log_slope(ns, ts);

  const Graph g = random_regular_graph(4000, 16, 4001);
  const FeatureMatrix x = random_features(4000, features, 4002);
  std::vector<double> ks, tk;
  for (std::size_t k : {1u, 2u, 4u, 8u}) {
    ks.push_back(static_cast<double>(k));
    tk.push_back(bench_once(make_preset("sgc", {{"K", double(k)}}), g, x, reps).seconds);
  }
  const double slope_k = log_slope(ks, tk);
  Outcome o;
  o.pass = std::abs(slope_n - kBenchSlope) <= kBenchBand && std::abs(slope_k - kBenchSlope) <= kBenchBand;
  o.detail = "gcn time vs N slope=" + num(slope_n) + ", sgc time vs K slope=" + num(slope_k) +
             " (want " + num(kBenchSlope) + " +/- " + num(kBenchBand) + ")";
  return o;
}

std::filesystem::path g_csv_dir;

Outcome c9() {
  const SuiteRun a = run_equivalence_suite();
  const SuiteRun b = run_equivalence_suite();
  const auto dir = g_csv_dir.empty() ? std::filesystem::temp_directory_path() / "graphfilter_c9"
                                     : g_csv_dir;
  std::filesystem::create_directories(dir);
  write_text_file(dir / "suite_run1.csv", a.csv);
  write_text_file(dir / "suite_run2.csv", b.csv);
  const bool same = read_text_file(dir / "suite_run1.csv") == read_text_file(dir / "suite_run2.csv");
  Outcome o;
  o.pass = same && !a.csv.empty();
  o.detail = std::string(same ? "byte-identical" : "DIFFERENT") + " suite CSVs (" +
             std::to_string(a.csv.size()) + " bytes) in " + dir.string();
  return o;
}

const std::map<std::string, std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::map<std::string, std::pair<std::string, std::function<Outcome()>>> table{
      {"c1", {"spatial-spectral equivalence of all presets", c1}},
      {"c2", {"frequency responses match closed forms", c2}},
      {"c3", {"reduction identities", c3}},
      {"c4", {"expressivity hierarchy on the step target", c4}},
      {"c5", {"rational solver contract", c5}},
      {"c6", {"Monte-Carlo walk co-occurrence", c6}},
      {"c7", {"over-smoothing versus restart", c7}},
      {"c8", {"benchmark scaling", c8}},
      {"c9", {"determinism of suite CSVs", c9}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--csv-dir" && i + 1 < argc) {
      g_csv_dir = argv[++i];
    } else if (arg == "all") {
      for (const auto& [id, _] : criteria()) selected.push_back(id);
    } else if (criteria().count(arg) != 0) {
      selected.push_back(arg);
    } else {
      std::cerr << "usage: acceptance [all | c1..c9] [--csv-dir DIR]\n";
      return 2;
    }
  }
  if (selected.empty())
    for (const auto& [id, _] : criteria()) selected.push_back(id);

  bool all_pass = true;
  for (const auto& id : selected) {
    const auto& [title, fn] = criteria().at(id);
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << " " << title << ": " << o.detail << std::endl;
  }
  return all_pass ? 0 : 1;
}
