#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "graphfilter/approx.hpp"
#include "graphfilter/analysis.hpp"
#include "graphfilter/dense.hpp"
#include "graphfilter/filter.hpp"
#include "graphfilter/graph.hpp"
#include "graphfilter/spectral.hpp"

namespace graphfilter {

/// One `u v [w]` per line, whitespace separated, 0-based; `#` starts a
/// comment. Throws ParseError with the 1-based line, then any build_graph
/// error.
Graph parse_edge_list(std::string_view text);

/// One row per line, values separated by commas, semicolons, tabs or
/// spaces. Blank lines and `#` comments are skipped. Throws ParseError or
/// RaggedRows.
FeatureMatrix parse_features(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// %.17g, which round-trips every double.
std::string format_double(double v);

void write_matrix_csv(std::ostream& os, const Matrix& m, std::string_view column_prefix);
void write_curve_csv(std::ostream& os, const ResponseCurve& c);
void write_eigenvalues_csv(std::ostream& os, const std::vector<double>& eigenvalues);
void write_convergence_csv(std::ostream& os, const ConvergenceStudy& s);
void write_profile_csv(std::ostream& os, const SmoothingProfile& p);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

/// JSON with keys family, basis, name and either phi/psi/self_term, coeffs,
/// or num_coeffs/den_coeffs. Parsing also accepts `scheme` for `basis`.
std::string filter_to_json(const FilterSpec& f);
FilterSpec filter_from_json(std::string_view text);

}  // namespace graphfilter
