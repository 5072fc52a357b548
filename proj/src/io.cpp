#include "graphfilter/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "graphfilter/error.hpp"
#include "json.hpp"

namespace graphfilter {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  if (const auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
  return trim(line);
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line_no, strip_comment(line));
  }
}

// Splits on ',' or ';' when the line has either, otherwise on whitespace.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  if (line.find_first_of(",;") != std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find_first_of(",;", start);
      out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) {
    throw ParseError(line, "expected a number for " + std::string(what) + ", got '" +
                               std::string(s) + "'");
  }
  return v;
}

NodeId parse_index(std::string_view s, std::size_t line) {
  unsigned long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty() ||
      v > std::numeric_limits<NodeId>::max()) {
    throw ParseError(line, "expected a node index, got '" + std::string(s) + "'");
  }
  return static_cast<NodeId>(v);
}

std::vector<double> double_array(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw Error(ErrorCode::InvalidConfig, std::string("filter JSON needs array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw Error(ErrorCode::InvalidConfig, std::string("non-number in ") + key);
    out.push_back(v.get<double>());
  }
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Graph parse_edge_list(std::string_view text) {
  std::vector<Edge> edges;
  for_each_line(text, [&](std::size_t line, std::string_view body) {
    if (body.empty()) return;
    const auto fields = split_fields(body);
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError(line, "expected 'u v [w]', got " + std::to_string(fields.size()) + " fields");
    Edge e;
    e.u = parse_index(fields[0], line);
    e.v = parse_index(fields[1], line);
    if (fields.size() == 3) e.w = parse_double(fields[2], line, "weight");
    edges.push_back(e);
  });
  return build_graph(edges);
}

FeatureMatrix parse_features(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for_each_line(text, [&](std::size_t line, std::string_view body) {
    if (body.empty()) return;
    std::vector<double> row;
    for (auto f : split_fields(body)) row.push_back(parse_double(f, line, "feature"));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::RaggedRows, "line " + std::to_string(line) + " has " +
                                             std::to_string(row.size()) + " values, expected " +
                                             std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw ParseError(1, "no feature rows");
  FeatureMatrix x(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), x.row(i).begin());
  return x;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_csv(std::ostream& os, const Matrix& m, std::string_view column_prefix) {
  for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "," : "") << column_prefix << j;
  os << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
    os << '\n';
  }
}

void write_curve_csv(std::ostream& os, const ResponseCurve& c) {
  os << "lambda,g\n";
  for (std::size_t i = 0; i < c.grid.size(); ++i)
    os << format_double(c.grid[i]) << ',' << format_double(c.values[i]) << '\n';
}

void write_eigenvalues_csv(std::ostream& os, const std::vector<double>& eigenvalues) {
  os << "index,eigenvalue\n";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    os << i << ',' << format_double(eigenvalues[i]) << '\n';
}

void write_convergence_csv(std::ostream& os, const ConvergenceStudy& s) {
  os << "degree,max_error,rms_error\n";
  for (const auto& r : s.rows)
    os << r.degree << ',' << format_double(r.max_error) << ',' << format_double(r.rms_error) << '\n';
}

void write_profile_csv(std::ostream& os, const SmoothingProfile& p) {
  os << "depth,energy,pairwise_spread\n";
  for (std::size_t i = 0; i < p.depths.size(); ++i) {
    os << p.depths[i] << ',' << format_double(p.energy[i]) << ','
       << format_double(p.pairwise_spread[i]) << '\n';
  }
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "nodes,nnz,order,features,seconds\n";
  for (const auto& r : rows) {
    os << r.nodes << ',' << r.nnz << ',' << r.order << ',' << r.features << ','
       << format_double(r.seconds) << '\n';
  }
}

std::string filter_to_json(const FilterSpec& f) {
  json j;
  j["family"] = std::string(family_name(f.kind()));
  j["basis"] = std::string(scheme_name(f.basis));
  j["name"] = f.name;
  if (const auto* lin = std::get_if<LinearFilter>(&f.family)) {
    j["phi"] = lin->phi;
    j["psi"] = lin->psi;
    j["self_term"] = lin->self_term == SelfTerm::Identity ? "Identity" : "SelfLoopDegreeInverse";
  } else if (const auto* poly = std::get_if<PolynomialFilter>(&f.family)) {
    j["coeffs"] = poly->coeffs;
  } else {
    const auto& rat = std::get<RationalFilter>(f.family);
    j["num_coeffs"] = rat.num;
    j["den_coeffs"] = rat.den;
  }
  return j.dump(2) + "\n";
}

FilterSpec filter_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("filter JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "filter JSON must be an object");
  try {
    FilterSpec f;
    const std::string basis_key = j.contains("basis") ? "basis" : "scheme";
    if (!j.contains(basis_key)) throw Error(ErrorCode::InvalidConfig, "filter JSON needs 'basis'");
    const auto basis = parse_scheme(j.at(basis_key).get<std::string>());
    if (!basis || *basis == Scheme::Derived)
      throw Error(ErrorCode::UnsupportedScheme, "unknown basis " + j.at(basis_key).dump());
    f.basis = *basis;
    f.name = j.value("name", std::string("custom"));
    const std::string family = lower(j.at("family").get<std::string>());
    if (family == "linear") {
      LinearFilter lin;
      lin.phi = j.at("phi").get<double>();
      lin.psi = j.at("psi").get<double>();
      const std::string st = j.value("self_term", std::string("Identity"));
      if (st == "Identity") {
        lin.self_term = SelfTerm::Identity;
      } else if (st == "SelfLoopDegreeInverse") {
        lin.self_term = SelfTerm::SelfLoopDegreeInverse;
      } else {
        throw Error(ErrorCode::InvalidConfig, "unknown self_term " + st);
      }
      f.family = lin;
    } else if (family == "polynomial") {
      f.family = PolynomialFilter{double_array(j, "coeffs")};
    } else if (family == "rational") {
      f.family = RationalFilter{double_array(j, "num_coeffs"), double_array(j, "den_coeffs")};
    } else {
      throw Error(ErrorCode::UnsupportedFamily, "unknown family " + family);
    }
    validate(f);
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("filter JSON: ") + e.what());
  }
}

}  // namespace graphfilter
