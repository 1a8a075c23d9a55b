#include "labs/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lbs {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw IoError(source + ":" + std::to_string(line) + ": " + what);
}

Scalar parse_real(std::string_view field, const std::string& source, std::size_t line) {
  Scalar v = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    fail(source, line, "cannot parse '" + std::string(field) + "' as a real number");
  }
  if (!std::isfinite(v)) fail(source, line, "non-finite value '" + std::string(field) + "'");
  return v;
}

nlohmann::ordered_json moments(const Vector& v) {
  nlohmann::ordered_json j;
  const Scalar mean = v.mean();
  const Scalar sd = v.size() > 1 ? std::sqrt((v.array() - mean).square().sum() / (v.size() - 1.0)) : 0.0;
  std::vector<Scalar> values(v.data(), v.data() + v.size());
  j["mean"] = mean;
  j["sd"] = sd;
  j["min"] = v.minCoeff();
  j["q025"] = empirical_quantile(values, 0.025);
  j["median"] = empirical_quantile(values, 0.5);
  j["q975"] = empirical_quantile(values, 0.975);
  j["max"] = v.maxCoeff();
  return j;
}

nlohmann::ordered_json counter_json(const MoveCounter& c) {
  nlohmann::ordered_json j;
  j["attempts"] = c.attempts;
  j["accepts"] = c.accepts;
  j["rate"] = c.rate();
  return j;
}

}  // namespace

std::string format_double(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

CsvTable parse_csv(std::string_view text, const std::string& source) {
  CsvTable table;
  std::vector<std::vector<Scalar>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool have_header = false;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const std::string_view raw = text.substr(start, end == std::string_view::npos ? end : end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (!have_header) {
      for (auto f : fields) table.header.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      fail(source, line_no, "expected " + std::to_string(table.header.size()) + " fields, got " +
                                std::to_string(fields.size()));
    }
    std::vector<Scalar> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_real(f, source, line_no));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw IoError(source + ": missing header line");
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

std::string to_csv(const std::vector<std::string>& header, const Matrix& values) {
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out += ',';
    out += header[j];
  }
  out += '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) out += ',';
      out += format_double(values(i, j));
    }
    out += '\n';
  }
  return out;
}

Dataset parse_dataset(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header != std::vector<std::string>{"x", "y"}) {
    throw IoError(path.string() + ":1: expected header 'x,y'");
  }
  if (t.values.rows() == 0) throw IoError(path.string() + ": dataset has no observations");
  return Dataset(t.values.col(0), t.values.col(1));
}

std::string dataset_csv(const Dataset& data) {
  Matrix m(data.size(), 2);
  m << data.x, data.y;
  return to_csv({"x", "y"}, m);
}

std::string truth_csv(const Vector& x, const Vector& f) {
  Matrix m(x.size(), 2);
  m << x, f;
  return to_csv({"x", "f"}, m);
}

std::string quantile_column(Scalar level) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "q%03d", static_cast<int>(std::lround(level * 1000.0)));
  return buf;
}

std::string curve_csv(const PosteriorCurve& curve, Scalar lower, Scalar upper) {
  Matrix m(curve.grid.size(), 4);
  m << curve.grid, curve.mean, curve.lower, curve.upper;
  return to_csv({"x", "mean", quantile_column(lower), quantile_column(upper)}, m);
}

Trace trace_from_output(const ChainOutput& out) {
  Trace t;
  t.degrees = out.degrees;
  t.iterations = out.iterations;
  t.sigma2 = out.sigma2;
  t.counts = out.counts;
  t.rates = out.rates;
  t.grid = out.grid;
  t.curves = out.curves;
  return t;
}

std::string trace_csv(const ChainOutput& out) {
  const Index ndeg = static_cast<Index>(out.degrees.size());
  std::vector<std::string> header{"sample", "iteration", "sigma2"};
  for (int k : out.degrees) {
    header.push_back("J_" + std::to_string(k));
    header.push_back("M_" + std::to_string(k));
  }
  for (Index g = 0; g < out.grid.size(); ++g) header.push_back("eta@" + format_double(out.grid[g]));
  Matrix m(out.retained(), 3 + 2 * ndeg + out.grid.size());
  for (Index i = 0; i < out.retained(); ++i) {
    m(i, 0) = static_cast<Scalar>(i);
    m(i, 1) = static_cast<Scalar>(out.iterations[static_cast<std::size_t>(i)]);
    m(i, 2) = out.sigma2[i];
    for (Index j = 0; j < ndeg; ++j) {
      m(i, 3 + 2 * j) = out.counts(i, j);
      m(i, 4 + 2 * j) = out.rates(i, j);
    }
    m.block(i, 3 + 2 * ndeg, 1, out.grid.size()) = out.curves.row(i);
  }
  return to_csv(header, m);
}

Trace parse_trace(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::string src = path.string();
  if (t.header.size() < 3 || t.header[0] != "sample" || t.header[1] != "iteration" || t.header[2] != "sigma2") {
    throw IoError(src + ":1: expected header starting 'sample,iteration,sigma2'");
  }
  if (t.values.rows() == 0) throw IoError(src + ": trace has no samples");
  Trace trace;
  std::size_t col = 3;
  while (col + 1 < t.header.size() && t.header[col].rfind("J_", 0) == 0) {
    if (t.header[col + 1] != "M_" + t.header[col].substr(2)) throw IoError(src + ":1: J_k without matching M_k");
    trace.degrees.push_back(std::stoi(t.header[col].substr(2)));
    col += 2;
  }
  const std::size_t first_eta = col;
  std::vector<Scalar> grid;
  for (; col < t.header.size(); ++col) {
    if (t.header[col].rfind("eta@", 0) != 0) throw IoError(src + ":1: unexpected column '" + t.header[col] + "'");
    grid.push_back(parse_real(std::string_view(t.header[col]).substr(4), src, 1));
  }
  const Index rows = t.values.rows();
  const Index ndeg = static_cast<Index>(trace.degrees.size());
  trace.sigma2 = t.values.col(2);
  trace.counts.resize(rows, ndeg);
  trace.rates.resize(rows, ndeg);
  for (Index i = 0; i < rows; ++i) {
    trace.iterations.push_back(static_cast<long>(t.values(i, 1)));
    for (Index j = 0; j < ndeg; ++j) {
      trace.counts(i, j) = static_cast<int>(t.values(i, 3 + 2 * j));
      trace.rates(i, j) = t.values(i, 4 + 2 * j);
    }
  }
  trace.grid = Eigen::Map<const Vector>(grid.data(), static_cast<Index>(grid.size()));
  trace.curves = t.values.rightCols(static_cast<Index>(t.header.size() - first_eta));
  return trace;
}

std::string summary_json(const Trace& trace, const std::vector<AcceptanceStats>& acceptance,
                         const std::vector<std::pair<std::string, std::string>>& config) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [key, value] : config) cfg[key] = value;
  j["config"] = cfg;
  j["retained"] = trace.sigma2.size();
  j["sigma2"] = moments(trace.sigma2);
  nlohmann::ordered_json degrees = nlohmann::ordered_json::array();
  for (std::size_t d = 0; d < trace.degrees.size(); ++d) {
    const Index col = static_cast<Index>(d);
    nlohmann::ordered_json e;
    e["degree"] = trace.degrees[d];
    e["J"] = moments(trace.counts.col(col).cast<Scalar>());
    e["M"] = moments(trace.rates.col(col));
    if (d < acceptance.size()) {
      const AcceptanceStats& a = acceptance[d];
      nlohmann::ordered_json acc;
      acc["birth"] = counter_json(a.birth);
      acc["death"] = counter_json(a.death);
      acc["relocate_knot"] = counter_json(a.relocate);
      acc["relocation_moves"] = a.relocation_moves;
      e["acceptance"] = acc;
    }
    degrees.push_back(e);
  }
  j["degrees"] = degrees;
  return j.dump(2) + "\n";
}

}  // namespace lbs
