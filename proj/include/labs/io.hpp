#pragma once

// CSV and JSON files read and written by the command-line tool. All reals
// are printed with 17 significant digits so every file parses back to the
// identical doubles.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "labs/sampler.hpp"

namespace lbs {

/// Error while reading or writing a file; the message names the file and,
/// for malformed content, the 1-based line.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(Scalar v);

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;  ///< One row per data line.
};

/// Numeric CSV with a header line. Rejects ragged rows, unparseable or
/// non-finite fields, naming the offending line.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, const std::string& source = "<text>");
std::string to_csv(const std::vector<std::string>& header, const Matrix& values);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncate and replace.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// `x,y` dataset. The domain is [min x, max x].
Dataset parse_dataset(const std::filesystem::path& path);
std::string dataset_csv(const Dataset& data);

/// `x,f` noiseless signal.
std::string truth_csv(const Vector& x, const Vector& f);

/// `x,mean,qLLL,qUUU`, quantile columns named by level in thousandths.
std::string curve_csv(const PosteriorCurve& curve, Scalar lower, Scalar upper);
std::string quantile_column(Scalar level);

/// Retained samples: sample, iteration, sigma2, J_k and M_k per degree, then
/// eta at every grid point (header `eta@<x>`).
std::string trace_csv(const ChainOutput& out);

struct Trace {
  std::vector<int> degrees;
  std::vector<long> iterations;
  Vector sigma2;
  Eigen::MatrixXi counts;
  Matrix rates;
  Vector grid;
  Matrix curves;
};

Trace parse_trace(const std::filesystem::path& path);
Trace trace_from_output(const ChainOutput& out);

/// Chain summary with stable key order. `acceptance` may be empty (e.g. when
/// summarising a trace file).
std::string summary_json(const Trace& trace, const std::vector<AcceptanceStats>& acceptance,
                         const std::vector<std::pair<std::string, std::string>>& config);

}  // namespace lbs
