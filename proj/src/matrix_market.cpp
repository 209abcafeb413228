#include "spielm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "spielm/csv.hpp"

namespace spielm {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("matrix market: " + msg);
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail("empty input");

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") fail("missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") fail("unsupported object '" + object + "'");
  if (format != "coordinate") fail("only coordinate format is supported");
  if (field != "real" && field != "double")
    fail("unsupported field '" + field + "' (real only)");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    fail("unsupported symmetry '" + symmetry + "'");

  // Skip comments and blank lines up to the size line.
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    break;
  }
  long long m = -1, n = -1, nz = -1;
  {
    std::istringstream size_line(line);
    if (!(size_line >> m >> n >> nz) || m < 0 || n < 0 || nz < 0)
      fail("malformed size line '" + line + "'");
  }
  if (symmetric && m != n) fail("symmetric matrix must be square");

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(symmetric ? 2 * nz : nz));
  long long read = 0;
  while (read < nz && std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v)) fail("malformed entry line '" + line + "'");
    if (i < 1 || i > m || j < 1 || j > n)
      fail("entry (" + std::to_string(i) + ", " + std::to_string(j) +
           ") out of range");
    entries.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
    if (symmetric && i != j)
      entries.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), v});
    ++read;
  }
  if (read != nz)
    fail("expected " + std::to_string(nz) + " entries, found " + std::to_string(read));
  return SparseMatrix::from_triplets(static_cast<Index>(m), static_cast<Index>(n),
                                     std::move(entries));
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
  const auto offsets = A.row_offsets();
  const auto cols = A.col_indices();
  const auto vals = A.values();
  for (Index i = 0; i < A.rows(); ++i)
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p)
      out << i + 1 << ' ' << cols[p] + 1 << ' ' << format_double(vals[p]) << '\n';
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& A) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_matrix_market(out, A);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace spielm
