#include "spgep/io.hpp"

#include <algorithm>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "spgep/errors.hpp"

namespace spgep::io {
namespace {

bool parse_full_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

bool parse_full_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) return false;
  if (v < static_cast<long>(INT_MIN) || v > static_cast<long>(INT_MAX)) return false;
  out = static_cast<int>(v);
  return true;
}

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void check_dims(const std::string& path, long rows, long cols) {
  if (rows < 1 || cols < 1)
    fail(ErrorKind::ParseError, path + ": matrix dimensions must be positive");
  if (rows > kMaxDim || cols > kMaxDim)
    fail(ErrorKind::ParseError,
         path + ": matrix exceeds the supported size (both dimensions capped at " +
             std::to_string(kMaxDim) + "; storage is dense)");
}

double parse_entry(const std::string& path, const std::string& tok) {
  double v;
  if (!parse_full_double(tok, v))
    fail(ErrorKind::ParseError, path + ": cannot parse entry '" + tok + "'");
  if (!std::isfinite(v))
    fail(ErrorKind::ParseError, path + ": non-finite entry '" + tok + "'");
  return v;
}

Matrix load_dense_text(const std::string& path, int rows, int cols, std::istream& in) {
  check_dims(path, rows, cols);
  Matrix m(rows, cols);
  std::string tok;
  for (long i = 0; i < static_cast<long>(rows) * cols; ++i) {
    if (!(in >> tok))
      fail(ErrorKind::ParseError,
           path + ": expected " + std::to_string(static_cast<long>(rows) * cols) +
               " entries, found " + std::to_string(i));
    m.data()[i] = parse_entry(path, tok);
  }
  if (in >> tok) fail(ErrorKind::ParseError, path + ": trailing data '" + tok + "'");
  return m;
}

Matrix load_csv(const std::string& path, const std::string& first_line, std::istream& in) {
  std::vector<double> data;
  long rows = 0;
  long cols = -1;
  std::string line = first_line;
  bool have_line = true;
  while (have_line) {
    const std::string t = trim(line);
    if (!t.empty()) {
      long c = 0;
      size_t pos = 0;
      while (true) {
        const size_t comma = t.find(',', pos);
        const std::string field =
            trim(comma == std::string::npos ? t.substr(pos) : t.substr(pos, comma - pos));
        data.push_back(parse_entry(path, field));
        ++c;
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (cols < 0) {
        cols = c;
      } else if (c != cols) {
        fail(ErrorKind::ParseError, path + ": row " + std::to_string(rows + 1) + " has " +
                                        std::to_string(c) + " fields, expected " +
                                        std::to_string(cols));
      }
      ++rows;
      if (rows > kMaxDim || cols > kMaxDim) check_dims(path, rows, cols);
    }
    have_line = static_cast<bool>(std::getline(in, line));
  }
  if (rows == 0) fail(ErrorKind::ParseError, path + ": empty matrix file");
  check_dims(path, rows, cols);
  Matrix m(static_cast<int>(rows), static_cast<int>(cols));
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

}  // namespace

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");

  std::string first;
  while (std::getline(in, first)) {
    if (!trim(first).empty()) break;
  }
  if (trim(first).empty()) fail(ErrorKind::ParseError, path + ": empty matrix file");

  // A leading "rows cols" pair of integers announces dense text; anything
  // else is CSV.
  if (first.find(',') == std::string::npos) {
    const std::vector<std::string> toks = split_ws(first);
    int r, c;
    if (toks.size() == 2 && parse_full_int(toks[0], r) && parse_full_int(toks[1], c))
      return load_dense_text(path, r, c, in);
  }
  return load_csv(path, first, in);
}

void save_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ParseError, "cannot write '" + path + "'");
  char buf[40];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf;
      if (j + 1 < m.cols()) out << ',';
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::ParseError, "write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::ParseError, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorKind::ParseError, "write failed for '" + path + "'");
}

}  // namespace spgep::io
