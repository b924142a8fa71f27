#pragma once

#include <string>

#include "spgep/matrix.hpp"

namespace spgep::io {

// Documented cap on either dimension of a matrix file; everything is dense.
inline constexpr int kMaxDim = 20000;

// Two on-disk formats, told apart by the first non-blank line:
//   - dense text: "rows cols" header, then whitespace-separated entries
//   - CSV: comma-separated values, no header, one row per line
// Every entry must be finite and row lengths consistent; violations raise
// ParseError.
Matrix load_matrix(const std::string& path);

void save_matrix_csv(const std::string& path, const Matrix& m);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace spgep::io
