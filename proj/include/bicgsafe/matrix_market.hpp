#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>

#include "bicgsafe/csr_matrix.hpp"

namespace bicgsafe {

struct MatrixMetadata {
    std::string name;
    Index n = 0;
    Index nnz = 0;
    bool symmetric = false;
    std::string source_path;
    /// Entries listed in the file, before symmetric expansion and duplicate merging.
    Index file_entries = 0;
};

class MatrixMarketError : public std::runtime_error {
public:
    MatrixMarketError(const std::string& what, long line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

/// Reads a coordinate real/integer, general/symmetric file. Symmetric storage is
/// mirrored into general form and duplicate entries are summed.
std::pair<CsrMatrix<double>, MatrixMetadata> load_matrix_market(const std::filesystem::path& path);

/// Writes `general` coordinate format with round-trip precision.
void write_matrix_market(const std::filesystem::path& path, const CsrMatrix<double>& A);

}  // namespace bicgsafe
