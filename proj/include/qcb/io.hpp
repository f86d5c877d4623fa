#pragma once

#include "qcb/spectral.hpp"
#include "qcb/types.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace qcb {

// First line of every CSV artifact.
std::string config_hash_line(std::uint64_t hash);

// Locale-independent CSV: ',' separator, '.' decimal, LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::uint64_t config_hash);
    CsvWriter& header(const std::vector<std::string>& cols);
    CsvWriter& row(const std::vector<double>& values);
    CsvWriter& row(const std::vector<std::string>& cells);
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

// stem.bin holds row-major complex128 (little endian, re/im interleaved); stem.json the header.
void export_complex_matrix(const std::string& stem, const MatrixXc& m, nlohmann::json header);
MatrixXc import_complex_matrix(const std::string& stem);

// Eigenvectors as a complex matrix plus energies and block structure in the header.
void export_decomposition(const std::string& stem, const SpectralDecomposition& dec, nlohmann::json header);

} // namespace qcb
