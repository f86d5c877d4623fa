#include "qcb/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qcb {

namespace {

std::string cell(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw NumericError("csv: cannot format value");
    return std::string(buf, p);
}

} // namespace

std::string config_hash_line(std::uint64_t hash) { return "# config_hash=" + hex64(hash) + "\n"; }

CsvWriter::CsvWriter(std::uint64_t config_hash) : text_(config_hash_line(config_hash)) {}

CsvWriter& CsvWriter::header(const std::vector<std::string>& cols) { return row(cols); }

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ',';
        text_ += cell(values[i]);
    }
    text_ += '\n';
    return *this;
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    return *this;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ResourceError("cannot open '" + path + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw ResourceError("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

void export_complex_matrix(const std::string& stem, const MatrixXc& m, nlohmann::json header) {
    static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");
    header["rows"] = m.rows();
    header["cols"] = m.cols();
    header["dtype"] = "complex128";
    header["order"] = "row-major";
    header["endianness"] = "little";
    std::string bytes(static_cast<std::size_t>(m.size()) * 16, '\0');
    std::size_t off = 0;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            const double re = m(i, j).real(), im = m(i, j).imag();
            std::memcpy(bytes.data() + off, &re, 8);
            std::memcpy(bytes.data() + off + 8, &im, 8);
            off += 16;
        }
    write_text(stem + ".bin", bytes);
    write_json(stem + ".json", header);
}

MatrixXc import_complex_matrix(const std::string& stem) {
    const auto header = nlohmann::json::parse(read_text(stem + ".json"));
    const Index rows = header.at("rows").get<Index>(), cols = header.at("cols").get<Index>();
    const std::string bytes = read_text(stem + ".bin");
    if (bytes.size() != static_cast<std::size_t>(rows * cols) * 16) throw NumericError("binary size mismatch");
    MatrixXc m(rows, cols);
    std::size_t off = 0;
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            double re, im;
            std::memcpy(&re, bytes.data() + off, 8);
            std::memcpy(&im, bytes.data() + off + 8, 8);
            m(i, j) = cplx(re, im);
            off += 16;
        }
    return m;
}

void export_decomposition(const std::string& stem, const SpectralDecomposition& dec, nlohmann::json header) {
    header["energies"] = std::vector<double>(dec.energies.data(), dec.energies.data() + dec.energies.size());
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : dec.blocks) blocks.push_back({{"begin", b.begin}, {"size", b.size}, {"labels", b.labels}});
    header["blocks"] = std::move(blocks);
    header["normalized"] = dec.normalized;
    header["columns"] = "eigenvectors";
    export_complex_matrix(stem, dec.vectors, std::move(header));
}

} // namespace qcb
