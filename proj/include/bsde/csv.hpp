#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bsde {

// Fixed-schema CSV table with deterministic number formatting (%.17g), so a
// run with the same seed and config reproduces byte-identical bodies.
// Timestamps and wall-clock data never enter tables; they live in the
// separate run metadata file.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<std::string>& cells);
    std::string body() const;

    static std::string num(double v);
    static std::string num(std::size_t v);

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

// FNV-1a 64-bit over the canonical config text, printed as 16 hex digits;
// every emitted row carries it next to the seed.
std::string fnv1a_hex(const std::string& text);

// Writes via a temp file in the same directory followed by a rename.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace bsde
