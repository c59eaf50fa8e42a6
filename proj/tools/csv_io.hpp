// csv_io.hpp - numeric CSV files with a versioned schema line
//
//   # bjj-csv v1 <schema>
//   col_a,col_b,...
//   1.0000000000000000,2.5,...
//
// Values are written with 17 significant digits so a read-back is bit exact.
// Non-finite values are written as nan / inf / -inf.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bjj::io {

inline constexpr const char* kCsvMagic = "# bjj-csv v1";

struct CsvTable {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;
    std::vector<double> values(const std::string& name) const;
};

std::string format_double(double value);

// Throws std::runtime_error on IO failure or ragged rows.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
// Throws std::runtime_error on a missing/unsupported header or malformed cell.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace bjj::io
