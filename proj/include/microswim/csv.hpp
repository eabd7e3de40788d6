#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace microswim {

/// Formats a double so it round-trips bit-exactly through text.
std::string format_double(double v);

/// CSV emitter with a `# schema=` comment line and a mandatory header row.
/// Numeric cells are serialized with format_double so identical runs yield
/// byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& schema,
              const std::vector<std::string>& columns);

    void row(const std::vector<double>& values);
    /// Mixed row: raw cells, caller formats numbers (used for label columns).
    void row_raw(const std::vector<std::string>& cells);
    void close();

private:
    std::ofstream out_;
    std::size_t n_columns_;
    std::filesystem::path path_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row
};

/// Reads a CSV with optional leading `#` comment lines and a header row.
/// Throws DataError naming the offending line on structural problems.
CsvTable read_csv(const std::filesystem::path& path);

/// Cell -> double with line-number context on failure.
double parse_double_cell(const std::string& cell, const std::filesystem::path& path,
                         std::size_t line_number);

}  // namespace microswim
