#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace tlmp {

/// Numbers are written with 9 significant digits ("%.9g"), so output is
/// byte-stable across runs and platforms with IEEE doubles.
std::string format_number(double value);

class CsvTable {
public:
    using Cell = std::variant<std::string, double, long long, std::size_t, bool>;

    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<Cell> row);
    std::size_t rows() const { return rows_; }

    std::string str() const { return text_; }

    /// Writes to a temporary sibling, then renames over `path`.
    void write(const std::filesystem::path& path) const;

private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string text_;
};

/// Reader for files produced by CsvTable; handles its quoting.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace tlmp
