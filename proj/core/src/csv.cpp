#include "tlmp/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tlmp {

std::string format_number(double value) {
    if (value == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void append_line(std::string& text, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text += ',';
        text += cells[i];
    }
    text += '\n';
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    for (auto& h : header) h = quote(h);
    append_line(text_, header);
}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_) throw std::invalid_argument("CsvTable: row has the wrong number of cells");
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (const auto& cell : row) {
        cells.push_back(std::visit(
            [](const auto& v) -> std::string {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, std::string>) return quote(v);
                else if constexpr (std::is_same_v<V, double>) return format_number(v);
                else if constexpr (std::is_same_v<V, bool>) return v ? "1" : "0";
                else return std::to_string(v);
            },
            cell));
    }
    append_line(text_, cells);
    ++rows_;
}

void CsvTable::write(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text_;
    }
    std::filesystem::rename(tmp, path);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells(1);
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c != '"') cells.back() += c;
                else if (i + 1 < line.size() && line[i + 1] == '"') cells.back() += line[++i];
                else quoted = false;
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.emplace_back();
            } else {
                cells.back() += c;
            }
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace tlmp
