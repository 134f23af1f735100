#include "plq/csv.hpp"
#include "plq/common.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace plq {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

std::string cell(double x) { return format_number(x); }
std::string cell(int x) { return std::to_string(x); }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw InvalidArgument("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(header_.size()));
    for (const auto& c : cells)
        if (c.find_first_of(",\n\"") != std::string::npos) throw InvalidArgument("csv cell needs quoting: " + c);
    rows_.push_back(std::move(cells));
    return *this;
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    const std::string s = str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

} // namespace plq
