#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace plq {

/// Decimal, 12 significant digits, "-0" written as "0". Non-finite values are
/// written as nan / inf / -inf.
std::string format_number(double x);

/// Small in-memory table written with LF line endings and no quoting
/// (cells must not contain commas or newlines).
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row(std::vector<std::string> cells);
    const std::vector<std::string>& header() const { return header_; }
    std::size_t size() const { return rows_.size(); }

    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Shorthand for building rows: numbers are formatted with format_number.
std::string cell(double x);
std::string cell(int x);
inline std::string cell(const std::string& s) { return s; }
inline std::string cell(const char* s) { return s; }

} // namespace plq
