#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ymh/common.hpp"

namespace ymh {

/// Fixed 17-significant-digit float formatting, enough to round-trip
/// doubles bit-exactly for regression comparisons.
inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Self-describing CSV: "# key = value" provenance comments, then one
/// header row, then data rows.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void comment(const std::string& key, const std::string& value) {
        os_ << "# " << key << " = " << value << "\n";
    }
    void comment(const std::string& key, double value) { comment(key, csv_number(value)); }
    void comment(const std::string& key, std::int64_t value) {
        comment(key, std::to_string(value));
    }

    void header(const std::vector<std::string>& cols) { write_row(cols); }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(csv_number(v));
        write_row(cells);
    }

    void row(const std::vector<std::string>& cells) { write_row(cells); }

private:
    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << "\n";
    }

    std::ostream& os_;
};

}  // namespace ymh
