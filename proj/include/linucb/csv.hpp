#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "linucb/errors.hpp"

namespace linucb {

// Floats are written with 17 significant digits so CSV output is
// byte-stable and round-trips exactly.
inline std::string csv_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string csv_join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

inline std::vector<std::vector<std::string>> csv_read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericalError("cannot open CSV file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(csv_split(line));
    }
    return rows;
}

}  // namespace linucb
