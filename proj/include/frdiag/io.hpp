#pragma once

#include <string>
#include <vector>

#include "frdiag/measure.hpp"

namespace frdiag::io {

/// %.17g
std::string fmt(double v);

/// {"atom0": m, "atoms": [[x, m], ...], "nodes": [[x, f, w], ...]}
std::string to_json(const PositiveMeasure& mu);
PositiveMeasure measure_from_json(const std::string& text);

/// Writes a CSV file with a header line; every value printed at 17 digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace frdiag::io
