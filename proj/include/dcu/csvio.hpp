#pragma once

#include <string>
#include <vector>

namespace dcu::csv {

// 17 significant digits so round-trips and byte-comparisons are exact;
// infinities spelled +inf / -inf to match the tabulated-function files.
std::string num(double v);

double parse_num(const std::string& cell);

void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

// Plain comma splitting, no quoting; first row returned as-is.
std::vector<std::vector<std::string>> read_file(const std::string& path);

}  // namespace dcu::csv
