#pragma once

#include <string>
#include <vector>

namespace dcm {

std::string read_file(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

std::string trim(const std::string& s);

/// "%.12g" rendering used by every export, so identical values always
/// produce identical bytes.
std::string fmt_double(double v);

} // namespace dcm
