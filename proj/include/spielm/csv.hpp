#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace spielm {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Opens `path` for writing (creating parent directories) and writes the
/// header line. Throws std::runtime_error if the file cannot be opened.
std::ofstream open_csv(const std::filesystem::path& path, std::string_view header);

}  // namespace spielm
