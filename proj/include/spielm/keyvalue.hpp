#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace spielm {

using KeyValues = std::map<std::string, std::string>;

/// `key = value` per line; blank lines and lines starting with '#' are
/// ignored, surrounding whitespace is trimmed. Later keys override earlier.
/// Throws std::runtime_error on a line without '=' or with an empty key.
KeyValues read_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

/// Sorted `key=value` lines.
void write_key_values(std::ostream& out, const KeyValues& kv);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);

}  // namespace spielm
