#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lsnet::csv {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
std::vector<std::vector<std::string>> read_file(const std::string& path);
std::vector<std::vector<std::string>> parse(std::string_view text);

std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

// %.17g, enough to reproduce the double exactly.
std::string exact(double v);
// Fixed decimals.
std::string fixed(double v, int decimals);

std::string trim(std::string_view s);

// Writes atomically enough for our purposes: whole content at once, LF endings.
void write_file(const std::string& path, const std::string& content);

}  // namespace lsnet::csv
