// csv.hpp: round-trippable numeric CSV output

#pragma once

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>

namespace qbm::csv {

// %.17g: enough digits for any double to round-trip exactly.
std::string format(double value);

// Writes `a,b,c\n`.
void write_row(std::ostream& out, std::initializer_list<double> values);
void write_header(std::ostream& out, std::string_view header);

// Opens `path` for writing, creating parent directories. Throws on failure.
std::ofstream open(const std::filesystem::path& path);

} // namespace qbm::csv
