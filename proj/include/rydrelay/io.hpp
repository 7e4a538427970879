#ifndef RYDRELAY_IO_HPP
#define RYDRELAY_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace rydrelay {

/// Formats a double with 17 significant digits ('.' decimal, no grouping),
/// enough to round-trip any IEEE double exactly. NaN prints as "nan".
std::string format_double(double value);

/// Writes content to path atomically (temp file in the same directory, then
/// rename), creating parent directories as needed.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Assembles a CSV document from a header row and value columns of equal
/// length.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

} // namespace rydrelay

#endif
