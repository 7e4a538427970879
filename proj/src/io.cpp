#include "rydrelay/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

namespace rydrelay {

std::string format_double(double value) {
    if (std::isnan(value))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto parent = path.parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);

    static std::mt19937_64 rng{std::random_device{}()};
    const auto tmp = path.string() + ".tmp." + std::to_string(rng());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open temporary file " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw std::runtime_error("failed writing " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size())
        throw std::invalid_argument("csv_table: header/column count mismatch");
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c)
            out += ',';
        out += header[c];
    }
    out += '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns) {
        if (col.size() != rows)
            throw std::invalid_argument("csv_table: ragged columns");
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c)
                out += ',';
            out += format_double(columns[c][r]);
        }
        out += '\n';
    }
    return out;
}

} // namespace rydrelay
