#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qce::io {

/// Writes `content` to a temporary file beside `path` and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string sha256_hex(const std::string& data);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// CSV text: one `# key=value` line per comment, a header row, then rows.
std::string csv(const std::vector<std::pair<std::string, std::string>>& comments,
                const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& columns);

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

CsvTable parse_csv(const std::string& text);

} // namespace qce::io
