#include "qce/output.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>
#include <unistd.h>

#include "qce/types.hpp"

namespace qce::io {

void atomic_write(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv(const std::vector<std::pair<std::string, std::string>>& comments,
                const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns)
{
    require(header.size() == columns.size(), "csv: header and column counts differ");
    std::string out;
    for (const auto& [k, v] : comments) out += "# " + k + "=" + v + "\n";
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += "\n";
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns) require(col.size() == rows, "csv: ragged columns");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + format_double(columns[c][r]);
        out += "\n";
    }
    return out;
}

CsvTable parse_csv(const std::string& text)
{
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto body = line.substr(line.find_first_not_of("# "));
            const auto eq = body.find('=');
            if (eq != std::string::npos) table.comments.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        if (!have_header) {
            table.header = fields;
            table.columns.resize(fields.size());
            have_header = true;
            continue;
        }
        require(fields.size() == table.header.size(), "parse_csv: row width does not match the header");
        for (std::size_t c = 0; c < fields.size(); ++c) table.columns[c].push_back(std::stod(fields[c]));
    }
    require(have_header, "parse_csv: no header row");
    return table;
}

} // namespace qce::io
