#include "t4f/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "t4f/error.hpp"

namespace t4f::io {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + path.string());
}

static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
    const auto text = read_file(path);
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.emplace_back(t);
    }
    return out;
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw Error("csv: missing column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; any = true; break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r': break;
            case '\n':
                if (any || !field.empty()) {
                    row.push_back(std::move(field));
                    rows.push_back(std::move(row));
                }
                row.clear();
                field.clear();
                any = false;
                break;
            default: field.push_back(c); any = true;
        }
    }
    if (quoted) throw Error("csv: unterminated quote");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    CsvTable table;
    if (rows.empty()) throw Error("csv: empty input");
    table.header = std::move(rows.front());
    for (auto& h : table.header) h = std::string(trim(h));
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != table.header.size())
            throw Error("csv: row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                        " fields, expected " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(rows[r]));
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    try {
        return parse_csv(read_file(path));
    } catch (const Error& e) {
        throw Error(path.filename().string() + ": " + e.what());
    }
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string_view BinaryReader::take(std::size_t n) {
    if (n > data_.size() - pos_) throw Error("binary: truncated input");
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
}

void BinaryReader::seek(std::size_t pos) {
    if (pos > data_.size()) throw Error("binary: seek past end");
    pos_ = pos;
}

}  // namespace t4f::io
