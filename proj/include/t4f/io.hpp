#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace t4f::io {

using Json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Non-empty, trimmed lines; lines starting with '#' are comments.
std::vector<std::string> read_word_list(const std::filesystem::path& path);

/// Minimal RFC-4180 reader. The first row is returned as the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by header name; throws t4f::Error if absent.
    std::size_t column(std::string_view name) const;
};
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

std::string sha256_hex(std::string_view bytes);

/// Sorted keys, no insignificant whitespace. This is the wire format of every JSON artifact.
inline std::string canonical(const Json& j) { return j.dump(); }

/// Little-endian binary encoder.
class BinaryWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) { put_le(v, 4); }
    void u64(std::uint64_t v) { put_le(v, 8); }
    void i64(std::int64_t v) { put_le(static_cast<std::uint64_t>(v), 8); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        put_le(bits, 8);
    }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    void raw(std::string_view s) { buf_.append(s); }
    void patch_u64(std::size_t at, std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_[at + i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }

    std::size_t size() const { return buf_.size(); }
    const std::string& bytes() const { return buf_; }

private:
    void put_le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    std::string buf_;
};

/// Bounds-checked little-endian decoder over a byte buffer; throws t4f::Error on truncation.
class BinaryReader {
public:
    explicit BinaryReader(std::string_view bytes) : data_(bytes) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
    std::uint64_t u64() { return get_le(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(get_le(8)); }
    double f64() {
        const std::uint64_t bits = get_le(8);
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::string str() {
        const auto n = u32();
        return std::string(take(n));
    }
    std::string_view take(std::size_t n);

    void seek(std::size_t pos);
    std::size_t pos() const { return pos_; }
    std::size_t size() const { return data_.size(); }

private:
    std::uint64_t get_le(int n) {
        const auto b = take(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = n - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
        return v;
    }
    std::string_view data_;
    std::size_t pos_ = 0;
};

}  // namespace t4f::io
