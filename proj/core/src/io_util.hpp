#pragma once

// Internal little-endian byte encoding helpers shared by the binary file
// formats (datasets, checkpoints, probability snapshots). Not installed.

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "blockout/errors.hpp"

namespace blockout::detail {

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void magic(const char (&tag)[5]) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(tag[i]));
    }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

    std::size_t offset() const { return offset_; }
    std::size_t remaining() const { return bytes_.size() - offset_; }
    bool exhausted() const { return offset_ == bytes_.size(); }

    std::uint8_t u8(const char* what) {
        need(1, what);
        return bytes_[offset_++];
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(bytes_[offset_++]) << (8 * i);
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[offset_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64(const char* what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[offset_++]) << (8 * i);
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

    void expect_magic(const char (&tag)[5]) {
        const std::size_t at = offset_;
        need(4, "magic");
        for (int i = 0; i < 4; ++i) {
            if (bytes_[offset_++] != static_cast<std::uint8_t>(tag[i]))
                throw ParseError(at, std::string("bad magic, expected \"") + tag + "\"");
        }
    }

    void expect_exhausted() {
        if (!exhausted())
            throw ParseError(offset_, std::to_string(remaining()) + " trailing bytes");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(offset_, what); }

private:
    void need(std::size_t n, const char* what) const {
        if (bytes_.size() - offset_ < n)
            throw ParseError(offset_, std::string("truncated input while reading ") + what);
    }

    std::vector<std::uint8_t> bytes_;
    std::size_t offset_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace blockout::detail
