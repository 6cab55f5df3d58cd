#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetrain/common/error.hpp"

namespace hetrain {

/// Little-endian binary writer used by every file format and wire frame.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }

    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }

    void bytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    void raw(std::string_view s) {
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    /// u32 length prefix followed by the payload.
    void blob(std::span<const uint8_t> b) {
        u32(static_cast<uint32_t>(b.size()));
        bytes(b);
    }

    void str(std::string_view s) {
        u32(static_cast<uint32_t>(s.size()));
        raw(s);
    }

    const std::vector<uint8_t>& data() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }

private:
    std::vector<uint8_t> buf_;
};

/// Bounds-checked little-endian reader; throws FormatError on truncation.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_++]) << (8 * i);
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_++]) << (8 * i);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::span<const uint8_t> bytes(size_t n) {
        need(n);
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::vector<uint8_t> blob() {
        uint32_t n = u32();
        auto s = bytes(n);
        return {s.begin(), s.end()};
    }

    std::string str() {
        uint32_t n = u32();
        auto s = bytes(n);
        return {reinterpret_cast<const char*>(s.data()), s.size()};
    }

    /// Reads n raw bytes and compares against an expected tag.
    void expect(std::string_view tag, const char* what) {
        auto s = bytes(tag.size());
        if (std::memcmp(s.data(), tag.data(), tag.size()) != 0)
            throw FormatError(std::string(what) + ": bad magic");
    }

    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

private:
    void need(size_t n) const {
        if (data_.size() - pos_ < n) throw FormatError("truncated input");
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const uint8_t> data);

} // namespace hetrain
