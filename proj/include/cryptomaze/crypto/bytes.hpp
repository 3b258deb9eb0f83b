#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cryptomaze/errors.hpp"

namespace cryptomaze::crypto {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Appends big-endian integers and raw byte strings to a buffer.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { put_be(v, 2); }
    void u32(std::uint32_t v) { put_be(v, 4); }
    void u64(std::uint64_t v) { put_be(v, 8); }
    void i64(std::int64_t v) { put_be(static_cast<std::uint64_t>(v), 8); }
    void raw(ByteView bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }

    // u32 length prefix followed by the bytes.
    void blob(ByteView bytes) {
        u32(static_cast<std::uint32_t>(bytes.size()));
        raw(bytes);
    }

    [[nodiscard]] const Bytes& bytes() const& { return buf_; }
    [[nodiscard]] Bytes take() && { return std::move(buf_); }

private:
    void put_be(std::uint64_t v, int width) {
        for (int i = width - 1; i >= 0; --i) {
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    Bytes buf_;
};

/// Bounds-checked reader over a byte span; throws EncodingError on underrun.
class ByteReader {
public:
    explicit ByteReader(ByteView bytes) : data_(bytes) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get_be(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get_be(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_be(4)); }
    std::uint64_t u64() { return get_be(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(get_be(8)); }

    ByteView raw(std::size_t n) {
        need(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    ByteView blob() { return raw(u32()); }

    [[nodiscard]] bool done() const { return pos_ == data_.size(); }
    [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) {
            throw EncodingError("truncated input: need " + std::to_string(n) + " bytes, have " +
                                std::to_string(data_.size() - pos_));
        }
    }

    std::uint64_t get_be(std::size_t width) {
        need(width);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i) {
            v = (v << 8) | data_[pos_ + i];
        }
        pos_ += width;
        return v;
    }

    ByteView data_;
    std::size_t pos_ = 0;
};

std::string to_hex(ByteView bytes);

}  // namespace cryptomaze::crypto
