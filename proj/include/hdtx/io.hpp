#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hdtx/error.hpp"

namespace hdtx::io {

using ByteSpan = std::span<const std::uint8_t>;

// ---------------------------------------------------------------------------
// CRC-32 (IEEE 802.3 polynomial, reflected, same parameters as zip/zlib).
// ---------------------------------------------------------------------------

namespace detail {
constexpr std::array<std::uint32_t, 256> make_crc32_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) c = (c & 1u) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
        table[i] = c;
    }
    return table;
}
inline constexpr auto kCrc32Table = make_crc32_table();
}  // namespace detail

class Crc32 {
public:
    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        for (std::size_t i = 0; i < n; ++i)
            state_ = detail::kCrc32Table[(state_ ^ p[i]) & 0xFFu] ^ (state_ >> 8);
    }
    void update(ByteSpan bytes) { update(bytes.data(), bytes.size()); }
    std::uint32_t value() const { return state_ ^ 0xFFFFFFFFu; }

private:
    std::uint32_t state_ = 0xFFFFFFFFu;
};

inline std::uint32_t crc32(ByteSpan bytes) {
    Crc32 c;
    c.update(bytes);
    return c.value();
}

// ---------------------------------------------------------------------------
// Byte sinks. Everything written through a sink is counted, so section
// writers can record offsets without asking the underlying stream.
// ---------------------------------------------------------------------------

class Sink {
public:
    virtual ~Sink() = default;

    void write(const void* data, std::size_t n) {
        do_write(data, n);
        count_ += n;
    }
    void write(ByteSpan bytes) { write(bytes.data(), bytes.size()); }
    std::uint64_t count() const noexcept { return count_; }

private:
    virtual void do_write(const void* data, std::size_t n) = 0;
    std::uint64_t count_ = 0;
};

class VectorSink : public Sink {
public:
    explicit VectorSink(std::vector<std::uint8_t>& out) : out_(out) {}

private:
    void do_write(const void* data, std::size_t n) override {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out_.insert(out_.end(), p, p + n);
    }
    std::vector<std::uint8_t>& out_;
};

class StreamSink : public Sink {
public:
    explicit StreamSink(std::ostream& out) : out_(out) {}

private:
    void do_write(const void* data, std::size_t n) override {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        if (!out_) throw IoError("write failed");
    }
    std::ostream& out_;
};

// Forwards to an inner sink while accumulating a CRC-32 of the bytes seen.
class CrcSink : public Sink {
public:
    explicit CrcSink(Sink& inner) : inner_(inner) {}
    std::uint32_t crc() const { return crc_.value(); }

private:
    void do_write(const void* data, std::size_t n) override {
        crc_.update(data, n);
        inner_.write(data, n);
    }
    Sink& inner_;
    Crc32 crc_;
};

inline void put_u8(Sink& s, std::uint8_t v) { s.write(&v, 1); }

inline void put_u32(Sink& s, std::uint32_t v) {
    std::uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    s.write(b, 4);
}

inline void put_u64(Sink& s, std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    s.write(b, 8);
}

// Unsigned LEB128.
inline void put_varint(Sink& s, std::uint64_t v) {
    std::uint8_t buf[10];
    std::size_t n = 0;
    do {
        std::uint8_t byte = v & 0x7Fu;
        v >>= 7;
        if (v != 0) byte |= 0x80u;
        buf[n++] = byte;
    } while (v != 0);
    s.write(buf, n);
}

// ---------------------------------------------------------------------------
// Bounds-checked reader over a byte span. All overruns throw Truncated so a
// corrupted length field can never turn into an out-of-bounds read.
// ---------------------------------------------------------------------------

class Cursor {
public:
    explicit Cursor(ByteSpan data, std::string context = {})
        : data_(data), context_(std::move(context)) {}

    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    bool at_end() const noexcept { return pos_ == data_.size(); }

    ByteSpan take(std::size_t n) {
        if (n > remaining()) throw truncated();
        ByteSpan out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    void seek(std::size_t pos) {
        if (pos > data_.size()) throw truncated();
        pos_ = pos;
    }

    std::uint8_t u8() { return take(1)[0]; }

    std::uint32_t u32() {
        ByteSpan b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        ByteSpan b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }

    std::uint64_t varint() {
        std::uint64_t v = 0;
        unsigned shift = 0;
        for (;;) {
            if (at_end()) throw truncated();
            std::uint8_t byte = data_[pos_++];
            if (shift == 63 && (byte & 0xFEu))
                throw FormatError(FormatDefect::Structure, context_ + ": varint overflow");
            v |= static_cast<std::uint64_t>(byte & 0x7Fu) << shift;
            if (!(byte & 0x80u)) return v;
            shift += 7;
        }
    }

private:
    FormatError truncated() const {
        return {FormatDefect::Truncated, context_.empty() ? "unexpected end of data"
                                                          : context_ + ": unexpected end of data"};
    }

    ByteSpan data_;
    std::size_t pos_ = 0;
    std::string context_;
};

}  // namespace hdtx::io
