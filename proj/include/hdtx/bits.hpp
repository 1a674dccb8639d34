#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "hdtx/error.hpp"
#include "hdtx/io.hpp"

namespace hdtx {

// Bit sequence with rank/select. Words are 64-bit little-endian. The vector
// either owns its words or views serialized bytes (e.g. a mapped file); the
// per-word rank samples are always rebuilt in memory on construction.
class BitVector {
public:
    class Builder {
    public:
        void push(bool bit) {
            if (n_ % 64 == 0) words_.push_back(0);
            if (bit) words_.back() |= 1ull << (n_ % 64);
            ++n_;
        }
        BitVector finish() { return BitVector(std::move(words_), n_); }

    private:
        std::vector<std::uint64_t> words_;
        std::uint64_t n_ = 0;
    };

    BitVector() = default;

    BitVector(std::vector<std::uint64_t> words, std::uint64_t bits)
        : owned_(std::move(words)), bits_(bits) {
        build_rank();
    }

    // `bytes` must hold exactly word_count(bits) little-endian u64 words.
    static BitVector from_view(io::ByteSpan bytes, std::uint64_t bits) {
        BitVector bv;
        bv.view_ = bytes;
        bv.bits_ = bits;
        bv.build_rank();
        return bv;
    }

    static std::uint64_t word_count(std::uint64_t bits) { return (bits + 63) / 64; }

    std::uint64_t size() const noexcept { return bits_; }

    std::uint64_t word(std::uint64_t i) const {
        if (view_.empty()) return owned_[i];
        std::uint64_t v;
        std::memcpy(&v, view_.data() + i * 8, 8);
        if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
        return v;
    }

    bool get(std::uint64_t pos) const {
        if (pos >= bits_) throw IdOutOfRangeError("bit position out of range");
        return (word(pos / 64) >> (pos % 64)) & 1u;
    }

    std::uint64_t count_ones() const { return rank_.empty() ? 0 : rank_.back(); }

    // Ones in [0, pos).
    std::uint64_t rank1(std::uint64_t pos) const {
        if (pos > bits_) throw IdOutOfRangeError("rank position out of range");
        std::uint64_t w = pos / 64, off = pos % 64;
        std::uint64_t r = rank_[w];
        if (off) r += std::popcount(word(w) & ((1ull << off) - 1));
        return r;
    }

    // Position of the k-th one, 1-based k in [1, count_ones()].
    std::uint64_t select1(std::uint64_t k) const {
        if (k == 0 || k > count_ones()) throw IdOutOfRangeError("select index out of range");
        // First word whose prefix rank reaches k.
        std::uint64_t lo = 0, hi = rank_.size() - 1;
        while (lo < hi) {
            std::uint64_t mid = (lo + hi) / 2;
            if (rank_[mid + 1] >= k)
                hi = mid;
            else
                lo = mid + 1;
        }
        std::uint64_t need = k - rank_[lo];
        std::uint64_t w = word(lo);
        for (std::uint64_t bit = 0;; ++bit) {
            if ((w >> bit) & 1u) {
                if (--need == 0) return lo * 64 + bit;
            }
        }
    }

    void serialize_words(io::Sink& out) const {
        std::uint64_t n = word_count(bits_);
        for (std::uint64_t i = 0; i < n; ++i) io::put_u64(out, word(i));
    }

private:
    void build_rank() {
        std::uint64_t n = word_count(bits_);
        rank_.assign(n + 1, 0);
        for (std::uint64_t i = 0; i < n; ++i) rank_[i + 1] = rank_[i] + std::popcount(word(i));
    }

    std::vector<std::uint64_t> owned_;
    io::ByteSpan view_;
    std::uint64_t bits_ = 0;
    std::vector<std::uint64_t> rank_;  // cumulative ones before each word
};

// Fixed-width bit-packed integer sequence, same dual storage as BitVector.
class PackedSequence {
public:
    // Narrowest width able to hold `max_value`; at least one bit.
    static unsigned width_for(std::uint64_t max_value) {
        unsigned w = static_cast<unsigned>(std::bit_width(max_value));
        return w == 0 ? 1 : w;
    }

    class Builder {
    public:
        explicit Builder(unsigned width) : width_(width) {
            if (width_ == 0 || width_ > 64) throw Error("sequence width must be in [1,64]");
        }

        void push(std::uint64_t v) {
            if (width_ < 64 && v >> width_) throw Error("value wider than sequence width");
            std::uint64_t bitpos = n_ * width_;
            std::uint64_t w = bitpos / 64, off = bitpos % 64;
            if (w >= words_.size()) words_.push_back(0);
            words_[w] |= v << off;
            if (off + width_ > 64) words_.push_back(v >> (64 - off));
            ++n_;
        }

        PackedSequence finish() { return PackedSequence(std::move(words_), n_, width_); }

    private:
        unsigned width_;
        std::vector<std::uint64_t> words_;
        std::uint64_t n_ = 0;
    };

    PackedSequence() = default;

    PackedSequence(std::vector<std::uint64_t> words, std::uint64_t count, unsigned width)
        : owned_(std::move(words)), count_(count), width_(width) {}

    static PackedSequence from_view(io::ByteSpan bytes, std::uint64_t count, unsigned width) {
        PackedSequence s;
        s.view_ = bytes;
        s.count_ = count;
        s.width_ = width;
        return s;
    }

    static std::uint64_t word_count(std::uint64_t count, unsigned width) {
        return (count * width + 63) / 64;
    }

    std::uint64_t size() const noexcept { return count_; }
    unsigned width() const noexcept { return width_; }

    std::uint64_t get(std::uint64_t i) const {
        if (i >= count_) throw IdOutOfRangeError("sequence index out of range");
        std::uint64_t bitpos = i * width_;
        std::uint64_t w = bitpos / 64, off = bitpos % 64;
        std::uint64_t v = word(w) >> off;
        if (off + width_ > 64) v |= word(w + 1) << (64 - off);
        if (width_ < 64) v &= (1ull << width_) - 1;
        return v;
    }

    void serialize_words(io::Sink& out) const {
        std::uint64_t n = word_count(count_, width_);
        for (std::uint64_t i = 0; i < n; ++i) io::put_u64(out, word(i));
    }

private:
    std::uint64_t word(std::uint64_t i) const {
        if (view_.empty()) return owned_[i];
        std::uint64_t v;
        std::memcpy(&v, view_.data() + i * 8, 8);
        if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
        return v;
    }

    std::vector<std::uint64_t> owned_;
    io::ByteSpan view_;
    std::uint64_t count_ = 0;
    unsigned width_ = 1;
};

}  // namespace hdtx
