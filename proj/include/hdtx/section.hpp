#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hdtx/error.hpp"
#include "hdtx/instrumentation.hpp"
#include "hdtx/io.hpp"
#include "hdtx/term.hpp"

namespace hdtx {

inline constexpr std::uint32_t kDefaultBlockSize = 16;

// Plain front coding over a strictly increasing string sequence. Each block
// stores its first string whole (varint length + bytes); every following
// string is (varint shared-prefix-with-predecessor, varint suffix length,
// suffix bytes). Block start offsets into the payload are kept separately.
class PfcEncoder {
public:
    PfcEncoder(io::Sink& payload, std::uint32_t block_size)
        : payload_(payload), block_size_(block_size), base_(payload.count()) {
        if (block_size_ == 0) throw Error("block size must be positive");
    }

    void add(std::string_view term) {
        if (count_ > 0 && order_bytes(prev_, term) != std::strong_ordering::less)
            throw NotSortedError("section entries must be strictly increasing: \"" + prev_ +
                                 "\" then \"" + std::string(term) + "\"");
        if (count_ % block_size_ == 0) {
            offsets_.push_back(payload_.count() - base_);
            io::put_varint(payload_, term.size());
            payload_.write(term.data(), term.size());
        } else {
            auto mismatch = std::mismatch(prev_.begin(), prev_.end(), term.begin(), term.end());
            std::size_t prefix = static_cast<std::size_t>(mismatch.first - prev_.begin());
            io::put_varint(payload_, prefix);
            io::put_varint(payload_, term.size() - prefix);
            payload_.write(term.data() + prefix, term.size() - prefix);
        }
        prev_.assign(term);
        ++count_;
    }

    std::uint64_t count() const noexcept { return count_; }
    const std::vector<std::uint64_t>& offsets() const noexcept { return offsets_; }
    std::vector<std::uint64_t> take_offsets() { return std::move(offsets_); }

private:
    io::Sink& payload_;
    std::uint32_t block_size_;
    std::uint64_t base_ = 0;
    std::uint64_t count_ = 0;
    std::string prev_;
    std::vector<std::uint64_t> offsets_;
};

namespace pfcdetail {

// Rolling decoder for one block. Holds a single string buffer; decoding the
// next entry rewrites it in place.
class BlockDecoder {
public:
    BlockDecoder(io::ByteSpan payload, std::uint64_t offset)
        : cur_(payload, "front-coded payload") {
        cur_.seek(offset);
    }

    // Decodes the next entry into `buf`. `first` selects head decoding.
    void next(std::string& buf, bool first) {
        if (first) {
            std::uint64_t len = cur_.varint();
            io::ByteSpan bytes = cur_.take(len);
            buf.assign(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        } else {
            std::uint64_t prefix = cur_.varint();
            std::uint64_t suffix = cur_.varint();
            if (prefix > buf.size())
                throw FormatError(FormatDefect::Structure, "front coding prefix exceeds predecessor");
            io::ByteSpan bytes = cur_.take(suffix);
            buf.resize(prefix);
            buf.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        }
    }

    std::uint64_t pos() const { return cur_.pos(); }

private:
    io::Cursor cur_;
};

}  // namespace pfcdetail

// Immutable sorted string section with 1-based positional ids.
class DictionarySection {
public:
    DictionarySection() = default;

    DictionarySection(std::uint64_t entries, std::uint32_t block_size,
                      std::vector<std::uint64_t> offsets, std::vector<std::uint8_t> payload)
        : entries_(entries),
          block_size_(block_size),
          offsets_(std::move(offsets)),
          owned_payload_(std::move(payload)) {}

    static DictionarySection from_view(std::uint64_t entries, std::uint32_t block_size,
                                       std::vector<std::uint64_t> offsets, io::ByteSpan payload) {
        DictionarySection s;
        s.entries_ = entries;
        s.block_size_ = block_size == 0 ? kDefaultBlockSize : block_size;
        s.offsets_ = std::move(offsets);
        s.payload_view_ = payload;
        return s;
    }

    std::uint64_t size() const noexcept { return entries_; }
    std::uint32_t block_size() const noexcept { return block_size_; }
    const std::vector<std::uint64_t>& block_offsets() const noexcept { return offsets_; }

    io::ByteSpan payload() const noexcept {
        return owned_payload_.empty() ? payload_view_ : io::ByteSpan(owned_payload_);
    }

    // Binary search over block heads, then a linear scan inside the block.
    std::optional<std::uint64_t> locate(std::string_view term) const {
        if (entries_ == 0) return std::nullopt;
        std::uint64_t lo = 0, hi = offsets_.size();  // first block with head > term
        while (lo < hi) {
            std::uint64_t mid = (lo + hi) / 2;
            if (order_bytes(head(mid), term) == std::strong_ordering::greater)
                hi = mid;
            else
                lo = mid + 1;
        }
        if (lo == 0) return std::nullopt;  // term sorts before the first entry
        std::uint64_t block = lo - 1;
        std::uint64_t in_block = block_entries(block);

        instrument::ResidentGuard guard(1);
        std::string buf;
        pfcdetail::BlockDecoder dec(payload(), offsets_[block]);
        for (std::uint64_t i = 0; i < in_block; ++i) {
            dec.next(buf, i == 0);
            auto c = order_bytes(buf, term);
            if (c == std::strong_ordering::equal) return block * block_size_ + i + 1;
            if (c == std::strong_ordering::greater) return std::nullopt;
        }
        return std::nullopt;
    }

    std::string extract(std::uint64_t id) const {
        if (id == 0 || id > entries_)
            throw IdOutOfRangeError("section id " + std::to_string(id) + " out of range [1," +
                                    std::to_string(entries_) + "]");
        std::uint64_t block = (id - 1) / block_size_;
        std::uint64_t index = (id - 1) % block_size_;
        instrument::ResidentGuard guard(1);
        std::string buf;
        pfcdetail::BlockDecoder dec(payload(), offsets_[block]);
        for (std::uint64_t i = 0; i <= index; ++i) dec.next(buf, i == 0);
        return buf;
    }

    // Ordered forward stream of (id, term). Holds one decoded string.
    class Cursor {
    public:
        explicit Cursor(const DictionarySection& sec)
            : sec_(&sec), guard_(sec.size() == 0 ? 0 : 1) {}

        bool next() {
            if (id_ >= sec_->size()) return false;
            ++id_;
            std::uint64_t index = (id_ - 1) % sec_->block_size_;
            if (index == 0) {
                dec_.emplace(sec_->payload(), sec_->offsets_[(id_ - 1) / sec_->block_size_]);
            }
            dec_->next(buf_, index == 0);
            return true;
        }

        std::uint64_t id() const noexcept { return id_; }
        std::string_view term() const noexcept { return buf_; }

    private:
        const DictionarySection* sec_;
        instrument::ResidentGuard guard_;
        std::optional<pfcdetail::BlockDecoder> dec_;
        std::string buf_;
        std::uint64_t id_ = 0;
    };

    Cursor cursor() const { return Cursor(*this); }

    // Byte length of the payload; for sections decoded from a file this is
    // the span length, for built sections the buffer length.
    std::uint64_t payload_bytes() const noexcept { return payload().size(); }

private:
    std::string_view head(std::uint64_t block) const {
        io::Cursor cur(payload(), "block head");
        cur.seek(offsets_[block]);
        std::uint64_t len = cur.varint();
        io::ByteSpan bytes = cur.take(len);
        return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
    }

    std::uint64_t block_entries(std::uint64_t block) const {
        if (block + 1 < offsets_.size()) return block_size_;
        return entries_ - block * block_size_;
    }

    std::uint64_t entries_ = 0;
    std::uint32_t block_size_ = kDefaultBlockSize;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint8_t> owned_payload_;
    io::ByteSpan payload_view_;
};

// In-memory section construction from a strictly increasing term sequence.
class SectionBuilder {
public:
    explicit SectionBuilder(std::uint32_t block_size = kDefaultBlockSize)
        : sink_(payload_), enc_(sink_, block_size), block_size_(block_size) {}

    void add(std::string_view term) { enc_.add(term); }

    DictionarySection finish() {
        return DictionarySection(enc_.count(), block_size_, enc_.take_offsets(), std::move(payload_));
    }

private:
    std::vector<std::uint8_t> payload_;
    io::VectorSink sink_;
    PfcEncoder enc_;
    std::uint32_t block_size_;
};

template <typename Range>
DictionarySection build_section(const Range& sorted_terms,
                                std::uint32_t block_size = kDefaultBlockSize) {
    SectionBuilder b(block_size);
    for (const auto& t : sorted_terms) b.add(t);
    return b.finish();
}

}  // namespace hdtx
