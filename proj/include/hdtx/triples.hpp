#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdtx/bits.hpp"
#include "hdtx/error.hpp"

namespace hdtx {

struct IdTriple {
    std::uint64_t s = 0, p = 0, o = 0;

    friend bool operator==(const IdTriple&, const IdTriple&) = default;
    friend std::strong_ordering operator<=>(const IdTriple&, const IdTriple&) = default;
};

inline std::strong_ordering triple_cmp(const IdTriple& a, const IdTriple& b) { return a <=> b; }

// Bitmap-encoded triples: seqP holds each subject's predicates in order,
// seqO each (subject, predicate) group's objects; bitP marks the last
// predicate of a subject, bitO the last object of a predicate group.
class BitmapTriples {
public:
    class Encoder {
    public:
        Encoder(unsigned pred_width, unsigned obj_width) : seq_p_(pred_width), seq_o_(obj_width) {}

        void add(const IdTriple& t) {
            if (t.s == 0 || t.p == 0 || t.o == 0)
                throw IdOutOfRangeError("triple ids must be positive");
            if (count_ == 0) {
                if (t.s != 1) throw SubjectGapError("first subject id must be 1");
            } else {
                auto c = t <=> prev_;
                if (c == std::strong_ordering::equal)
                    throw DuplicateTripleError("duplicate triple in encoder input");
                if (c == std::strong_ordering::less)
                    throw NotSortedError("encoder input must be sorted");
                if (t.s > prev_.s + 1)
                    throw SubjectGapError("subject id " + std::to_string(prev_.s + 1) +
                                          " has no triples");
                if (t.s == prev_.s && t.p == prev_.p) {
                    bit_o_.push(false);
                } else {
                    bit_o_.push(true);
                    bit_p_.push(t.s != prev_.s);
                    seq_p_.push(t.p);
                }
            }
            if (count_ == 0) seq_p_.push(t.p);
            seq_o_.push(t.o);
            prev_ = t;
            ++count_;
        }

        BitmapTriples finish() {
            if (count_ > 0) {
                bit_o_.push(true);
                bit_p_.push(true);
            }
            BitmapTriples bt;
            bt.seq_p_ = seq_p_.finish();
            bt.seq_o_ = seq_o_.finish();
            bt.bit_p_ = bit_p_.finish();
            bt.bit_o_ = bit_o_.finish();
            bt.triple_count_ = count_;
            bt.subject_count_ = count_ == 0 ? 0 : prev_.s;
            return bt;
        }

    private:
        PackedSequence::Builder seq_p_, seq_o_;
        BitVector::Builder bit_p_, bit_o_;
        IdTriple prev_;
        std::uint64_t count_ = 0;
    };

    BitmapTriples() = default;

    BitmapTriples(PackedSequence seq_p, PackedSequence seq_o, BitVector bit_p, BitVector bit_o,
                  std::uint64_t triples, std::uint64_t subjects)
        : seq_p_(std::move(seq_p)),
          seq_o_(std::move(seq_o)),
          bit_p_(std::move(bit_p)),
          bit_o_(std::move(bit_o)),
          triple_count_(triples),
          subject_count_(subjects) {}

    std::uint64_t triple_count() const noexcept { return triple_count_; }
    std::uint64_t subject_count() const noexcept { return subject_count_; }

    const PackedSequence& seq_p() const noexcept { return seq_p_; }
    const PackedSequence& seq_o() const noexcept { return seq_o_; }
    const BitVector& bit_p() const noexcept { return bit_p_; }
    const BitVector& bit_o() const noexcept { return bit_o_; }

    // Full scan in (s,p,o) order.
    class ScanCursor {
    public:
        explicit ScanCursor(const BitmapTriples& bt) : bt_(&bt) {}

        bool next() {
            if (oi_ >= bt_->triple_count_) return false;
            cur_ = {sid_, bt_->seq_p_.get(pi_), bt_->seq_o_.get(oi_)};
            bool last_o = bt_->bit_o_.get(oi_);
            ++oi_;
            if (last_o) {
                bool last_p = bt_->bit_p_.get(pi_);
                ++pi_;
                if (last_p) ++sid_;
            }
            return true;
        }

        const IdTriple& triple() const noexcept { return cur_; }

    private:
        const BitmapTriples* bt_;
        std::uint64_t oi_ = 0, pi_ = 0, sid_ = 1;
        IdTriple cur_;
    };

    ScanCursor scan() const { return ScanCursor(*this); }

    // The (predicate, object) pairs of one subject, in order. Predicate
    // positions come from bitP select, object group bounds from bitO select.
    class SliceCursor {
    public:
        SliceCursor(const BitmapTriples& bt, std::uint64_t sid) : bt_(&bt) {
            if (sid == 0 || sid > bt.subject_count_)
                throw IdOutOfRangeError("subject id " + std::to_string(sid) + " out of range");
            p_end_ = bt.bit_p_.select1(sid);
            pi_ = sid == 1 ? 0 : bt.bit_p_.select1(sid - 1) + 1;
            oi_ = pi_ == 0 ? 0 : bt.bit_o_.select1(pi_) + 1;
        }

        bool next() {
            if (pi_ > p_end_) return false;
            pred_ = bt_->seq_p_.get(pi_);
            obj_ = bt_->seq_o_.get(oi_);
            bool last_o = bt_->bit_o_.get(oi_);
            ++oi_;
            if (last_o) ++pi_;
            return true;
        }

        std::uint64_t predicate() const noexcept { return pred_; }
        std::uint64_t object() const noexcept { return obj_; }

    private:
        const BitmapTriples* bt_;
        std::uint64_t p_end_, pi_, oi_;
        std::uint64_t pred_ = 0, obj_ = 0;
    };

    SliceCursor subject_slice(std::uint64_t sid) const { return SliceCursor(*this, sid); }

    // Triple pattern matching; 0 is a wildcard. Subject-anchored patterns
    // walk one subject slice, everything else scans.
    class MatchCursor {
    public:
        MatchCursor(const BitmapTriples& bt, IdTriple pattern) : pattern_(pattern) {
            if (pattern.s != 0) {
                if (pattern.s <= bt.subject_count_) slice_.emplace(bt, pattern.s);
            } else {
                scan_.emplace(bt);
            }
        }

        bool next() {
            if (slice_) {
                while (slice_->next()) {
                    if (pattern_.p != 0 && slice_->predicate() != pattern_.p) continue;
                    if (pattern_.o != 0 && slice_->object() != pattern_.o) continue;
                    cur_ = {pattern_.s, slice_->predicate(), slice_->object()};
                    return true;
                }
                return false;
            }
            if (scan_) {
                while (scan_->next()) {
                    const IdTriple& t = scan_->triple();
                    if (pattern_.p != 0 && t.p != pattern_.p) continue;
                    if (pattern_.o != 0 && t.o != pattern_.o) continue;
                    cur_ = t;
                    return true;
                }
                return false;
            }
            return false;  // subject beyond range: empty result
        }

        const IdTriple& triple() const noexcept { return cur_; }

    private:
        IdTriple pattern_;
        std::optional<SliceCursor> slice_;
        std::optional<ScanCursor> scan_;
        IdTriple cur_;
    };

    MatchCursor search(IdTriple pattern) const { return MatchCursor(*this, pattern); }

    std::vector<IdTriple> decode_all() const {
        std::vector<IdTriple> out;
        out.reserve(triple_count_);
        auto c = scan();
        while (c.next()) out.push_back(c.triple());
        return out;
    }

private:
    PackedSequence seq_p_, seq_o_;
    BitVector bit_p_, bit_o_;
    std::uint64_t triple_count_ = 0;
    std::uint64_t subject_count_ = 0;
};

// One-shot encoding of an already sorted, deduplicated triple list.
template <typename Range>
BitmapTriples encode_bitmap(const Range& sorted_triples, unsigned pred_width, unsigned obj_width) {
    BitmapTriples::Encoder enc(pred_width, obj_width);
    for (const auto& t : sorted_triples) enc.add(t);
    return enc.finish();
}

}  // namespace hdtx
