#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hdtx/error.hpp"
#include "hdtx/term.hpp"

namespace hdtx {

// Sorted entry streams: anything with next()/term()/id(), e.g.
// DictionarySection::Cursor. term() stays valid until the next advance.

struct MergeCounts {
    std::uint64_t n_a = 0;          // entries consumed from a
    std::uint64_t n_b = 0;          // entries consumed from b
    std::uint64_t n_common = 0;     // entries present in both
    std::uint64_t n_out = 0;        // distinct entries emitted
    std::uint64_t comparisons = 0;  // a-vs-b term comparisons
};

namespace mergedetail {

// Advances a stream and enforces strict ascending order.
template <typename S>
bool checked_next(S& s, std::string& prev, bool& started) {
    if (!s.next()) return false;
    if (started && order_bytes(prev, s.term()) != std::strong_ordering::less)
        throw NotSortedError("merge input not strictly increasing at \"" + std::string(s.term()) +
                             "\"");
    prev.assign(s.term());
    started = true;
    return true;
}

}  // namespace mergedetail

// Linear merge of two sorted streams into their sorted union. Each distinct
// term is emitted once as emit(term, id_a, id_b) with 0 marking absence.
// Comparisons never exceed n_a + n_b: every comparison consumes at least one
// input entry, and exhausted tails are copied without comparing.
template <typename A, typename B, typename Emit>
MergeCounts merge_sorted_streams(A& a, B& b, Emit&& emit) {
    MergeCounts c;
    std::string prev_a, prev_b;
    bool started_a = false, started_b = false;
    bool ha = mergedetail::checked_next(a, prev_a, started_a);
    bool hb = mergedetail::checked_next(b, prev_b, started_b);
    if (ha) ++c.n_a;
    if (hb) ++c.n_b;

    while (ha && hb) {
        ++c.comparisons;
        auto cmp = order_bytes(a.term(), b.term());
        if (cmp == std::strong_ordering::less) {
            emit(a.term(), a.id(), std::uint64_t{0});
            ++c.n_out;
            ha = mergedetail::checked_next(a, prev_a, started_a);
            if (ha) ++c.n_a;
        } else if (cmp == std::strong_ordering::greater) {
            emit(b.term(), std::uint64_t{0}, b.id());
            ++c.n_out;
            hb = mergedetail::checked_next(b, prev_b, started_b);
            if (hb) ++c.n_b;
        } else {
            emit(a.term(), a.id(), b.id());
            ++c.n_out;
            ++c.n_common;
            ha = mergedetail::checked_next(a, prev_a, started_a);
            if (ha) ++c.n_a;
            hb = mergedetail::checked_next(b, prev_b, started_b);
            if (hb) ++c.n_b;
        }
    }
    while (ha) {
        emit(a.term(), a.id(), std::uint64_t{0});
        ++c.n_out;
        ha = mergedetail::checked_next(a, prev_a, started_a);
        if (ha) ++c.n_a;
    }
    while (hb) {
        emit(b.term(), std::uint64_t{0}, b.id());
        ++c.n_out;
        hb = mergedetail::checked_next(b, prev_b, started_b);
        if (hb) ++c.n_b;
    }
    return c;
}

// One co-iteration pass over two sorted streams, emitting the entries
// present in both: emit(term, id_x, id_y).
template <typename X, typename Y, typename Emit>
std::uint64_t for_each_common_entry(X& x, Y& y, Emit&& emit) {
    std::uint64_t found = 0;
    std::string prev_x, prev_y;
    bool started_x = false, started_y = false;
    bool hx = mergedetail::checked_next(x, prev_x, started_x);
    bool hy = mergedetail::checked_next(y, prev_y, started_y);
    while (hx && hy) {
        auto cmp = order_bytes(x.term(), y.term());
        if (cmp == std::strong_ordering::less) {
            hx = mergedetail::checked_next(x, prev_x, started_x);
        } else if (cmp == std::strong_ordering::greater) {
            hy = mergedetail::checked_next(y, prev_y, started_y);
        } else {
            emit(x.term(), x.id(), y.id());
            ++found;
            hx = mergedetail::checked_next(x, prev_x, started_x);
            hy = mergedetail::checked_next(y, prev_y, started_y);
        }
    }
    return found;
}

struct CommonEntry {
    std::string term;
    std::uint64_t id_x = 0;
    std::uint64_t id_y = 0;
};

template <typename X, typename Y>
std::vector<CommonEntry> compute_common_entries(X& x, Y& y) {
    std::vector<CommonEntry> out;
    for_each_common_entry(x, y, [&](std::string_view term, std::uint64_t ix, std::uint64_t iy) {
        out.push_back({std::string(term), ix, iy});
    });
    return out;
}

// Adapter exposing a sorted vector<string> as an entry stream (ids are
// 1-based positions). Mostly for tests and small in-memory inputs.
class VectorEntryStream {
public:
    explicit VectorEntryStream(const std::vector<std::string>& terms) : terms_(&terms) {}

    bool next() {
        if (pos_ >= terms_->size()) return false;
        ++pos_;
        return true;
    }
    std::string_view term() const { return (*terms_)[pos_ - 1]; }
    std::uint64_t id() const { return pos_; }

private:
    const std::vector<std::string>* terms_;
    std::size_t pos_ = 0;
};

}  // namespace hdtx
