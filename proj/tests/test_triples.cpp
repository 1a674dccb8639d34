#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "hdtx/triples.hpp"
#include "testutil.hpp"

using namespace hdtx;

namespace {

BitmapTriples encode(const std::vector<IdTriple>& sorted) {
    std::uint64_t max_p = 0, max_o = 0;
    for (const auto& t : sorted) {
        max_p = std::max(max_p, t.p);
        max_o = std::max(max_o, t.o);
    }
    return encode_bitmap(sorted, PackedSequence::width_for(max_p),
                         PackedSequence::width_for(max_o));
}

std::vector<IdTriple> random_sorted(std::mt19937_64& rng, std::size_t n, std::uint64_t subjects,
                                    std::uint64_t preds, std::uint64_t objs) {
    std::set<IdTriple> set;
    std::uniform_int_distribution<std::uint64_t> ps(1, preds), os(1, objs);
    while (set.size() < n) {
        std::uniform_int_distribution<std::uint64_t> ss(1, subjects);
        set.insert({ss(rng), ps(rng), os(rng)});
    }
    std::vector<IdTriple> out(set.begin(), set.end());
    // Close subject gaps by compacting subject ids.
    std::map<std::uint64_t, std::uint64_t> remap;
    for (const auto& t : out) remap.emplace(t.s, 0);
    std::uint64_t next = 0;
    for (auto& [old_id, new_id] : remap) new_id = ++next;
    for (auto& t : out) t.s = remap[t.s];
    return out;
}

}  // namespace

TEST_CASE("triple comparison is lexicographic") {
    CHECK(triple_cmp({1, 1, 2}, {1, 1, 3}) == std::strong_ordering::less);
    CHECK(triple_cmp({2, 2, 1}, {2, 2, 1}) == std::strong_ordering::equal);
    CHECK(triple_cmp({2, 1, 4}, {2, 1, 1}) == std::strong_ordering::greater);
    CHECK(triple_cmp({1, 9, 9}, {2, 1, 1}) == std::strong_ordering::less);
}

TEST_CASE("bitmap encoding of the first worked-example file") {
    // Hand-encoded expectation for the id triples (1,1,2),(1,1,3),(2,2,1).
    BitmapTriples bt = encode({{1, 1, 2}, {1, 1, 3}, {2, 2, 1}});
    CHECK(bt.triple_count() == 3);
    CHECK(bt.subject_count() == 2);

    REQUIRE(bt.seq_p().size() == 2);
    CHECK(bt.seq_p().get(0) == 1);
    CHECK(bt.seq_p().get(1) == 2);
    REQUIRE(bt.bit_p().size() == 2);
    CHECK(bt.bit_p().get(0));
    CHECK(bt.bit_p().get(1));

    REQUIRE(bt.seq_o().size() == 3);
    CHECK(bt.seq_o().get(0) == 2);
    CHECK(bt.seq_o().get(1) == 3);
    CHECK(bt.seq_o().get(2) == 1);
    REQUIRE(bt.bit_o().size() == 3);
    CHECK_FALSE(bt.bit_o().get(0));
    CHECK(bt.bit_o().get(1));
    CHECK(bt.bit_o().get(2));
}

TEST_CASE("single triple encodes to singletons") {
    BitmapTriples bt = encode({{1, 1, 1}});
    CHECK(bt.triple_count() == 1);
    CHECK(bt.subject_count() == 1);
    CHECK(bt.seq_p().size() == 1);
    CHECK(bt.seq_o().size() == 1);
    CHECK(bt.bit_p().get(0));
    CHECK(bt.bit_o().get(0));
}

TEST_CASE("encoder rejects bad input") {
    CHECK_THROWS_AS(encode({{2, 1, 1}}), SubjectGapError);                  // first subject != 1
    CHECK_THROWS_AS(encode({{1, 1, 1}, {3, 1, 1}}), SubjectGapError);       // hole at 2
    CHECK_THROWS_AS(encode({{1, 1, 2}, {1, 1, 1}}), NotSortedError);        // descending
    CHECK_THROWS_AS(encode({{1, 1, 1}, {1, 1, 1}}), DuplicateTripleError);  // duplicate
    CHECK_THROWS_AS(encode({{1, 0, 1}}), IdOutOfRangeError);                // zero id
}

TEST_CASE("decode(encode(x)) == x on random graphs") {
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 20; ++round) {
        auto triples = random_sorted(rng, 500, 60, 12, 200);
        BitmapTriples bt = encode(triples);
        CHECK(bt.decode_all() == triples);
    }
    // One larger case.
    auto big = random_sorted(rng, 100000, 5000, 40, 9000);
    BitmapTriples bt = encode(big);
    auto out = bt.decode_all();
    CHECK(out == big);
    CHECK(std::is_sorted(out.begin(), out.end()));
}

TEST_CASE("subject slices of the worked-example files") {
    BitmapTriples h1 = encode({{1, 1, 2}, {1, 1, 3}, {2, 2, 1}});
    auto slice = h1.subject_slice(1);
    REQUIRE(slice.next());
    CHECK(slice.predicate() == 1);
    CHECK(slice.object() == 2);
    REQUIRE(slice.next());
    CHECK(slice.predicate() == 1);
    CHECK(slice.object() == 3);
    CHECK_FALSE(slice.next());

    // Second file, recomputed ids: (1,1,2),(2,2,1); subject 2 holds (2,1).
    BitmapTriples h2 = encode({{1, 1, 2}, {2, 2, 1}});
    auto slice2 = h2.subject_slice(2);
    REQUIRE(slice2.next());
    CHECK(slice2.predicate() == 2);
    CHECK(slice2.object() == 1);
    CHECK_FALSE(slice2.next());

    CHECK_THROWS_AS(h1.subject_slice(0), IdOutOfRangeError);
    CHECK_THROWS_AS(h1.subject_slice(3), IdOutOfRangeError);
}

TEST_CASE("every subject yields at least one pair") {
    std::mt19937_64 rng(8);
    auto triples = random_sorted(rng, 300, 40, 8, 90);
    BitmapTriples bt = encode(triples);
    for (std::uint64_t sid = 1; sid <= bt.subject_count(); ++sid) {
        auto slice = bt.subject_slice(sid);
        CHECK(slice.next());
    }
}

TEST_CASE("pattern search on the worked example") {
    BitmapTriples h1 = encode({{1, 1, 2}, {1, 1, 3}, {2, 2, 1}});
    auto collect = [](BitmapTriples::MatchCursor cur) {
        std::vector<IdTriple> out;
        while (cur.next()) out.push_back(cur.triple());
        return out;
    };
    CHECK(collect(h1.search({1, 0, 0})) == std::vector<IdTriple>{{1, 1, 2}, {1, 1, 3}});
    BitmapTriples h2 = encode({{1, 1, 2}, {2, 2, 1}});
    CHECK(collect(h2.search({0, 0, 0})) == std::vector<IdTriple>{{1, 1, 2}, {2, 2, 1}});
    CHECK(collect(h1.search({2, 2, 1})) == std::vector<IdTriple>{{2, 2, 1}});
    CHECK(collect(h1.search({2, 1, 1})).empty());
    CHECK(collect(h1.search({9, 0, 0})).empty());  // unknown subject
}

TEST_CASE("search agrees with scan filtering on random graphs") {
    std::mt19937_64 rng(31);
    auto triples = random_sorted(rng, 400, 30, 6, 50);
    BitmapTriples bt = encode(triples);

    std::uniform_int_distribution<std::uint64_t> ss(0, 31), ps(0, 7), os(0, 51);
    for (int round = 0; round < 200; ++round) {
        IdTriple pattern{ss(rng), ps(rng), os(rng)};
        std::vector<IdTriple> expect;
        for (const auto& t : triples) {
            if (pattern.s != 0 && t.s != pattern.s) continue;
            if (pattern.p != 0 && t.p != pattern.p) continue;
            if (pattern.o != 0 && t.o != pattern.o) continue;
            expect.push_back(t);
        }
        std::vector<IdTriple> got;
        auto cur = bt.search(pattern);
        while (cur.next()) got.push_back(cur.triple());
        CHECK(got == expect);
    }

    // Full wildcard enumerates exactly triple_count() triples.
    std::uint64_t n = 0;
    auto cur = bt.search({0, 0, 0});
    while (cur.next()) ++n;
    CHECK(n == bt.triple_count());
}

TEST_CASE("slices concatenate to the full decode") {
    std::mt19937_64 rng(12);
    auto triples = random_sorted(rng, 350, 25, 5, 40);
    BitmapTriples bt = encode(triples);
    std::vector<IdTriple> via_slices;
    for (std::uint64_t sid = 1; sid <= bt.subject_count(); ++sid) {
        auto slice = bt.subject_slice(sid);
        while (slice.next()) via_slices.push_back({sid, slice.predicate(), slice.object()});
    }
    CHECK(via_slices == bt.decode_all());
}

TEST_CASE("empty triples component") {
    BitmapTriples bt = encode({});
    CHECK(bt.triple_count() == 0);
    CHECK(bt.subject_count() == 0);
    CHECK(bt.decode_all().empty());
    auto cur = bt.search({0, 0, 0});
    CHECK_FALSE(cur.next());
}
