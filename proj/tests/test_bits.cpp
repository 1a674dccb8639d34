#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hdtx/bits.hpp"

using namespace hdtx;

TEST_CASE("bit vector rank/select against brute force") {
    std::mt19937_64 rng(99);
    for (double density : {0.03, 0.5, 0.97}) {
        std::bernoulli_distribution flip(density);
        std::vector<bool> ref;
        BitVector::Builder b;
        for (int i = 0; i < 1500; ++i) {
            bool bit = flip(rng);
            ref.push_back(bit);
            b.push(bit);
        }
        BitVector bv = b.finish();
        REQUIRE(bv.size() == ref.size());

        std::uint64_t ones = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(bv.rank1(i) == ones);
            CHECK(bv.get(i) == ref[i]);
            if (ref[i]) {
                ++ones;
                CHECK(bv.select1(ones) == i);
            }
        }
        CHECK(bv.rank1(ref.size()) == ones);
        CHECK(bv.count_ones() == ones);
    }
}

TEST_CASE("bit vector edges") {
    BitVector empty = BitVector::Builder().finish();
    CHECK(empty.size() == 0);
    CHECK(empty.count_ones() == 0);
    CHECK_THROWS_AS(empty.select1(1), IdOutOfRangeError);
    CHECK_THROWS_AS(empty.get(0), IdOutOfRangeError);

    BitVector::Builder b;
    for (int i = 0; i < 64; ++i) b.push(true);
    BitVector all = b.finish();
    CHECK(all.rank1(64) == 64);
    CHECK(all.select1(64) == 63);
    CHECK_THROWS_AS(all.select1(0), IdOutOfRangeError);
    CHECK_THROWS_AS(all.select1(65), IdOutOfRangeError);
}

TEST_CASE("width_for covers the edges") {
    CHECK(PackedSequence::width_for(0) == 1);
    CHECK(PackedSequence::width_for(1) == 1);
    CHECK(PackedSequence::width_for(2) == 2);
    CHECK(PackedSequence::width_for(3) == 2);
    CHECK(PackedSequence::width_for(4) == 3);
    CHECK(PackedSequence::width_for((1ull << 32) - 1) == 32);
    CHECK(PackedSequence::width_for(1ull << 32) == 33);
    CHECK(PackedSequence::width_for(~0ull) == 64);
}

TEST_CASE("packed sequence round-trips at assorted widths") {
    std::mt19937_64 rng(3);
    for (unsigned width : {1u, 2u, 7u, 13u, 31u, 33u, 64u}) {
        std::uniform_int_distribution<std::uint64_t> dist(
            0, width == 64 ? ~0ull : (1ull << width) - 1);
        std::vector<std::uint64_t> ref;
        PackedSequence::Builder b(width);
        for (int i = 0; i < 700; ++i) {
            std::uint64_t v = dist(rng);
            ref.push_back(v);
            b.push(v);
        }
        PackedSequence seq = b.finish();
        REQUIRE(seq.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(seq.get(i) == ref[i]);
        CHECK_THROWS_AS(seq.get(ref.size()), IdOutOfRangeError);
    }
}

TEST_CASE("packed sequence rejects out-of-width values") {
    PackedSequence::Builder b(3);
    b.push(7);
    CHECK_THROWS_AS(b.push(8), Error);
}

TEST_CASE("view-backed structures agree with owned ones") {
    BitVector::Builder bb;
    PackedSequence::Builder sb(11);
    std::mt19937_64 rng(17);
    for (int i = 0; i < 321; ++i) {
        bb.push(rng() & 1);
        sb.push(rng() & 0x7FF);
    }
    BitVector bv = bb.finish();
    PackedSequence seq = sb.finish();

    std::vector<std::uint8_t> bytes;
    io::VectorSink sink(bytes);
    bv.serialize_words(sink);
    std::size_t bv_bytes = bytes.size();
    seq.serialize_words(sink);

    BitVector bv2 = BitVector::from_view(io::ByteSpan(bytes).first(bv_bytes), bv.size());
    PackedSequence seq2 =
        PackedSequence::from_view(io::ByteSpan(bytes).subspan(bv_bytes), seq.size(), 11);
    for (std::uint64_t i = 0; i < bv.size(); ++i) {
        CHECK(bv2.get(i) == bv.get(i));
        CHECK(bv2.rank1(i) == bv.rank1(i));
    }
    for (std::uint64_t i = 0; i < seq.size(); ++i) CHECK(seq2.get(i) == seq.get(i));
}
