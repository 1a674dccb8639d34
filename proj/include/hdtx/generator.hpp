#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "hdtx/ntriples.hpp"
#include "hdtx/term.hpp"

namespace hdtx {

// Deterministic synthetic graphs for the test harness. Terms are drawn from
// a numbered resource space; two generators whose [offset, offset+universe)
// ranges intersect share exactly those terms, which controls the overlap
// ratio between generated files.
struct GenConfig {
    std::uint64_t seed = 1;
    std::uint64_t triple_count = 1000;
    std::uint64_t term_universe = 0;  // 0: triple_count / 2 + 1
    std::uint64_t term_offset = 0;
    std::uint64_t predicate_count = 16;
};

namespace gendetail {

// Stable kind mix per resource id: mostly IRIs, some literals, a few blank
// nodes; literals cover language tags, datatypes and escaped characters.
inline Term object_term(std::uint64_t id) {
    switch (id % 10) {
        case 7:
            return Term::blank("node" + std::to_string(id));
        case 8:
            switch (id % 3) {
                case 0:
                    return Term::literal("value " + std::to_string(id), "@en");
                case 1:
                    return Term::literal(std::to_string(id),
                                         "^^<http://www.w3.org/2001/XMLSchema#integer>");
                default:
                    return Term::literal("line\\nbreak \\\"q\\\" " + std::to_string(id));
            }
        case 9:
            return Term::literal("plain " + std::to_string(id));
        default:
            return Term::iri("http://example.org/resource/" + std::to_string(id));
    }
}

// Subjects cannot be literals; literal ids get a distinct IRI spelling so
// they never collide with their object-position form.
inline Term subject_term(std::uint64_t id) {
    Term t = object_term(id);
    if (t.kind == TermKind::Literal)
        return Term::iri("http://example.org/subject/" + std::to_string(id));
    return t;
}

inline Term predicate_term(std::uint64_t id) {
    return Term::iri("http://example.org/p/" + std::to_string(id));
}

}  // namespace gendetail

inline std::vector<TermTriple> generate_graph(const GenConfig& config) {
    std::uint64_t universe =
        config.term_universe != 0 ? config.term_universe : config.triple_count / 2 + 1;
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<std::uint64_t> term_dist(config.term_offset,
                                                           config.term_offset + universe - 1);
    std::uniform_int_distribution<std::uint64_t> pred_dist(0, config.predicate_count - 1);
    std::vector<TermTriple> out;
    out.reserve(config.triple_count);
    for (std::uint64_t i = 0; i < config.triple_count; ++i) {
        out.push_back({gendetail::subject_term(term_dist(rng)),
                       gendetail::predicate_term(pred_dist(rng)),
                       gendetail::object_term(term_dist(rng))});
    }
    return out;
}

inline void write_ntriples(const std::vector<TermTriple>& triples, std::ostream& out) {
    for (const auto& t : triples) out << serialize_triple(t) << '\n';
}

// Two generator configs whose term spaces overlap by `ratio` (0 disjoint,
// 1 identical).
inline std::pair<GenConfig, GenConfig> overlapping_pair(std::uint64_t seed,
                                                        std::uint64_t triples_each,
                                                        double ratio) {
    std::uint64_t universe = triples_each / 2 + 1;
    GenConfig a;
    a.seed = seed;
    a.triple_count = triples_each;
    a.term_universe = universe;
    a.term_offset = 0;
    GenConfig b = a;
    b.seed = seed + 0x9E3779B97F4A7C15ull;
    b.term_offset = static_cast<std::uint64_t>(static_cast<double>(universe) * (1.0 - ratio));
    return {a, b};
}

}  // namespace hdtx
