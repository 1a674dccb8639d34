#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "hdtx/document.hpp"
#include "hdtx/ntriples.hpp"

namespace hdtx {

struct BuildConfig {
    std::uint32_t block_size = kDefaultBlockSize;
    ParseMode parse_mode = ParseMode::Strict;
    // In-memory build guard: parsed terms and id triples are budgeted and
    // the build fails loudly instead of thrashing. Chunked build plus cat is
    // the path for anything larger.
    std::uint64_t memory_budget_bytes = 1ull << 30;
};

namespace builddetail {

inline std::uint64_t triple_bytes(const TermTriple& t) {
    return t.s.lexical.size() + t.p.lexical.size() + t.o.lexical.size() + 3 * sizeof(Term) + 16;
}

}  // namespace builddetail

// Compresses a list of term triples into a document:
// classify -> build sections -> map to ids -> sort -> dedupe -> encode.
inline HdtDocument build_document(const std::vector<TermTriple>& triples,
                                  const BuildConfig& config = {}) {
    TermClassifier classifier;
    for (const auto& t : triples) classifier.add(t);
    HdtDocument doc;
    doc.dictionary = FourSectionDictionary::build(classifier.finish(), config.block_size);
    const auto& dict = doc.dictionary;

    std::vector<IdTriple> ids;
    ids.reserve(triples.size());
    for (const auto& t : triples) {
        // Every term was just classified, so the lookups cannot miss.
        ids.push_back({*dict.id_of(Role::Subject, t.s.lexical),
                       *dict.id_of(Role::Predicate, t.p.lexical),
                       *dict.id_of(Role::Object, t.o.lexical)});
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    BitmapTriples::Encoder enc(PackedSequence::width_for(dict.predicates().size()),
                               PackedSequence::width_for(dict.object_universe()));
    for (const auto& t : ids) enc.add(t);
    doc.triples = enc.finish();
    doc.header = build_header(dict, doc.triples);
    return doc;
}

// The rdf2hdt pipeline: N-Triples text in, document out.
inline HdtDocument build_from_ntriples(std::istream& in, const BuildConfig& config = {},
                                       ParseStats* stats_out = nullptr) {
    NtriplesReader reader(in, config.parse_mode);
    std::vector<TermTriple> triples;
    std::uint64_t bytes = 0;
    while (auto t = reader.next()) {
        bytes += builddetail::triple_bytes(*t);
        if (bytes > config.memory_budget_bytes)
            throw CapacityExceededError(
                "in-memory build exceeds the configured budget; build chunks and cat them");
        triples.push_back(std::move(*t));
    }
    if (stats_out) *stats_out = reader.stats();
    return build_document(triples, config);
}

// The hdt2rdf direction: triples in id order, term-serialized.
inline void write_ntriples(const HdtDocument& doc, std::ostream& out) {
    auto cursor = doc.triples.scan();
    while (cursor.next()) {
        out << serialize_triple(id_triple_to_terms(doc, cursor.triple())) << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed while serializing triples");
}

}  // namespace hdtx
