#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

namespace hdtx {

enum class TermKind : std::uint8_t { Iri, BlankNode, Literal };

// Bytewise comparison of canonical lexical forms. This is the one collation
// used everywhere: dictionary sections, triple ordering, merges.
inline std::strong_ordering order_bytes(std::string_view a, std::string_view b) {
    int c = a.compare(b);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

// One RDF term. `lexical` is the canonical N-Triples spelling including the
// delimiters (<...>, _:label, "..."), so byte equality is term equality and
// byte order is the term order.
struct Term {
    TermKind kind{TermKind::Iri};
    std::string lexical;

    static Term iri(std::string_view inner) {
        return {TermKind::Iri, "<" + std::string(inner) + ">"};
    }
    static Term blank(std::string_view label) {
        return {TermKind::BlankNode, "_:" + std::string(label)};
    }
    // `body` must already be in canonical escaped form; `suffix` is either
    // empty, "@lang", or "^^<datatype>".
    static Term literal(std::string_view body, std::string_view suffix = {}) {
        return {TermKind::Literal, "\"" + std::string(body) + "\"" + std::string(suffix)};
    }

    friend bool operator==(const Term& a, const Term& b) { return a.lexical == b.lexical; }
    friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
        return order_bytes(a.lexical, b.lexical);
    }
};

struct TermTriple {
    Term s, p, o;

    friend bool operator==(const TermTriple&, const TermTriple&) = default;
    friend std::strong_ordering operator<=>(const TermTriple& a, const TermTriple& b) {
        if (auto c = a.s <=> b.s; c != 0) return c;
        if (auto c = a.p <=> b.p; c != 0) return c;
        return a.o <=> b.o;
    }
};

// An RDF graph is a set of triples; duplicates collapse.
using Graph = std::set<TermTriple>;

}  // namespace hdtx
