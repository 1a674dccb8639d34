#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "hdtx/ntriples.hpp"
#include "testutil.hpp"

using namespace hdtx;

TEST_CASE("parse_ntriples_line on the worked example") {
    auto t = parse_ntriples_line("<so1> <p1> <o1> .");
    REQUIRE(t.has_value());
    CHECK(t->s.kind == TermKind::Iri);
    CHECK(t->s.lexical == "<so1>");
    CHECK(t->p.lexical == "<p1>");
    CHECK(t->o.lexical == "<o1>");
}

TEST_CASE("blank lines and comments yield the skip marker") {
    CHECK_FALSE(parse_ntriples_line("").has_value());
    CHECK_FALSE(parse_ntriples_line("   \t ").has_value());
    CHECK_FALSE(parse_ntriples_line("# a comment").has_value());
    CHECK_FALSE(parse_ntriples_line("  # indented comment").has_value());
}

TEST_CASE("escaped newline in a literal stays escaped") {
    auto t = parse_ntriples_line("<a> <b> \"x\\n\"@en .");
    REQUIRE(t.has_value());
    CHECK(t->o.kind == TermKind::Literal);
    // The two-character escape sequence survives in the lexical form.
    CHECK(t->o.lexical == "\"x\\n\"@en");
}

TEST_CASE("escape decoding and canonicalization") {
    SECTION("tab decodes to a raw byte") {
        auto t = parse_ntriples_line("<a> <b> \"x\\ty\" .");
        CHECK(t->o.lexical == "\"x\ty\"");
    }
    SECTION("\\u of a plain character decodes") {
        auto t = parse_ntriples_line("<a> <b> \"\\u0041\" .");
        CHECK(t->o.lexical == "\"A\"");
    }
    SECTION("\\u of a quote stays escaped") {
        auto t = parse_ntriples_line("<a> <b> \"\\u0022\" .");
        CHECK(t->o.lexical == "\"\\\"\"");
    }
    SECTION("\\u of a newline stays escaped") {
        auto t = parse_ntriples_line("<a> <b> \"\\u000A\" .");
        CHECK(t->o.lexical == "\"\\n\"");
    }
    SECTION("\\U beyond the BMP becomes UTF-8") {
        auto t = parse_ntriples_line("<a> <b> \"\\U0001F600\" .");
        CHECK(t->o.lexical == "\"\xF0\x9F\x98\x80\"");
    }
    SECTION("\\u in an IRI decodes") {
        auto t = parse_ntriples_line("<http://ex/\\u00E9> <b> <c> .");
        CHECK(t->s.lexical == "<http://ex/\xC3\xA9>");
    }
    SECTION("language tags are lowercased") {
        auto t = parse_ntriples_line("<a> <b> \"x\"@EN-Latn .");
        CHECK(t->o.lexical == "\"x\"@en-latn");
    }
    SECTION("datatype IRIs are kept verbatim") {
        auto t = parse_ntriples_line("<a> <b> \"1\"^^<http://www.w3.org/2001/XMLSchema#int> .");
        CHECK(t->o.lexical == "\"1\"^^<http://www.w3.org/2001/XMLSchema#int>");
    }
}

TEST_CASE("malformed lines raise ParseError") {
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> <c>"), ParseError);       // missing dot
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> ."), ParseError);        // missing object
    CHECK_THROWS_AS(parse_ntriples_line("\"lit\" <b> <c> ."), ParseError);  // literal subject
    CHECK_THROWS_AS(parse_ntriples_line("<a> _:b <c> ."), ParseError);    // blank predicate
    CHECK_THROWS_AS(parse_ntriples_line("<a> \"l\" <c> ."), ParseError);  // literal predicate
    CHECK_THROWS_AS(parse_ntriples_line("<a <b> <c> ."), ParseError);     // raw '<' in IRI
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> \"x ."), ParseError);    // unterminated literal
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> \"x\\q\" ."), ParseError);  // bad escape
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> \"x\\uD800\" ."), ParseError);  // surrogate
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> \"\xFF\" ."), ParseError);  // bad UTF-8
    CHECK_THROWS_AS(parse_ntriples_line("<a> <b> <c> . trailing"), ParseError);
    CHECK_THROWS_AS(parse_ntriples_line("<a\\u003E> <b> <c> ."), ParseError);  // escaped '>'
    CHECK_THROWS_AS(parse_ntriples_line("_: <b> <c> ."), ParseError);     // empty label
    try {
        parse_ntriples_line("<a> <b> ?");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.column() == 9);
        CHECK(e.line() == 0);
    }
}

TEST_CASE("serialize_triple produces canonical lines") {
    TermTriple t{Term::iri("so1"), Term::iri("p1"), Term::iri("o1")};
    CHECK(serialize_triple(t) == "<so1> <p1> <o1> .");

    auto parsed = parse_ntriples_line("<a> <b> \"say \\\"hi\\\"\" .");
    CHECK(serialize_triple(*parsed) == "<a> <b> \"say \\\"hi\\\"\" .");

    TermTriple blank{Term::blank("b0"), Term::iri("p"), Term::iri("o")};
    CHECK(serialize_triple(blank) == "_:b0 <p> <o> .");
}

TEST_CASE("blank node labels and terminator interplay") {
    auto t = parse_ntriples_line("_:b.c <p> _:tail .");
    CHECK(t->s.lexical == "_:b.c");
    auto u = parse_ntriples_line("_:b <p> _:c.");
    CHECK(u->o.lexical == "_:c");
}

TEST_CASE("term order follows canonical bytes") {
    CHECK(Term::iri("o2") < Term::iri("so1"));
    CHECK(order_bytes("<s1>", "<s1>") == std::strong_ordering::equal);
    // '1' (0x31) sorts before 'o' (0x6F).
    CHECK(Term::iri("s1") < Term::iri("so1"));
    // Literals start with '"' (0x22), IRIs with '<' (0x3C), blanks with '_' (0x5F).
    CHECK(Term::literal("z") < Term::iri("a"));
    CHECK(Term::iri("z") < Term::blank("a"));
}

namespace {

Term random_term(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> len(0, 12);
    std::uniform_int_distribution<int> alpha('a', 'z');
    auto word = [&] {
        std::string s;
        int n = len(rng);
        for (int i = 0; i < n; ++i) s.push_back(static_cast<char>(alpha(rng)));
        return s;
    };
    switch (kind(rng)) {
        case 0:
            return Term::iri("http://ex/" + word());
        case 1:
            return Term::blank("b" + word());
        default: {
            std::string body = word();
            switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
                case 0:
                    body += "\\n";
                    break;
                case 1:
                    body += "\\\"q\\\"";
                    break;
                case 2:
                    body += "\xC3\xA9";  // é
                    break;
                default:
                    break;
            }
            switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
                case 0:
                    return Term::literal(body, "@en");
                case 1:
                    return Term::literal(body, "^^<http://ex/dt>");
                default:
                    return Term::literal(body);
            }
        }
    }
}

}  // namespace

TEST_CASE("round-trip: parse(serialize(t)) == t for generated terms") {
    std::mt19937_64 rng(20240811);
    for (int i = 0; i < 500; ++i) {
        Term s = random_term(rng);
        while (s.kind == TermKind::Literal) s = random_term(rng);
        TermTriple t{s, Term::iri("http://ex/p"), random_term(rng)};
        auto round = parse_ntriples_line(serialize_triple(t));
        REQUIRE(round.has_value());
        CHECK(*round == t);
    }
}

TEST_CASE("term order is a strict total order on samples") {
    std::mt19937_64 rng(7);
    std::vector<Term> terms;
    for (int i = 0; i < 60; ++i) terms.push_back(random_term(rng));
    for (const auto& a : terms)
        for (const auto& b : terms) {
            auto ab = a <=> b, ba = b <=> a;
            if (ab == std::strong_ordering::less) CHECK(ba == std::strong_ordering::greater);
            if (ab == std::strong_ordering::equal) {
                CHECK(a.lexical == b.lexical);
                CHECK(ba == std::strong_ordering::equal);
            }
            for (const auto& c : terms) {
                if (a <= b && b <= c) CHECK(a <= c);
            }
        }
}

TEST_CASE("stream parsing of the worked example") {
    std::istringstream in(testutil::rdf1_text());
    NtriplesReader reader(in);
    std::vector<TermTriple> triples;
    while (auto t = reader.next()) triples.push_back(*t);
    REQUIRE(triples.size() == 3);
    CHECK(triples[0].s.lexical == "<so1>");
    CHECK(triples[2].p.lexical == "<p2>");
    CHECK(reader.stats().lines == 3);
}

TEST_CASE("empty stream yields nothing") {
    std::istringstream in("");
    NtriplesReader reader(in);
    CHECK_FALSE(reader.next().has_value());
    CHECK(reader.stats().triples == 0);
}

TEST_CASE("lax mode counts bad lines, strict mode aborts with the line number") {
    const std::string text = "<a> <b> <c> .\nnot a triple\n<d> <e> <f> .\n";
    {
        std::istringstream in(text);
        NtriplesReader reader(in, ParseMode::Lax);
        std::vector<TermTriple> triples;
        while (auto t = reader.next()) triples.push_back(*t);
        CHECK(triples.size() == 2);
        CHECK(reader.stats().errors == 1);
    }
    {
        std::istringstream in(text);
        NtriplesReader reader(in, ParseMode::Strict);
        REQUIRE(reader.next().has_value());
        try {
            reader.next();
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
}

TEST_CASE("CRLF input is accepted") {
    std::istringstream in("<a> <b> <c> .\r\n<d> <e> <f> .\r\n");
    NtriplesReader reader(in);
    int n = 0;
    while (reader.next()) ++n;
    CHECK(n == 2);
}

TEST_CASE("parser memory tracks the longest line, not the file") {
    std::ostringstream text;
    std::string long_obj(2000, 'x');
    std::size_t longest = 0;
    for (int i = 0; i < 5000; ++i) {
        std::string line = "<http://ex/s" + std::to_string(i) + "> <http://ex/p> ";
        line += (i == 2500) ? "\"" + long_obj + "\" ." : "\"v\" .";
        longest = std::max(longest, line.size());
        text << line << '\n';
    }
    std::istringstream in(text.str());
    NtriplesReader reader(in);
    std::uint64_t n = 0;
    while (reader.next()) ++n;
    CHECK(n == 5000);
    CHECK(reader.max_line_bytes() == longest);
    CHECK(reader.max_line_bytes() < text.str().size() / 50);
}

TEST_CASE("parse_term handles all three kinds") {
    CHECK(parse_term("<http://ex/a>").kind == TermKind::Iri);
    CHECK(parse_term("_:b1").kind == TermKind::BlankNode);
    CHECK(parse_term("\"lit\"@de").kind == TermKind::Literal);
    CHECK_THROWS_AS(parse_term("junk"), ParseError);
}
