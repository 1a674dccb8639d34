#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include "hdtx/error.hpp"
#include "hdtx/term.hpp"

namespace hdtx {

// N-Triples text syntax: parsing with canonicalization, and serialization.
//
// Canonical lexical form produced by the parser:
//   * IRIs and blank node labels carry no escapes; \uXXXX / \UXXXXXXXX are
//     decoded to UTF-8 at parse time.
//   * literal bodies escape exactly the four characters the grammar cannot
//     hold raw: `"` `\` LF CR (as \" \\ \n \r); everything else is raw UTF-8.
//   * language tags are lowercased.
// Byte equality on this form is term equality; see term.hpp.

namespace ntdetail {

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline bool is_ws(char c) { return c == ' ' || c == '\t'; }

inline int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

class LineParser {
public:
    explicit LineParser(std::string_view text) : text_(text) {}

    // Parses one standalone term (object grammar, so all kinds admitted).
    Term parse_single_term() {
        skip_ws();
        Term t = parse_object();
        skip_ws();
        if (!at_end()) fail("unexpected characters after term");
        return t;
    }

    // nullopt for blank lines and comments.
    std::optional<TermTriple> parse() {
        skip_ws();
        if (at_end() || peek() == '#') return std::nullopt;

        TermTriple t;
        t.s = parse_subject();
        require_ws();
        t.p = parse_predicate();
        require_ws();
        t.o = parse_object();
        skip_ws();
        if (at_end() || peek() != '.') fail("expected '.' terminating the triple");
        ++pos_;
        skip_ws();
        if (!at_end() && peek() != '#') fail("unexpected characters after '.'");
        return t;
    }

private:
    [[noreturn]] void fail(const std::string& reason) const { throw ParseError(reason, pos_ + 1); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char next() {
        if (at_end()) fail("unexpected end of line");
        return text_[pos_++];
    }

    void skip_ws() {
        while (!at_end() && is_ws(peek())) ++pos_;
    }

    void require_ws() {
        if (at_end() || !is_ws(peek())) fail("expected whitespace between terms");
        skip_ws();
    }

    Term parse_subject() {
        if (at_end()) fail("expected subject");
        char c = peek();
        if (c == '<') return parse_iri();
        if (c == '_') return parse_blank();
        if (c == '"') fail("a literal cannot be the subject of a triple");
        fail("expected IRI or blank node as subject");
    }

    Term parse_predicate() {
        if (at_end()) fail("expected predicate");
        char c = peek();
        if (c == '<') return parse_iri();
        fail("the predicate of a triple must be an IRI");
    }

    Term parse_object() {
        if (at_end()) fail("expected object");
        char c = peek();
        if (c == '<') return parse_iri();
        if (c == '_') return parse_blank();
        if (c == '"') return parse_literal();
        fail("expected IRI, blank node or literal as object");
    }

    char32_t parse_uchar() {
        char kind = next();  // 'u' or 'U'
        int digits = kind == 'u' ? 4 : 8;
        char32_t cp = 0;
        for (int i = 0; i < digits; ++i) {
            int h = hex_value(next());
            if (h < 0) fail("invalid hex digit in \\u escape");
            cp = (cp << 4) | static_cast<char32_t>(h);
        }
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            fail("\\u escape is not a Unicode scalar value");
        return cp;
    }

    // Validates and copies one UTF-8 sequence whose lead byte is >= 0x80.
    void copy_utf8_sequence(std::string& out) {
        auto cont = [&](unsigned char b) { return (b & 0xC0u) == 0x80u; };
        unsigned char lead = static_cast<unsigned char>(next());
        int len;
        char32_t cp;
        if ((lead & 0xE0u) == 0xC0u) {
            len = 2;
            cp = lead & 0x1Fu;
        } else if ((lead & 0xF0u) == 0xE0u) {
            len = 3;
            cp = lead & 0x0Fu;
        } else if ((lead & 0xF8u) == 0xF0u) {
            len = 4;
            cp = lead & 0x07u;
        } else {
            fail("malformed UTF-8 byte");
        }
        unsigned char tail[3];
        for (int i = 1; i < len; ++i) {
            unsigned char b = static_cast<unsigned char>(next());
            if (!cont(b)) fail("malformed UTF-8 sequence");
            tail[i - 1] = b;
            cp = (cp << 6) | (b & 0x3Fu);
        }
        static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            fail("malformed UTF-8 sequence");
        out.push_back(static_cast<char>(lead));
        for (int i = 1; i < len; ++i) out.push_back(static_cast<char>(tail[i - 1]));
    }

    static bool iri_forbidden(char32_t cp) {
        if (cp <= 0x20) return true;
        switch (cp) {
            case '<':
            case '>':
            case '"':
            case '{':
            case '}':
            case '|':
            case '^':
            case '`':
            case '\\':
                return true;
            default:
                return false;
        }
    }

    Term parse_iri() {
        ++pos_;  // '<'
        std::string lex = "<";
        for (;;) {
            if (at_end()) fail("unterminated IRI");
            unsigned char c = static_cast<unsigned char>(peek());
            if (c == '>') {
                ++pos_;
                lex.push_back('>');
                return {TermKind::Iri, std::move(lex)};
            }
            if (c == '\\') {
                ++pos_;
                if (at_end() || (peek() != 'u' && peek() != 'U'))
                    fail("only \\u and \\U escapes are allowed in IRIs");
                char32_t cp = parse_uchar();
                if (iri_forbidden(cp)) fail("escaped character is not allowed in an IRI");
                append_utf8(lex, cp);
                continue;
            }
            if (c >= 0x80) {
                copy_utf8_sequence(lex);
                continue;
            }
            if (iri_forbidden(c)) fail("character not allowed in IRI");
            lex.push_back(static_cast<char>(c));
            ++pos_;
        }
    }

    static bool blank_label_byte(unsigned char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-' || c == '.';
    }

    Term parse_blank() {
        ++pos_;  // '_'
        if (at_end() || peek() != ':') fail("expected ':' after '_' in blank node");
        ++pos_;
        std::string lex = "_:";
        std::size_t label_start = lex.size();
        while (!at_end()) {
            unsigned char c = static_cast<unsigned char>(peek());
            if (c >= 0x80) {
                copy_utf8_sequence(lex);
                continue;
            }
            if (!blank_label_byte(c)) break;
            lex.push_back(static_cast<char>(c));
            ++pos_;
        }
        // A trailing '.' belongs to the triple terminator, not the label.
        while (lex.size() > label_start && lex.back() == '.') {
            lex.pop_back();
            --pos_;
        }
        if (lex.size() == label_start) fail("empty blank node label");
        char first = lex[label_start];
        if (first == '-' || first == '.') fail("blank node label cannot start with '-' or '.'");
        return {TermKind::BlankNode, std::move(lex)};
    }

    Term parse_literal() {
        ++pos_;  // '"'
        std::string lex = "\"";
        for (;;) {
            if (at_end()) fail("unterminated literal");
            unsigned char c = static_cast<unsigned char>(peek());
            if (c == '"') {
                ++pos_;
                lex.push_back('"');
                break;
            }
            if (c == '\\') {
                ++pos_;
                if (at_end()) fail("dangling backslash in literal");
                char e = peek();
                switch (e) {
                    case 't':
                        ++pos_;
                        lex.push_back('\t');
                        break;
                    case 'b':
                        ++pos_;
                        lex.push_back('\b');
                        break;
                    case 'f':
                        ++pos_;
                        lex.push_back('\f');
                        break;
                    case '\'':
                        ++pos_;
                        lex.push_back('\'');
                        break;
                    case 'n':
                        ++pos_;
                        lex += "\\n";
                        break;
                    case 'r':
                        ++pos_;
                        lex += "\\r";
                        break;
                    case '"':
                        ++pos_;
                        lex += "\\\"";
                        break;
                    case '\\':
                        ++pos_;
                        lex += "\\\\";
                        break;
                    case 'u':
                    case 'U':
                        append_literal_char(lex, parse_uchar());
                        break;
                    default:
                        fail("invalid escape in literal");
                }
                continue;
            }
            if (c == '\n') fail("raw newline in literal");  // unreachable on split lines
            if (c == '\r') {
                ++pos_;
                lex += "\\r";
                continue;
            }
            if (c >= 0x80) {
                copy_utf8_sequence(lex);
                continue;
            }
            lex.push_back(static_cast<char>(c));
            ++pos_;
        }
        // Optional language tag or datatype.
        if (!at_end() && peek() == '@') {
            ++pos_;
            lex.push_back('@');
            std::size_t n = 0;
            while (!at_end() && ((peek() >= 'a' && peek() <= 'z') || (peek() >= 'A' && peek() <= 'Z'))) {
                lex.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(next()))));
                ++n;
            }
            if (n == 0) fail("empty language tag");
            while (!at_end() && peek() == '-') {
                ++pos_;
                lex.push_back('-');
                n = 0;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())))) {
                    lex.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(next()))));
                    ++n;
                }
                if (n == 0) fail("empty language subtag");
            }
        } else if (!at_end() && peek() == '^') {
            ++pos_;
            if (at_end() || peek() != '^') fail("expected '^^' before datatype IRI");
            ++pos_;
            if (at_end() || peek() != '<') fail("expected datatype IRI");
            lex += "^^";
            lex += parse_iri().lexical;
        }
        return {TermKind::Literal, std::move(lex)};
    }

    // Decoded \u character inside a literal body: the four characters the
    // grammar cannot hold raw stay escaped; everything else becomes UTF-8.
    static void append_literal_char(std::string& lex, char32_t cp) {
        switch (cp) {
            case '"':
                lex += "\\\"";
                break;
            case '\\':
                lex += "\\\\";
                break;
            case '\n':
                lex += "\\n";
                break;
            case '\r':
                lex += "\\r";
                break;
            default:
                append_utf8(lex, cp);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace ntdetail

// Parses one physical line (no trailing newline; a trailing '\r' from CRLF
// input is tolerated). Returns nullopt for blank lines and comments. Throws
// ParseError with a 1-based column on malformed input.
inline std::optional<TermTriple> parse_ntriples_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return ntdetail::LineParser(line).parse();
}

// Parses a single term in N-Triples syntax (used by the search CLI).
inline Term parse_term(std::string_view text) {
    return ntdetail::LineParser(text).parse_single_term();
}

inline std::string serialize_triple(const TermTriple& t) {
    std::string out;
    out.reserve(t.s.lexical.size() + t.p.lexical.size() + t.o.lexical.size() + 4);
    out += t.s.lexical;
    out += ' ';
    out += t.p.lexical;
    out += ' ';
    out += t.o.lexical;
    out += " .";
    return out;
}

enum class ParseMode { Strict, Lax };

struct ParseStats {
    std::uint64_t lines = 0;
    std::uint64_t triples = 0;
    std::uint64_t skipped = 0;  // blank lines and comments
    std::uint64_t errors = 0;   // lax mode only
};

// Line-at-a-time streaming parser. Memory is bounded by the longest line:
// the one line buffer is reused across calls.
class NtriplesReader {
public:
    explicit NtriplesReader(std::istream& in, ParseMode mode = ParseMode::Strict)
        : in_(in), mode_(mode) {}

    // nullopt at end of input. In strict mode malformed lines throw
    // ParseError carrying the line number; in lax mode they are counted.
    std::optional<TermTriple> next() {
        while (std::getline(in_, line_)) {
            ++stats_.lines;
            max_line_bytes_ = std::max(max_line_bytes_, line_.size());
            try {
                auto t = parse_ntriples_line(line_);
                if (!t) {
                    ++stats_.skipped;
                    continue;
                }
                ++stats_.triples;
                return t;
            } catch (const ParseError& e) {
                if (mode_ == ParseMode::Strict) throw e.at_line(stats_.lines);
                ++stats_.errors;
            }
        }
        return std::nullopt;
    }

    const ParseStats& stats() const noexcept { return stats_; }
    std::size_t max_line_bytes() const noexcept { return max_line_bytes_; }

private:
    std::istream& in_;
    ParseMode mode_;
    std::string line_;
    ParseStats stats_;
    std::size_t max_line_bytes_ = 0;
};

}  // namespace hdtx
