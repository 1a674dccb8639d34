#pragma once

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hdtx/dictionary.hpp"
#include "hdtx/header.hpp"
#include "hdtx/io.hpp"
#include "hdtx/triples.hpp"

namespace hdtx {

inline constexpr char kMagic[8] = {'H', 'D', 'T', 'X', '0', '0', '0', '1'};

// A loaded document. Sections and triple sequences may view into `backing`
// (an mmap or an owned buffer); the document keeps it alive.
struct HdtDocument {
    Header header;
    FourSectionDictionary dictionary;
    BitmapTriples triples;
    std::shared_ptr<const void> backing;
};

// Read-only memory map of a whole file.
class FileMapping {
public:
    static std::shared_ptr<FileMapping> open(const std::filesystem::path& path) {
        auto m = std::shared_ptr<FileMapping>(new FileMapping());
        int fd = ::open(path.c_str(), O_RDONLY);
        if (fd < 0) throw IoError("cannot open " + path.string());
        struct ::stat st {};
        if (::fstat(fd, &st) != 0) {
            ::close(fd);
            throw IoError("cannot stat " + path.string());
        }
        m->size_ = static_cast<std::size_t>(st.st_size);
        if (m->size_ > 0) {
            void* p = ::mmap(nullptr, m->size_, PROT_READ, MAP_PRIVATE, fd, 0);
            if (p == MAP_FAILED) {
                ::close(fd);
                throw IoError("cannot map " + path.string());
            }
            m->data_ = p;
        }
        ::close(fd);
        return m;
    }

    ~FileMapping() {
        if (data_ != nullptr) ::munmap(data_, size_);
    }

    FileMapping(const FileMapping&) = delete;
    FileMapping& operator=(const FileMapping&) = delete;

    io::ByteSpan bytes() const noexcept {
        return {static_cast<const std::uint8_t*>(data_), size_};
    }

private:
    FileMapping() = default;
    void* data_ = nullptr;
    std::size_t size_ = 0;
};

namespace container {

// Serializes one dictionary section. The payload bytes come from a caller
// callback so they can be streamed from a temporary file during cat without
// living in memory; the trailing CRC-32 covers every byte of the section.
inline void write_section(io::Sink& out, std::uint64_t entry_count, std::uint32_t block_size,
                          const std::vector<std::uint64_t>& offsets,
                          const std::function<void(io::Sink&)>& payload) {
    io::CrcSink crc(out);
    io::put_u64(crc, entry_count);
    io::put_u32(crc, block_size);
    io::put_u64(crc, offsets.size());
    for (std::uint64_t off : offsets) io::put_u64(crc, off);
    payload(crc);
    io::put_u32(out, crc.crc());
}

inline void write_section(io::Sink& out, const DictionarySection& sec) {
    write_section(out, sec.size(), sec.block_size(), sec.block_offsets(),
                  [&](io::Sink& s) { s.write(sec.payload()); });
}

inline void write_triples(io::Sink& out, const BitmapTriples& t) {
    io::CrcSink crc(out);
    io::put_u64(crc, t.triple_count());
    io::put_u64(crc, t.subject_count());
    io::put_u64(crc, t.bit_p().size());
    t.bit_p().serialize_words(crc);
    io::put_u64(crc, t.bit_o().size());
    t.bit_o().serialize_words(crc);
    io::put_u8(crc, static_cast<std::uint8_t>(t.seq_p().width()));
    t.seq_p().serialize_words(crc);
    io::put_u8(crc, static_cast<std::uint8_t>(t.seq_o().width()));
    t.seq_o().serialize_words(crc);
    io::put_u32(out, crc.crc());
}

inline void write_header(io::Sink& out, const Header& h) {
    std::string text = h.to_text();
    io::CrcSink crc(out);
    io::put_u32(crc, static_cast<std::uint32_t>(text.size()));
    crc.write(text.data(), text.size());
    io::put_u32(out, crc.crc());
}

inline void write_magic(io::Sink& out) { out.write(kMagic, sizeof kMagic); }

// --- reading ---

struct SectionNames {
    static constexpr const char* names[4] = {"SO", "S", "O", "P"};
};

inline FormatError checksum_error(const std::string& what) {
    return {FormatDefect::ChecksumMismatch, "checksum mismatch in " + what + " section"};
}

inline Header read_header(io::Cursor& cur) {
    io::Crc32 crc;
    std::uint32_t len = cur.u32();
    {
        std::uint8_t lenb[4];
        for (int i = 0; i < 4; ++i) lenb[i] = static_cast<std::uint8_t>(len >> (8 * i));
        crc.update(lenb, 4);
    }
    io::ByteSpan text = cur.take(len);
    crc.update(text);
    if (cur.u32() != crc.value()) throw checksum_error("header");
    return Header::from_text(
        std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
}

inline DictionarySection read_section(io::Cursor& cur, io::ByteSpan file, const char* name) {
    std::size_t start = cur.pos();
    std::uint64_t entry_count = cur.u64();
    std::uint32_t block_size = cur.u32();
    std::uint64_t block_count = cur.u64();
    if (block_size == 0)
        throw FormatError(FormatDefect::Structure,
                          std::string(name) + " section: block size must be positive");
    std::uint64_t expected_blocks = entry_count == 0 ? 0 : (entry_count - 1) / block_size + 1;
    if (block_count != expected_blocks)
        throw FormatError(FormatDefect::Structure,
                          std::string(name) + " section: block count disagrees with entry count");
    if (block_count > cur.remaining() / 8)
        throw FormatError(FormatDefect::Truncated,
                          std::string(name) + " section: block offsets exceed file");
    std::vector<std::uint64_t> offsets(block_count);
    for (std::uint64_t i = 0; i < block_count; ++i) {
        offsets[i] = cur.u64();
        if ((i == 0 && offsets[0] != 0) || (i > 0 && offsets[i] <= offsets[i - 1]))
            throw FormatError(FormatDefect::Structure,
                              std::string(name) + " section: block offsets not increasing");
    }

    // The payload is self-delimiting: its byte length is found by decoding
    // the final block (block heads are stored whole, so this is local work).
    std::size_t payload_start = cur.pos();
    std::uint64_t payload_len = 0;
    if (block_count > 0) {
        io::ByteSpan rest = file.subspan(payload_start);
        if (offsets.back() >= rest.size())
            throw FormatError(FormatDefect::Truncated,
                              std::string(name) + " section: payload shorter than block offsets");
        std::uint64_t tail_entries = entry_count - (block_count - 1) * block_size;
        pfcdetail::BlockDecoder dec(rest, offsets.back());
        std::string buf;
        for (std::uint64_t i = 0; i < tail_entries; ++i) dec.next(buf, i == 0);
        payload_len = dec.pos();
    }
    io::ByteSpan payload = cur.take(payload_len);

    io::ByteSpan covered = file.subspan(start, cur.pos() - start);
    if (cur.u32() != io::crc32(covered)) throw checksum_error(name);
    return DictionarySection::from_view(entry_count, block_size, std::move(offsets), payload);
}

inline BitmapTriples read_triples(io::Cursor& cur, io::ByteSpan file) {
    std::size_t start = cur.pos();
    std::uint64_t triple_count = cur.u64();
    std::uint64_t subject_count = cur.u64();

    auto read_bits = [&](const char* what) {
        std::uint64_t bits = cur.u64();
        if (bits / 8 > cur.remaining())
            throw FormatError(FormatDefect::Truncated, std::string("bit sequence ") + what +
                                                           " exceeds file");
        io::ByteSpan words = cur.take(BitVector::word_count(bits) * 8);
        return BitVector::from_view(words, bits);
    };
    BitVector bit_p = read_bits("bitP");
    BitVector bit_o = read_bits("bitO");

    auto read_seq = [&](std::uint64_t count, const char* what) {
        std::uint8_t width = cur.u8();
        if (width == 0 || width > 64)
            throw FormatError(FormatDefect::Structure,
                              std::string("sequence ") + what + ": bad bit width");
        if (count > 0 && count > cur.remaining() * 8 / width)
            throw FormatError(FormatDefect::Truncated,
                              std::string("sequence ") + what + " exceeds file");
        io::ByteSpan words = cur.take(PackedSequence::word_count(count, width) * 8);
        return PackedSequence::from_view(words, count, width);
    };
    PackedSequence seq_p = read_seq(bit_p.size(), "seqP");
    PackedSequence seq_o = read_seq(triple_count, "seqO");

    io::ByteSpan covered = file.subspan(start, cur.pos() - start);
    if (cur.u32() != io::crc32(covered)) throw checksum_error("triples");

    auto structure = [](const std::string& msg) {
        return FormatError(FormatDefect::Structure, "triples section: " + msg);
    };
    if (bit_o.size() != triple_count) throw structure("bitO length must equal triple count");
    if (bit_p.count_ones() != subject_count)
        throw structure("bitP population must equal subject count");
    if (bit_o.count_ones() != bit_p.size())
        throw structure("bitO population must equal predicate entries");
    if (triple_count > 0) {
        if (subject_count == 0) throw structure("triples without subjects");
        if (!bit_p.get(bit_p.size() - 1) || !bit_o.get(bit_o.size() - 1))
            throw structure("final marker bits must be set");
    } else if (subject_count != 0 || bit_p.size() != 0) {
        throw structure("empty triple list with nonzero counts");
    }
    return {std::move(seq_p), std::move(seq_o), std::move(bit_p), std::move(bit_o), triple_count,
            subject_count};
}

}  // namespace container

// Serializes a document; deterministic, same document -> same bytes.
inline std::uint64_t write_document(const HdtDocument& doc, std::ostream& out) {
    io::StreamSink sink(out);
    container::write_magic(sink);
    container::write_header(sink, doc.header);
    container::write_section(sink, doc.dictionary.shared());
    container::write_section(sink, doc.dictionary.subjects());
    container::write_section(sink, doc.dictionary.objects());
    container::write_section(sink, doc.dictionary.predicates());
    container::write_triples(sink, doc.triples);
    out.flush();
    if (!out) throw IoError("flush failed");
    return sink.count();
}

inline std::vector<std::uint8_t> document_bytes(const HdtDocument& doc) {
    std::vector<std::uint8_t> out;
    io::VectorSink sink(out);
    container::write_magic(sink);
    container::write_header(sink, doc.header);
    container::write_section(sink, doc.dictionary.shared());
    container::write_section(sink, doc.dictionary.subjects());
    container::write_section(sink, doc.dictionary.objects());
    container::write_section(sink, doc.dictionary.predicates());
    container::write_triples(sink, doc.triples);
    return out;
}

inline void write_document_file(const HdtDocument& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    write_document(doc, out);
}

// Parses and validates a document from bytes. `keepalive` owns the bytes;
// the returned document holds views into them.
inline HdtDocument read_document(io::ByteSpan data, std::shared_ptr<const void> keepalive = {}) {
    io::Cursor cur(data, "document");
    io::ByteSpan magic = cur.take(8);
    if (std::memcmp(magic.data(), kMagic, 4) != 0)
        throw FormatError(FormatDefect::BadMagic, "not an HDTX file");
    if (std::memcmp(magic.data() + 4, kMagic + 4, 4) != 0)
        throw FormatError(FormatDefect::VersionUnsupported, "unsupported HDTX version");

    HdtDocument doc;
    doc.header = container::read_header(cur);
    DictionarySection so = container::read_section(cur, data, "SO");
    DictionarySection s = container::read_section(cur, data, "S");
    DictionarySection o = container::read_section(cur, data, "O");
    DictionarySection p = container::read_section(cur, data, "P");
    doc.dictionary = FourSectionDictionary(std::move(so), std::move(s), std::move(o), std::move(p));
    doc.triples = container::read_triples(cur, data);
    if (!cur.at_end())
        throw FormatError(FormatDefect::Structure, "trailing bytes after triples section");

    const auto& dict = doc.dictionary;
    auto structure = [](const std::string& msg) { return FormatError(FormatDefect::Structure, msg); };
    if (doc.triples.subject_count() != dict.subject_universe())
        throw structure("subject count disagrees with dictionary sections");
    if (doc.header.count_of(Header::kTripleCount) != doc.triples.triple_count() ||
        doc.header.count_of(Header::kDistinctSubjects) != dict.subject_universe() ||
        doc.header.count_of(Header::kDistinctPredicates) != dict.predicates().size() ||
        doc.header.count_of(Header::kDistinctObjects) != dict.object_universe() ||
        doc.header.count_of(Header::kSharedCount) != dict.shared().size())
        throw structure("header counts disagree with components");
    if (doc.header.get(Header::kFormatVersion) != std::optional<std::string_view>("1"))
        throw structure("header format-version disagrees with magic");

    doc.backing = std::move(keepalive);
    return doc;
}

inline HdtDocument read_document_bytes(std::vector<std::uint8_t> bytes) {
    auto owned = std::make_shared<std::vector<std::uint8_t>>(std::move(bytes));
    return read_document(io::ByteSpan(*owned), owned);
}

inline HdtDocument read_document_file(const std::filesystem::path& path) {
    auto mapping = FileMapping::open(path);
    return read_document(mapping->bytes(), mapping);
}

// Term-level pattern match: resolves each given term through the dictionary
// (an unknown term yields no matches) and streams decoded triples.
template <typename Fn>
void for_each_match(const HdtDocument& doc, const std::optional<Term>& s,
                    const std::optional<Term>& p, const std::optional<Term>& o, Fn&& fn) {
    IdTriple pattern;
    if (s) {
        auto id = doc.dictionary.id_of(Role::Subject, s->lexical);
        if (!id) return;
        pattern.s = *id;
    }
    if (p) {
        auto id = doc.dictionary.id_of(Role::Predicate, p->lexical);
        if (!id) return;
        pattern.p = *id;
    }
    if (o) {
        auto id = doc.dictionary.id_of(Role::Object, o->lexical);
        if (!id) return;
        pattern.o = *id;
    }
    auto cursor = doc.triples.search(pattern);
    while (cursor.next()) fn(cursor.triple());
}

inline TermTriple id_triple_to_terms(const HdtDocument& doc, const IdTriple& t) {
    auto term = [&](Role role, std::uint64_t gid) {
        std::string lex = doc.dictionary.term_of(role, gid);
        TermKind kind = lex.empty()          ? TermKind::Iri
                        : lex.front() == '<' ? TermKind::Iri
                        : lex.front() == '_' ? TermKind::BlankNode
                                             : TermKind::Literal;
        return Term{kind, std::move(lex)};
    };
    return {term(Role::Subject, t.s), term(Role::Predicate, t.p), term(Role::Object, t.o)};
}

}  // namespace hdtx
