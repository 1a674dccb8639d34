#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hdtx/builder.hpp"
#include "hdtx/document.hpp"
#include "hdtx/merge.hpp"

namespace hdtx {

// Streaming merge of two documents. Phase 1 joins the dictionaries section
// by section over compressed cursors, phase 2 joins the triples subject by
// subject through disk-backed id mappings, phase 3 writes the header and
// assembles the output file. No dictionary section is ever decoded whole.

struct CatConfig {
    std::filesystem::path tmp_dir;  // empty: $HDTX_TMPDIR, else the system tmp dir
    std::uint32_t block_size = kDefaultBlockSize;
    // Per-subject sublists are sorted in memory; beyond this the merge fails
    // loudly instead of degrading.
    std::uint64_t max_subject_sublist = 1ull << 22;
};

struct MergeRecord {
    std::string label;
    std::uint64_t n_a = 0, n_b = 0, comparisons = 0;
};

struct CatStats {
    std::uint64_t triples_out = 0;
    std::uint64_t subjects_out = 0;
    // Distinct terms shared between section pairs (Figure-1 pairs plus the
    // four like-with-like pairs).
    std::uint64_t common_so = 0, common_s = 0, common_o = 0, common_p = 0;
    std::uint64_t common_so1_s2 = 0, common_s1_so2 = 0;
    std::uint64_t common_so1_o2 = 0, common_o1_so2 = 0;
    std::uint64_t common_s1_o2 = 0, common_o1_s2 = 0;
    std::uint64_t peak_sublist = 0;
    std::int64_t peak_resident_entries = 0;
    std::vector<MergeRecord> merges;
};

// ---------------------------------------------------------------------------
// Temporary workspace and disk-backed arrays.
// ---------------------------------------------------------------------------

inline std::filesystem::path default_tmp_dir() {
    if (const char* env = std::getenv("HDTX_TMPDIR"); env != nullptr && *env != '\0')
        return std::filesystem::path(env);
    return std::filesystem::temp_directory_path();
}

class TempWorkspace {
public:
    explicit TempWorkspace(const std::filesystem::path& base = {}) {
        static std::atomic<std::uint64_t> counter{0};
        std::filesystem::path root = base.empty() ? default_tmp_dir() : base;
        std::random_device rd;
        dir_ = root / ("hdtx-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter.fetch_add(1)) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(dir_);
    }

    ~TempWorkspace() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }

    TempWorkspace(const TempWorkspace&) = delete;
    TempWorkspace& operator=(const TempWorkspace&) = delete;

    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::filesystem::path file(const std::string& name) const { return dir_ / name; }

private:
    std::filesystem::path dir_;
};

namespace catdetail {

// Fixed-width records (u8 section tag, u64 target id) keyed by 1-based
// source id; written where the merge passes produce them, read randomly
// while joining the triples. Tag 0 marks a hole.
class SectionMappingFile {
public:
    static constexpr std::size_t kRecordSize = 9;

    SectionMappingFile(const std::filesystem::path& path, std::uint64_t count)
        : path_(path), count_(count) {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0600);
        if (fd_ < 0) throw IoError("cannot create mapping file " + path.string());
        if (::ftruncate(fd_, static_cast<off_t>(count * kRecordSize)) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw IoError("cannot size mapping file " + path.string());
        }
    }

    ~SectionMappingFile() {
        if (fd_ >= 0) ::close(fd_);
    }

    SectionMappingFile(const SectionMappingFile&) = delete;
    SectionMappingFile& operator=(const SectionMappingFile&) = delete;

    std::uint64_t size() const noexcept { return count_; }

    void set(std::uint64_t src_id, SectionTag tag, std::uint64_t target_id) {
        check_range(src_id);
        std::uint8_t rec[kRecordSize];
        rec[0] = static_cast<std::uint8_t>(tag);
        for (int i = 0; i < 8; ++i) rec[1 + i] = static_cast<std::uint8_t>(target_id >> (8 * i));
        if (::pwrite(fd_, rec, kRecordSize, offset(src_id)) != kRecordSize)
            throw IoError("mapping write failed on " + path_.string());
    }

    struct Target {
        SectionTag tag;
        std::uint64_t id;
    };

    Target get(std::uint64_t src_id) const {
        check_range(src_id);
        std::uint8_t rec[kRecordSize];
        if (::pread(fd_, rec, kRecordSize, offset(src_id)) != kRecordSize)
            throw IoError("mapping read failed on " + path_.string());
        if (rec[0] == 0)
            throw MappingIncompleteError("source id " + std::to_string(src_id) +
                                         " has no mapping in " + path_.filename().string());
        std::uint64_t id = 0;
        for (int i = 0; i < 8; ++i) id |= static_cast<std::uint64_t>(rec[1 + i]) << (8 * i);
        return {static_cast<SectionTag>(rec[0]), id};
    }

private:
    void check_range(std::uint64_t src_id) const {
        if (src_id == 0 || src_id > count_)
            throw MappingIncompleteError("source id " + std::to_string(src_id) +
                                         " outside mapping " + path_.filename().string());
    }
    static off_t offset(std::uint64_t src_id) {
        return static_cast<off_t>((src_id - 1) * kRecordSize);
    }

    std::filesystem::path path_;
    std::uint64_t count_;
    int fd_ = -1;
};

inline void put_u64_stream(std::ofstream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
    out.write(b, 8);
}

inline bool get_u64_stream(std::ifstream& in, std::uint64_t& v) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return true;
}

// One u64 per merged subject id, appended in id order: the source's global
// subject id, or 0 when the merged subject does not occur in that source.
class SubjectMappingWriter {
public:
    explicit SubjectMappingWriter(const std::filesystem::path& path)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot create subject mapping " + path.string());
    }

    void append(std::uint64_t source_gid) { put_u64_stream(out_, source_gid); }

    void finish() {
        out_.flush();
        if (!out_) throw IoError("write failed on subject mapping " + path_.string());
        out_.close();
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

class SubjectMappingReader {
public:
    explicit SubjectMappingReader(const std::filesystem::path& path)
        : in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open subject mapping " + path.string());
    }

    // 0 means absent; nullopt at end of file.
    std::optional<std::uint64_t> next() {
        std::uint64_t v;
        if (!get_u64_stream(in_, v)) return std::nullopt;
        return v;
    }

private:
    std::ifstream in_;
};

// Sorted (id, id) spill files for the cross-section common-entry lists.
class IdPairWriter {
public:
    explicit IdPairWriter(const std::filesystem::path& path)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot create spill file " + path.string());
    }
    void append(std::uint64_t a, std::uint64_t b) {
        put_u64_stream(out_, a);
        put_u64_stream(out_, b);
    }
    void finish() {
        out_.flush();
        if (!out_) throw IoError("write failed on spill file " + path_.string());
        out_.close();
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

class IdPairReader {
public:
    explicit IdPairReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open spill file " + path.string());
        advance();
    }

    bool valid() const noexcept { return valid_; }
    std::uint64_t a() const noexcept { return a_; }
    std::uint64_t b() const noexcept { return b_; }

    void advance() {
        valid_ = get_u64_stream(in_, a_) && get_u64_stream(in_, b_);
    }

private:
    std::ifstream in_;
    std::uint64_t a_ = 0, b_ = 0;
    bool valid_ = false;
};

// Sorted (term, id, id) spill files for the entries that migrate into the
// shared section.
class TermPairWriter {
public:
    explicit TermPairWriter(const std::filesystem::path& path)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot create spill file " + path.string());
    }
    void append(std::string_view term, std::uint64_t a, std::uint64_t b) {
        std::uint32_t len = static_cast<std::uint32_t>(term.size());
        char lenb[4];
        for (int i = 0; i < 4; ++i) lenb[i] = static_cast<char>(len >> (8 * i));
        out_.write(lenb, 4);
        out_.write(term.data(), len);
        put_u64_stream(out_, a);
        put_u64_stream(out_, b);
    }
    void finish() {
        out_.flush();
        if (!out_) throw IoError("write failed on spill file " + path_.string());
        out_.close();
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

class TermPairReader {
public:
    explicit TermPairReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open spill file " + path.string());
    }

    bool next() {
        unsigned char lenb[4];
        if (!in_.read(reinterpret_cast<char*>(lenb), 4)) return false;
        std::uint32_t len = 0;
        for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(lenb[i]) << (8 * i);
        term_.resize(len);
        in_.read(term_.data(), len);
        if (!get_u64_stream(in_, a_) || !get_u64_stream(in_, b_))
            throw IoError("spill file truncated");
        return true;
    }

    std::string_view term() const noexcept { return term_; }
    std::uint64_t a() const noexcept { return a_; }
    std::uint64_t b() const noexcept { return b_; }
    std::uint64_t id() const noexcept { return a_; }  // entry-stream interface

private:
    std::ifstream in_;
    std::string term_;
    std::uint64_t a_ = 0, b_ = 0;
};

// Section cursor that skips the local ids delivered by two ascending,
// disjoint id streams (the entries that migrated to the shared section).
// Each skip source carries id pairs; the key column holding THIS section's
// local ids is chosen per source.
class SkippingCursor {
public:
    SkippingCursor(const DictionarySection& sec, std::unique_ptr<IdPairReader> skip_x,
                   bool x_key_is_b, std::unique_ptr<TermPairReader> skip_y, bool y_key_is_b)
        : cur_(sec.cursor()),
          skip_x_(std::move(skip_x)),
          skip_y_(std::move(skip_y)),
          x_key_is_b_(x_key_is_b),
          y_key_is_b_(y_key_is_b) {
        if (skip_y_ && !skip_y_->next()) skip_y_.reset();
    }

    bool next() {
        while (cur_.next()) {
            if (should_skip(cur_.id())) continue;
            return true;
        }
        return false;
    }

    std::string_view term() const { return cur_.term(); }
    std::uint64_t id() const { return cur_.id(); }

private:
    bool should_skip(std::uint64_t id) {
        if (skip_x_ && skip_x_->valid()) {
            std::uint64_t key = x_key_is_b_ ? skip_x_->b() : skip_x_->a();
            if (key == id) {
                skip_x_->advance();
                return true;
            }
        }
        if (skip_y_) {
            std::uint64_t key = y_key_is_b_ ? skip_y_->b() : skip_y_->a();
            if (key == id) {
                if (!skip_y_->next()) skip_y_.reset();
                return true;
            }
        }
        return false;
    }

    DictionarySection::Cursor cur_;
    std::unique_ptr<IdPairReader> skip_x_;
    std::unique_ptr<TermPairReader> skip_y_;
    bool x_key_is_b_;
    bool y_key_is_b_;
};

// Streams a section payload into a temporary file while keeping only the
// block offsets in memory.
struct SectionArtifact {
    std::uint64_t entry_count = 0;
    std::uint32_t block_size = kDefaultBlockSize;
    std::vector<std::uint64_t> offsets;
    std::filesystem::path payload_path;
};

class SectionFileWriter {
public:
    SectionFileWriter(const std::filesystem::path& path, std::uint32_t block_size)
        : path_(path),
          out_(path, std::ios::binary | std::ios::trunc),
          sink_(out_),
          enc_(sink_, block_size),
          block_size_(block_size) {
        if (!out_) throw IoError("cannot create section payload " + path.string());
    }

    void add(std::string_view term) { enc_.add(term); }
    std::uint64_t count() const { return enc_.count(); }

    SectionArtifact finish() {
        out_.flush();
        if (!out_) throw IoError("write failed on section payload " + path_.string());
        out_.close();
        return {enc_.count(), block_size_, enc_.take_offsets(), path_};
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    io::StreamSink sink_;
    PfcEncoder enc_;
    std::uint32_t block_size_;
};

inline void copy_file_into(const std::filesystem::path& path, io::Sink& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot reopen " + path.string());
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        out.write(buf, static_cast<std::size_t>(in.gcount()));
        if (in.eof()) break;
    }
}

}  // namespace catdetail

// ---------------------------------------------------------------------------
// Phase 1: joining the dictionaries.
// ---------------------------------------------------------------------------

struct DictCatResult {
    catdetail::SectionArtifact so, s, o, p;
    std::unique_ptr<catdetail::SectionMappingFile> m_so1, m_s1, m_o1, m_p1;
    std::unique_ptr<catdetail::SectionMappingFile> m_so2, m_s2, m_o2, m_p2;
    std::filesystem::path subj1_path, subj2_path;
};

inline DictCatResult cat_dictionary(const FourSectionDictionary& d1,
                                    const FourSectionDictionary& d2, const TempWorkspace& ws,
                                    std::uint32_t block_size, CatStats& stats) {
    using namespace catdetail;

    DictCatResult r;
    auto mapping = [&](const char* name, std::uint64_t count) {
        return std::make_unique<SectionMappingFile>(ws.file(name), count);
    };
    r.m_so1 = mapping("map-so1.bin", d1.shared().size());
    r.m_s1 = mapping("map-s1.bin", d1.subjects().size());
    r.m_o1 = mapping("map-o1.bin", d1.objects().size());
    r.m_p1 = mapping("map-p1.bin", d1.predicates().size());
    r.m_so2 = mapping("map-so2.bin", d2.shared().size());
    r.m_s2 = mapping("map-s2.bin", d2.subjects().size());
    r.m_o2 = mapping("map-o2.bin", d2.objects().size());
    r.m_p2 = mapping("map-p2.bin", d2.predicates().size());
    r.subj1_path = ws.file("subjects-1.bin");
    r.subj2_path = ws.file("subjects-2.bin");

    // Cross-section common entries, spilled to disk so each later pass can
    // stream them back independently. Keyed columns are ascending because
    // every input stream is term-sorted.
    auto spill_ids = [&](const DictionarySection& x, const DictionarySection& y,
                         const char* name, bool swap_columns) {
        IdPairWriter w(ws.file(name));
        auto cx = x.cursor();
        auto cy = y.cursor();
        std::uint64_t n = for_each_common_entry(
            cx, cy, [&](std::string_view, std::uint64_t ix, std::uint64_t iy) {
                if (swap_columns)
                    w.append(iy, ix);
                else
                    w.append(ix, iy);
            });
        w.finish();
        return n;
    };
    auto spill_terms = [&](const DictionarySection& x, const DictionarySection& y,
                           const char* name) {
        TermPairWriter w(ws.file(name));
        auto cx = x.cursor();
        auto cy = y.cursor();
        std::uint64_t n =
            for_each_common_entry(cx, cy, [&](std::string_view term, std::uint64_t ix,
                                              std::uint64_t iy) { w.append(term, ix, iy); });
        w.finish();
        return n;
    };

    // c1..c4 are keyed by the shared-section side; c5/c6 carry the term
    // because they become new shared entries.
    stats.common_so1_s2 = spill_ids(d1.shared(), d2.subjects(), "c1-so1-s2.bin", false);
    stats.common_s1_so2 = spill_ids(d1.subjects(), d2.shared(), "c2-so2-s1.bin", true);
    stats.common_so1_o2 = spill_ids(d1.shared(), d2.objects(), "c3-so1-o2.bin", false);
    stats.common_o1_so2 = spill_ids(d1.objects(), d2.shared(), "c4-so2-o1.bin", true);
    stats.common_s1_o2 = spill_terms(d1.subjects(), d2.objects(), "c5-s1-o2.bin");
    stats.common_o1_s2 = spill_terms(d1.objects(), d2.subjects(), "c6-o1-s2.bin");

    // P_cat: plain two-way merge.
    {
        SectionFileWriter w(ws.file("payload-p.bin"), block_size);
        auto p1 = d1.predicates().cursor();
        auto p2 = d2.predicates().cursor();
        MergeCounts mc = merge_sorted_streams(
            p1, p2, [&](std::string_view term, std::uint64_t i1, std::uint64_t i2) {
                w.add(term);
                std::uint64_t k = w.count();
                if (i1) r.m_p1->set(i1, SectionTag::Predicates, k);
                if (i2) r.m_p2->set(i2, SectionTag::Predicates, k);
            });
        stats.common_p = mc.n_common;
        stats.merges.push_back({"P", mc.n_a, mc.n_b, mc.comparisons});
        r.p = w.finish();
    }

    SubjectMappingWriter subj1(r.subj1_path);
    SubjectMappingWriter subj2(r.subj2_path);

    // SO_cat: four-way co-iteration over SO1, SO2 and the two migrating
    // lists. The c1..c4 readers ride along, keyed by their SO-side id, so
    // the occurrences in the other file's S/O sections get mapped too.
    {
        SectionFileWriter w(ws.file("payload-so.bin"), block_size);
        auto so1 = d1.shared().cursor();
        auto so2 = d2.shared().cursor();
        TermPairReader c5(ws.file("c5-s1-o2.bin"));
        TermPairReader c6(ws.file("c6-o1-s2.bin"));
        IdPairReader c1(ws.file("c1-so1-s2.bin"));
        IdPairReader c2(ws.file("c2-so2-s1.bin"));
        IdPairReader c3(ws.file("c3-so1-o2.bin"));
        IdPairReader c4(ws.file("c4-so2-o1.bin"));

        bool h_so1 = so1.next(), h_so2 = so2.next();
        bool h_c5 = c5.next(), h_c6 = c6.next();

        std::string key;  // stable copy: advancing a cursor invalidates its term view
        while (h_so1 || h_so2 || h_c5 || h_c6) {
            std::string_view best;
            bool have = false;
            auto consider = [&](bool alive, std::string_view t) {
                if (!alive) return;
                if (!have || order_bytes(t, best) == std::strong_ordering::less) {
                    best = t;
                    have = true;
                }
            };
            consider(h_so1, so1.term());
            consider(h_so2, so2.term());
            consider(h_c5, c5.term());
            consider(h_c6, c6.term());
            key.assign(best);

            w.add(key);
            std::uint64_t k = w.count();
            std::uint64_t subj1_gid = 0, subj2_gid = 0;

            if (h_so1 && so1.term() == key) {
                std::uint64_t i = so1.id();
                r.m_so1->set(i, SectionTag::Shared, k);
                subj1_gid = i;
                if (c1.valid() && c1.a() == i) {
                    r.m_s2->set(c1.b(), SectionTag::Shared, k);
                    subj2_gid = d2.shared().size() + c1.b();
                    c1.advance();
                }
                if (c3.valid() && c3.a() == i) {
                    r.m_o2->set(c3.b(), SectionTag::Shared, k);
                    c3.advance();
                }
                h_so1 = so1.next();
            }
            if (h_so2 && so2.term() == key) {
                std::uint64_t j = so2.id();
                r.m_so2->set(j, SectionTag::Shared, k);
                subj2_gid = j;
                if (c2.valid() && c2.a() == j) {
                    r.m_s1->set(c2.b(), SectionTag::Shared, k);
                    subj1_gid = d1.shared().size() + c2.b();
                    c2.advance();
                }
                if (c4.valid() && c4.a() == j) {
                    r.m_o1->set(c4.b(), SectionTag::Shared, k);
                    c4.advance();
                }
                h_so2 = so2.next();
            }
            if (h_c5 && c5.term() == key) {
                r.m_s1->set(c5.a(), SectionTag::Shared, k);
                r.m_o2->set(c5.b(), SectionTag::Shared, k);
                subj1_gid = d1.shared().size() + c5.a();
                h_c5 = c5.next();
            }
            if (h_c6 && c6.term() == key) {
                r.m_o1->set(c6.a(), SectionTag::Shared, k);
                r.m_s2->set(c6.b(), SectionTag::Shared, k);
                subj2_gid = d2.shared().size() + c6.b();
                h_c6 = c6.next();
            }
            subj1.append(subj1_gid);
            subj2.append(subj2_gid);
        }
        r.so = w.finish();
        // |SO_cat| = |SO1| + |SO2| - |SO1 ∩ SO2| + |S1 ∩ O2| + |O1 ∩ S2|
        stats.common_so = d1.shared().size() + d2.shared().size() + stats.common_s1_o2 +
                          stats.common_o1_s2 - r.so.entry_count;
    }

    // S_cat: two-way merge of the S sections minus the entries that moved
    // to SO_cat.
    {
        SectionFileWriter w(ws.file("payload-s.bin"), block_size);
        // S1 ids live in c2 column b and c5 column a; S2 ids in c1 column b
        // and c6 column b.
        SkippingCursor s1(d1.subjects(),
                          std::make_unique<IdPairReader>(ws.file("c2-so2-s1.bin")), true,
                          std::make_unique<TermPairReader>(ws.file("c5-s1-o2.bin")), false);
        SkippingCursor s2(d2.subjects(),
                          std::make_unique<IdPairReader>(ws.file("c1-so1-s2.bin")), true,
                          std::make_unique<TermPairReader>(ws.file("c6-o1-s2.bin")), true);
        MergeCounts mc = merge_sorted_streams(
            s1, s2, [&](std::string_view term, std::uint64_t i1, std::uint64_t i2) {
                w.add(term);
                std::uint64_t k = w.count();
                std::uint64_t subj1_gid = 0, subj2_gid = 0;
                if (i1) {
                    r.m_s1->set(i1, SectionTag::Subjects, k);
                    subj1_gid = d1.shared().size() + i1;
                }
                if (i2) {
                    r.m_s2->set(i2, SectionTag::Subjects, k);
                    subj2_gid = d2.shared().size() + i2;
                }
                subj1.append(subj1_gid);
                subj2.append(subj2_gid);
            });
        stats.common_s = mc.n_common;
        stats.merges.push_back({"S", mc.n_a, mc.n_b, mc.comparisons});
        r.s = w.finish();
    }

    subj1.finish();
    subj2.finish();

    // O_cat: same shape as S_cat on the object side.
    {
        SectionFileWriter w(ws.file("payload-o.bin"), block_size);
        // O1 ids live in c4 column b and c6 column a; O2 ids in c3 column b
        // and c5 column b.
        SkippingCursor o1(d1.objects(),
                          std::make_unique<IdPairReader>(ws.file("c4-so2-o1.bin")), true,
                          std::make_unique<TermPairReader>(ws.file("c6-o1-s2.bin")), false);
        SkippingCursor o2(d2.objects(),
                          std::make_unique<IdPairReader>(ws.file("c3-so1-o2.bin")), true,
                          std::make_unique<TermPairReader>(ws.file("c5-s1-o2.bin")), true);
        MergeCounts mc = merge_sorted_streams(
            o1, o2, [&](std::string_view term, std::uint64_t i1, std::uint64_t i2) {
                w.add(term);
                std::uint64_t k = w.count();
                if (i1) r.m_o1->set(i1, SectionTag::Objects, k);
                if (i2) r.m_o2->set(i2, SectionTag::Objects, k);
            });
        stats.common_o = mc.n_common;
        stats.merges.push_back({"O", mc.n_a, mc.n_b, mc.comparisons});
        r.o = w.finish();
    }

    return r;
}

// ---------------------------------------------------------------------------
// Phase 2: joining the triples.
// ---------------------------------------------------------------------------

namespace catdetail {

struct SourceMaps {
    const SectionMappingFile* shared;
    const SectionMappingFile* objects;
    const SectionMappingFile* predicates;
    std::uint64_t shared_size;  // |SO| of the source dictionary
};

inline std::uint64_t remap_predicate(const SourceMaps& m, std::uint64_t p) {
    auto t = m.predicates->get(p);
    if (t.tag != SectionTag::Predicates)
        throw MappingIncompleteError("predicate mapped outside the predicate section");
    return t.id;
}

inline std::uint64_t remap_object(const SourceMaps& m, std::uint64_t o,
                                  std::uint64_t so_cat_size) {
    SectionMappingFile::Target t =
        o <= m.shared_size ? m.shared->get(o) : m.objects->get(o - m.shared_size);
    if (t.tag == SectionTag::Shared) return t.id;
    if (t.tag == SectionTag::Objects) return so_cat_size + t.id;
    throw MappingIncompleteError("object mapped outside the shared and object sections");
}

}  // namespace catdetail

// Walks the merged subject ids in order, pulls each source's slice, remaps
// predicate and object ids, sorts the per-subject sublist and emits it. The
// per-source slices arrive ordered but the order is lost in remapping, so a
// standard in-memory sort runs on each sublist.
template <typename Emit>
void cat_triples(const HdtDocument& a, const HdtDocument& b, const DictCatResult& dict,
                 const CatConfig& config, CatStats& stats, Emit&& emit) {
    using namespace catdetail;
    SubjectMappingReader subj1(dict.subj1_path);
    SubjectMappingReader subj2(dict.subj2_path);
    SourceMaps maps1{dict.m_so1.get(), dict.m_o1.get(), dict.m_p1.get(), a.dictionary.shared().size()};
    SourceMaps maps2{dict.m_so2.get(), dict.m_o2.get(), dict.m_p2.get(), b.dictionary.shared().size()};
    std::uint64_t so_cat_size = dict.so.entry_count;
    std::uint64_t merged_subjects = dict.so.entry_count + dict.s.entry_count;

    std::vector<std::pair<std::uint64_t, std::uint64_t>> sublist;
    instrument::ResidentGuard guard;

    for (std::uint64_t k = 1; k <= merged_subjects; ++k) {
        auto g1 = subj1.next();
        auto g2 = subj2.next();
        if (!g1 || !g2)
            throw MappingIncompleteError("subject mapping shorter than the merged subject range");
        if (*g1 == 0 && *g2 == 0)
            throw MappingIncompleteError("merged subject " + std::to_string(k) +
                                         " occurs in neither source");
        sublist.clear();
        auto pull = [&](const HdtDocument& doc, const SourceMaps& maps, std::uint64_t gid) {
            if (gid == 0) return;
            auto slice = doc.triples.subject_slice(gid);
            while (slice.next()) {
                sublist.emplace_back(remap_predicate(maps, slice.predicate()),
                                     remap_object(maps, slice.object(), so_cat_size));
                if (sublist.size() > config.max_subject_sublist)
                    throw CapacityExceededError("per-subject sublist exceeds the configured limit");
                guard.resize(static_cast<std::int64_t>(sublist.size()));
            }
        };
        pull(a, maps1, *g1);
        pull(b, maps2, *g2);

        std::sort(sublist.begin(), sublist.end());
        sublist.erase(std::unique(sublist.begin(), sublist.end()), sublist.end());
        stats.peak_sublist = std::max<std::uint64_t>(stats.peak_sublist, sublist.size());
        for (const auto& [p, o] : sublist) emit(IdTriple{k, p, o});
        guard.resize(0);
    }
}

// ---------------------------------------------------------------------------
// Phase 3: header and file assembly.
// ---------------------------------------------------------------------------

// Merges two documents into outPath; the output triple set is the union of
// the inputs. Writes through a temporary and renames, so a failure leaves no
// partial output behind.
inline CatStats hdt_cat(const std::filesystem::path& path_a, const std::filesystem::path& path_b,
                        const std::filesystem::path& out_path, const CatConfig& config = {}) {
    using namespace catdetail;
    instrument::gauges().reset_peak();

    HdtDocument a = read_document_file(path_a);
    HdtDocument b = read_document_file(path_b);
    TempWorkspace ws(config.tmp_dir);
    CatStats stats;

    DictCatResult dict = cat_dictionary(a.dictionary, b.dictionary, ws, config.block_size, stats);

    BitmapTriples::Encoder enc(
        PackedSequence::width_for(dict.p.entry_count),
        PackedSequence::width_for(dict.so.entry_count + dict.o.entry_count));
    cat_triples(a, b, dict, config, stats, [&](const IdTriple& t) { enc.add(t); });
    BitmapTriples triples = enc.finish();
    stats.triples_out = triples.triple_count();
    stats.subjects_out = triples.subject_count();

    Header header = make_header(dict.so.entry_count, dict.s.entry_count, dict.o.entry_count,
                                dict.p.entry_count, triples);

    std::filesystem::path tmp_out = out_path;
    tmp_out += ".tmp";
    try {
        {
            std::ofstream out(tmp_out, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot create " + tmp_out.string());
            io::StreamSink sink(out);
            container::write_magic(sink);
            container::write_header(sink, header);
            for (const SectionArtifact* art : {&dict.so, &dict.s, &dict.o, &dict.p}) {
                container::write_section(sink, art->entry_count, art->block_size, art->offsets,
                                         [&](io::Sink& s) { copy_file_into(art->payload_path, s); });
            }
            container::write_triples(sink, triples);
            out.flush();
            if (!out) throw IoError("write failed on " + tmp_out.string());
        }
        read_document_file(tmp_out);  // self-check: structure and checksums
        std::filesystem::rename(tmp_out, out_path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp_out, ec);
        throw;
    }

    stats.peak_resident_entries = instrument::gauges().peak();
    return stats;
}

}  // namespace hdtx
