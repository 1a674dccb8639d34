#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hdtx/error.hpp"
#include "hdtx/section.hpp"
#include "hdtx/term.hpp"

namespace hdtx {

enum class Role : std::uint8_t { Subject, Predicate, Object };

// On-disk mapping tags; 0 is reserved for "unset".
enum class SectionTag : std::uint8_t { Shared = 1, Subjects = 2, Objects = 3, Predicates = 4 };

struct ClassifiedTerms {
    std::vector<std::string> shared;      // subjects ∩ objects
    std::vector<std::string> subjects;    // subjects \ objects
    std::vector<std::string> objects;     // objects \ subjects
    std::vector<std::string> predicates;  // all predicates
};

// Splits the terms of a triple stream into the four dictionary sections.
// In-memory variant: three sorted sets, intersected at the end.
class TermClassifier {
public:
    void add(const TermTriple& t) {
        insert(subjects_, t.s.lexical);
        insert(predicates_, t.p.lexical);
        insert(objects_, t.o.lexical);
    }

    std::uint64_t approx_bytes() const noexcept { return bytes_; }

    ClassifiedTerms finish() const {
        ClassifiedTerms out;
        std::set_intersection(subjects_.begin(), subjects_.end(), objects_.begin(), objects_.end(),
                              std::back_inserter(out.shared));
        std::set_difference(subjects_.begin(), subjects_.end(), objects_.begin(), objects_.end(),
                            std::back_inserter(out.subjects));
        std::set_difference(objects_.begin(), objects_.end(), subjects_.begin(), subjects_.end(),
                            std::back_inserter(out.objects));
        out.predicates.assign(predicates_.begin(), predicates_.end());
        return out;
    }

private:
    void insert(std::set<std::string>& s, const std::string& v) {
        auto [it, fresh] = s.insert(v);
        if (fresh) bytes_ += v.size() + 48;  // string bytes plus rough node overhead
    }

    std::set<std::string> subjects_, predicates_, objects_;
    std::uint64_t bytes_ = 0;
};

template <typename Range>
ClassifiedTerms classify_terms(const Range& triples) {
    TermClassifier c;
    for (const auto& t : triples) c.add(t);
    return c.finish();
}

// Spill-to-disk variant behind the same result type: terms are collected as
// (term, role-bit) pairs; whenever the in-memory budget is exceeded a sorted
// run is written to tmp_dir, and finish() k-way merges the runs, or-ing the
// role bits of equal terms.
class ExternalTermClassifier {
public:
    ExternalTermClassifier(std::filesystem::path tmp_dir, std::uint64_t budget_bytes)
        : tmp_dir_(std::move(tmp_dir)), budget_(budget_bytes) {}

    ~ExternalTermClassifier() {
        for (const auto& p : runs_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    }

    void add(const TermTriple& t) {
        note(t.s.lexical, kSubject);
        note(t.p.lexical, kPredicate);
        note(t.o.lexical, kObject);
        if (bytes_ > budget_) spill();
    }

    ClassifiedTerms finish() {
        ClassifiedTerms out;
        if (runs_.empty()) {
            for (auto& [term, bits] : acc_) place(out, term, bits);
            return out;
        }
        spill();

        struct Head {
            std::string term;
            std::uint8_t bits;
            std::size_t run;
        };
        auto greater = [](const Head& a, const Head& b) { return a.term > b.term; };
        std::priority_queue<Head, std::vector<Head>, decltype(greater)> heap(greater);

        std::vector<std::ifstream> files;
        files.reserve(runs_.size());
        for (const auto& p : runs_) {
            files.emplace_back(p, std::ios::binary);
            if (!files.back()) throw IoError("cannot reopen classifier run " + p.string());
        }
        auto pull = [&](std::size_t run) {
            Head h;
            h.run = run;
            if (read_record(files[run], h.term, h.bits)) heap.push(std::move(h));
        };
        for (std::size_t i = 0; i < files.size(); ++i) pull(i);

        std::string cur;
        std::uint8_t bits = 0;
        bool have = false;
        while (!heap.empty()) {
            Head h = heap.top();
            heap.pop();
            if (have && h.term != cur) {
                place(out, cur, bits);
                bits = 0;
            }
            cur = std::move(h.term);
            bits |= h.bits;
            have = true;
            pull(h.run);
        }
        if (have) place(out, cur, bits);
        return out;
    }

private:
    static constexpr std::uint8_t kSubject = 1, kPredicate = 2, kObject = 4;

    void note(const std::string& term, std::uint8_t bit) {
        auto [it, fresh] = acc_.try_emplace(term, 0);
        if (fresh) bytes_ += term.size() + 64;
        it->second |= bit;
    }

    void spill() {
        if (acc_.empty()) return;
        auto path = tmp_dir_ / ("classify-run-" + std::to_string(runs_.size()) + ".bin");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create classifier run " + path.string());
        for (const auto& [term, bits] : acc_) write_record(out, term, bits);
        out.flush();
        if (!out) throw IoError("write failed on classifier run " + path.string());
        runs_.push_back(path);
        acc_.clear();
        bytes_ = 0;
    }

    static void write_record(std::ofstream& out, const std::string& term, std::uint8_t bits) {
        std::uint32_t len = static_cast<std::uint32_t>(term.size());
        out.write(reinterpret_cast<const char*>(&len), 4);
        out.write(term.data(), len);
        out.write(reinterpret_cast<const char*>(&bits), 1);
    }

    static bool read_record(std::ifstream& in, std::string& term, std::uint8_t& bits) {
        std::uint32_t len;
        if (!in.read(reinterpret_cast<char*>(&len), 4)) return false;
        term.resize(len);
        in.read(term.data(), len);
        in.read(reinterpret_cast<char*>(&bits), 1);
        if (!in) throw IoError("classifier run truncated");
        return true;
    }

    static void place(ClassifiedTerms& out, const std::string& term, std::uint8_t bits) {
        bool s = bits & kSubject, o = bits & kObject;
        if (s && o)
            out.shared.push_back(term);
        else if (s)
            out.subjects.push_back(term);
        else if (o)
            out.objects.push_back(term);
        if (bits & kPredicate) out.predicates.push_back(term);
    }

    std::filesystem::path tmp_dir_;
    std::uint64_t budget_;
    std::map<std::string, std::uint8_t> acc_;
    std::uint64_t bytes_ = 0;
    std::vector<std::filesystem::path> runs_;
};

// The four sorted sections plus the global-id arithmetic. Subject ids run
// over shared then subject-only entries; object ids over shared then
// object-only entries; a term present in the shared section has the same id
// in both roles.
class FourSectionDictionary {
public:
    FourSectionDictionary() = default;

    FourSectionDictionary(DictionarySection shared, DictionarySection subjects,
                          DictionarySection objects, DictionarySection predicates)
        : shared_(std::move(shared)),
          subjects_(std::move(subjects)),
          objects_(std::move(objects)),
          predicates_(std::move(predicates)) {}

    static FourSectionDictionary build(const ClassifiedTerms& terms,
                                       std::uint32_t block_size = kDefaultBlockSize) {
        return {build_section(terms.shared, block_size), build_section(terms.subjects, block_size),
                build_section(terms.objects, block_size),
                build_section(terms.predicates, block_size)};
    }

    const DictionarySection& shared() const noexcept { return shared_; }
    const DictionarySection& subjects() const noexcept { return subjects_; }
    const DictionarySection& objects() const noexcept { return objects_; }
    const DictionarySection& predicates() const noexcept { return predicates_; }

    std::uint64_t subject_universe() const noexcept { return shared_.size() + subjects_.size(); }
    std::uint64_t object_universe() const noexcept { return shared_.size() + objects_.size(); }

    std::optional<std::uint64_t> id_of(Role role, std::string_view term) const {
        switch (role) {
            case Role::Predicate:
                return predicates_.locate(term);
            case Role::Subject:
                if (auto id = shared_.locate(term)) return id;
                if (auto id = subjects_.locate(term)) return *id + shared_.size();
                return std::nullopt;
            case Role::Object:
                if (auto id = shared_.locate(term)) return id;
                if (auto id = objects_.locate(term)) return *id + shared_.size();
                return std::nullopt;
        }
        return std::nullopt;
    }

    std::string term_of(Role role, std::uint64_t gid) const {
        switch (role) {
            case Role::Predicate:
                return predicates_.extract(gid);
            case Role::Subject:
                if (gid != 0 && gid <= shared_.size()) return shared_.extract(gid);
                return subjects_.extract(gid - shared_.size());
            case Role::Object:
                if (gid != 0 && gid <= shared_.size()) return shared_.extract(gid);
                return objects_.extract(gid - shared_.size());
        }
        throw IdOutOfRangeError("bad role");
    }

private:
    DictionarySection shared_, subjects_, objects_, predicates_;
};

}  // namespace hdtx
