#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdtx/dictionary.hpp"
#include "hdtx/error.hpp"
#include "hdtx/triples.hpp"

namespace hdtx {

// Ordered key=value text header. Writers emit pairs in insertion order, so
// serialization is deterministic; readers keep unknown keys and ignore them.
class Header {
public:
    static constexpr std::string_view kFormatVersion = "format-version";
    static constexpr std::string_view kTripleCount = "triple-count";
    static constexpr std::string_view kDistinctSubjects = "distinct-subjects";
    static constexpr std::string_view kDistinctPredicates = "distinct-predicates";
    static constexpr std::string_view kDistinctObjects = "distinct-objects";
    static constexpr std::string_view kSharedCount = "shared-count";

    void set(std::string key, std::string value) {
        for (auto& [k, v] : pairs_) {
            if (k == key) {
                v = std::move(value);
                return;
            }
        }
        pairs_.emplace_back(std::move(key), std::move(value));
    }

    std::optional<std::string_view> get(std::string_view key) const {
        for (const auto& [k, v] : pairs_) {
            if (k == key) return std::string_view(v);
        }
        return std::nullopt;
    }

    std::uint64_t count_of(std::string_view key) const {
        auto v = get(key);
        if (!v) throw FormatError(FormatDefect::Structure,
                                  "header is missing required key '" + std::string(key) + "'");
        std::uint64_t n = 0;
        if (v->empty()) throw bad_count(key);
        for (char c : *v) {
            if (c < '0' || c > '9') throw bad_count(key);
            n = n * 10 + static_cast<std::uint64_t>(c - '0');
        }
        return n;
    }

    const std::vector<std::pair<std::string, std::string>>& pairs() const noexcept { return pairs_; }

    std::string to_text() const {
        std::string out;
        for (const auto& [k, v] : pairs_) {
            out += k;
            out += '=';
            out += v;
            out += '\n';
        }
        return out;
    }

    static Header from_text(std::string_view text) {
        Header h;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string_view::npos)
                throw FormatError(FormatDefect::Structure, "header line without newline");
            std::string_view line = text.substr(pos, eol - pos);
            std::size_t eq = line.find('=');
            if (eq == std::string_view::npos || eq == 0)
                throw FormatError(FormatDefect::Structure, "malformed header line");
            h.pairs_.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
            pos = eol + 1;
        }
        return h;
    }

private:
    static FormatError bad_count(std::string_view key) {
        return {FormatDefect::Structure, "header key '" + std::string(key) + "' is not a count"};
    }

    std::vector<std::pair<std::string, std::string>> pairs_;
};

// Counts are always recomputed from the built components.
inline Header make_header(std::uint64_t shared, std::uint64_t subject_only,
                          std::uint64_t object_only, std::uint64_t predicates,
                          const BitmapTriples& triples) {
    if (triples.subject_count() != shared + subject_only)
        throw FormatError(FormatDefect::Structure, "subject count disagrees with dictionary");
    Header h;
    h.set(std::string(Header::kFormatVersion), "1");
    h.set(std::string(Header::kTripleCount), std::to_string(triples.triple_count()));
    h.set(std::string(Header::kDistinctSubjects), std::to_string(shared + subject_only));
    h.set(std::string(Header::kDistinctPredicates), std::to_string(predicates));
    h.set(std::string(Header::kDistinctObjects), std::to_string(shared + object_only));
    h.set(std::string(Header::kSharedCount), std::to_string(shared));
    return h;
}

inline Header build_header(const FourSectionDictionary& dict, const BitmapTriples& triples) {
    return make_header(dict.shared().size(), dict.subjects().size(), dict.objects().size(),
                       dict.predicates().size(), triples);
}

}  // namespace hdtx
