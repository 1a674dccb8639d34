#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hdtx/hdtx.hpp"

namespace testutil {

// Scratch directory under the system tmp dir, removed on destruction.
class ScratchDir {
public:
    ScratchDir() : ws_() {}
    const std::filesystem::path& dir() const { return ws_.dir(); }
    std::filesystem::path file(const std::string& name) const { return ws_.file(name); }

private:
    hdtx::TempWorkspace ws_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::string s = read_file(path);
    return {s.begin(), s.end()};
}

// The two worked-example files used across the suites.
inline std::string rdf1_text() {
    return "<so1> <p1> <o1> .\n"
           "<so1> <p1> <o2> .\n"
           "<s1>  <p2> <so1> .\n";
}

inline std::string rdf2_text() {
    return "<so1> <p3> <o2> .\n"
           "<o2> <p1> <s1> .\n";
}

inline hdtx::HdtDocument build_from_text(const std::string& text,
                                         const hdtx::BuildConfig& config = {}) {
    std::istringstream in(text);
    return hdtx::build_from_ntriples(in, config);
}

inline std::vector<hdtx::TermTriple> parse_all(const std::string& text) {
    std::istringstream in(text);
    hdtx::NtriplesReader reader(in);
    std::vector<hdtx::TermTriple> out;
    while (auto t = reader.next()) out.push_back(std::move(*t));
    return out;
}

inline hdtx::Graph graph_of(const hdtx::HdtDocument& doc) {
    hdtx::Graph g;
    auto c = doc.triples.scan();
    while (c.next()) g.insert(hdtx::id_triple_to_terms(doc, c.triple()));
    return g;
}

inline std::vector<hdtx::IdTriple> decode(const hdtx::HdtDocument& doc) {
    return doc.triples.decode_all();
}

inline std::string ntriples_of(const hdtx::HdtDocument& doc) {
    std::ostringstream out;
    hdtx::write_ntriples(doc, out);
    return out.str();
}

// The oracle the merge is measured against: decompress both, concatenate,
// rebuild from scratch.
inline hdtx::HdtDocument rebuild_oracle(const hdtx::HdtDocument& a, const hdtx::HdtDocument& b,
                                        std::uint32_t block_size = hdtx::kDefaultBlockSize) {
    std::stringstream text;
    hdtx::write_ntriples(a, text);
    hdtx::write_ntriples(b, text);
    hdtx::BuildConfig config;
    config.block_size = block_size;
    return hdtx::build_from_ntriples(text, config);
}

inline std::vector<std::string> section_terms(const hdtx::DictionarySection& sec) {
    std::vector<std::string> out;
    auto c = sec.cursor();
    while (c.next()) out.emplace_back(c.term());
    return out;
}

}  // namespace testutil
