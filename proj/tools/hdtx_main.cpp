// hdtx: build, merge and query compact RDF documents.
//
// Subcommands mirror shell composition: data goes to files or stdout,
// diagnostics to stderr, exit code 0 on success, 1 on operational errors,
// 2 when verify finds a mismatch.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hdtx/hdtx.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMismatch = 2;

long peak_rss_kb() {
    struct rusage ru {};
    if (getrusage(RUSAGE_SELF, &ru) != 0) return -1;
    return ru.ru_maxrss;
}

int run_rdf2hdt(const std::string& in_path, const std::string& out_path,
                std::uint32_t block_size, bool lax, std::uint64_t mem_budget) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) {
        std::cerr << "hdtx: cannot open " << in_path << "\n";
        return kExitError;
    }
    hdtx::BuildConfig config;
    config.block_size = block_size;
    config.parse_mode = lax ? hdtx::ParseMode::Lax : hdtx::ParseMode::Strict;
    config.memory_budget_bytes = mem_budget;
    hdtx::ParseStats stats;
    hdtx::HdtDocument doc = hdtx::build_from_ntriples(in, config, &stats);
    hdtx::write_document_file(doc, out_path);
    if (stats.errors > 0)
        std::cerr << "hdtx: skipped " << stats.errors << " malformed line(s)\n";
    return kExitOk;
}

int run_hdt2rdf(const std::string& in_path, const std::string& out_path) {
    hdtx::HdtDocument doc = hdtx::read_document_file(in_path);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "hdtx: cannot create " << out_path << "\n";
        return kExitError;
    }
    hdtx::write_ntriples(doc, out);
    return kExitOk;
}

int run_cat(const std::string& a, const std::string& b, const std::string& out,
            const std::string& tmp_dir, std::uint32_t block_size, bool stats) {
    hdtx::CatConfig config;
    if (!tmp_dir.empty()) config.tmp_dir = tmp_dir;
    config.block_size = block_size;
    auto t0 = std::chrono::steady_clock::now();
    hdtx::CatStats s = hdtx::hdt_cat(a, b, out, config);
    auto t1 = std::chrono::steady_clock::now();
    if (stats) {
        double secs = std::chrono::duration<double>(t1 - t0).count();
        std::cerr << "triples-out            " << s.triples_out << "\n"
                  << "subjects-out           " << s.subjects_out << "\n"
                  << "common SO1/SO2         " << s.common_so << "\n"
                  << "common S1/S2           " << s.common_s << "\n"
                  << "common O1/O2           " << s.common_o << "\n"
                  << "common P1/P2           " << s.common_p << "\n"
                  << "common SO1/S2          " << s.common_so1_s2 << "\n"
                  << "common S1/SO2          " << s.common_s1_so2 << "\n"
                  << "common SO1/O2          " << s.common_so1_o2 << "\n"
                  << "common O1/SO2          " << s.common_o1_so2 << "\n"
                  << "common S1/O2           " << s.common_s1_o2 << "\n"
                  << "common O1/S2           " << s.common_o1_s2 << "\n"
                  << "peak subject sublist   " << s.peak_sublist << "\n"
                  << "peak resident entries  " << s.peak_resident_entries << "\n";
        for (const auto& m : s.merges)
            std::cerr << "merge " << m.label << ": n=" << m.n_a << " m=" << m.n_b
                      << " comparisons=" << m.comparisons << "\n";
        std::cerr << "wall time              " << secs << " s\n";
        if (long rss = peak_rss_kb(); rss >= 0)
            std::cerr << "peak resident memory   " << rss << " KiB\n";
    }
    return kExitOk;
}

int run_info(const std::string& in_path) {
    hdtx::HdtDocument doc = hdtx::read_document_file(in_path);
    for (const auto& [k, v] : doc.header.pairs()) std::cout << k << "=" << v << "\n";
    auto section = [&](const char* name, const hdtx::DictionarySection& s) {
        std::cout << "section " << name << ": entries=" << s.size()
                  << " payload-bytes=" << s.payload_bytes() << " block-size=" << s.block_size()
                  << "\n";
    };
    section("SO", doc.dictionary.shared());
    section("S", doc.dictionary.subjects());
    section("O", doc.dictionary.objects());
    section("P", doc.dictionary.predicates());
    return kExitOk;
}

int run_search(const std::string& in_path, const std::string& s, const std::string& p,
               const std::string& o) {
    hdtx::HdtDocument doc = hdtx::read_document_file(in_path);
    auto want = [](const std::string& text) -> std::optional<hdtx::Term> {
        if (text == "?") return std::nullopt;
        return hdtx::parse_term(text);
    };
    hdtx::for_each_match(doc, want(s), want(p), want(o), [&](const hdtx::IdTriple& t) {
        std::cout << hdtx::serialize_triple(hdtx::id_triple_to_terms(doc, t)) << "\n";
    });
    return kExitOk;
}

// The baseline the merge must match: decompress both inputs, concatenate,
// rebuild, then compare triple sets and bytes.
int run_verify(const std::string& a_path, const std::string& b_path,
               const std::string& cat_path) {
    hdtx::HdtDocument a = hdtx::read_document_file(a_path);
    hdtx::HdtDocument b = hdtx::read_document_file(b_path);
    hdtx::HdtDocument cat = hdtx::read_document_file(cat_path);

    std::stringstream text;
    hdtx::write_ntriples(a, text);
    hdtx::write_ntriples(b, text);
    hdtx::BuildConfig config;
    config.block_size = cat.dictionary.shared().block_size();
    hdtx::HdtDocument rebuilt = hdtx::build_from_ntriples(text, config);

    std::set<hdtx::IdTriple> expect, got;
    {
        auto c = rebuilt.triples.scan();
        while (c.next()) expect.insert(c.triple());
    }
    {
        auto c = cat.triples.scan();
        while (c.next()) got.insert(c.triple());
    }
    // Compare as term triples: ids agree only when the structures agree.
    std::set<std::string> expect_terms, got_terms;
    {
        auto c = rebuilt.triples.scan();
        while (c.next())
            expect_terms.insert(
                hdtx::serialize_triple(hdtx::id_triple_to_terms(rebuilt, c.triple())));
    }
    {
        auto c = cat.triples.scan();
        while (c.next())
            got_terms.insert(hdtx::serialize_triple(hdtx::id_triple_to_terms(cat, c.triple())));
    }
    if (expect_terms != got_terms) {
        for (const auto& line : expect_terms)
            if (!got_terms.count(line)) {
                std::cerr << "hdtx: triple missing from cat output: " << line << "\n";
                return kExitMismatch;
            }
        for (const auto& line : got_terms)
            if (!expect_terms.count(line)) {
                std::cerr << "hdtx: unexpected triple in cat output: " << line << "\n";
                return kExitMismatch;
            }
    }
    if (expect != got) {
        auto [ei, gi] = std::mismatch(expect.begin(), expect.end(), got.begin(), got.end());
        const hdtx::IdTriple& diff = gi != got.end() ? *gi : *ei;
        const hdtx::HdtDocument& doc = gi != got.end() ? cat : rebuilt;
        std::cerr << "hdtx: first differing triple (id order): "
                  << hdtx::serialize_triple(hdtx::id_triple_to_terms(doc, diff)) << "\n";
        return kExitMismatch;
    }

    std::vector<std::uint8_t> rebuilt_bytes = hdtx::document_bytes(rebuilt);
    auto mapping = hdtx::FileMapping::open(cat_path);
    auto cat_bytes = mapping->bytes();
    if (rebuilt_bytes.size() != cat_bytes.size() ||
        !std::equal(rebuilt_bytes.begin(), rebuilt_bytes.end(), cat_bytes.begin())) {
        std::cerr << "hdtx: triple sets agree but file bytes differ from the rebuild\n";
        return kExitMismatch;
    }
    return kExitOk;
}

int run_gen(const std::string& out_path, std::uint64_t seed, std::uint64_t count,
            std::uint64_t universe, std::uint64_t offset, std::uint64_t predicates) {
    hdtx::GenConfig config;
    config.seed = seed;
    config.triple_count = count;
    config.term_universe = universe;
    config.term_offset = offset;
    config.predicate_count = predicates;
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::cerr << "hdtx: cannot create " << out_path << "\n";
        return kExitError;
    }
    hdtx::write_ntriples(hdtx::generate_graph(config), out);
    out.flush();
    if (!out) {
        std::cerr << "hdtx: write failed on " << out_path << "\n";
        return kExitError;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compact queryable RDF documents: build, merge, query"};
    app.require_subcommand(1);

    std::string in_path, out_path, a_path, b_path, cat_path;
    std::string s_pat = "?", p_pat = "?", o_pat = "?";
    std::string tmp_dir;
    std::uint32_t block_size = hdtx::kDefaultBlockSize;
    bool lax = false, stats = false;
    std::uint64_t mem_budget = 1ull << 30;
    std::uint64_t seed = 1, count = 1000, universe = 0, offset = 0, predicates = 16;

    auto* rdf2hdt = app.add_subcommand("rdf2hdt", "compress N-Triples into a document");
    rdf2hdt->add_option("input", in_path, "N-Triples file")->required();
    rdf2hdt->add_option("output", out_path, "document to write")->required();
    rdf2hdt->add_option("--block-size", block_size, "front-coding block size");
    rdf2hdt->add_flag("--lax", lax, "skip malformed lines instead of aborting");
    rdf2hdt->add_option("--mem-budget", mem_budget, "in-memory build budget in bytes");

    auto* hdt2rdf = app.add_subcommand("hdt2rdf", "decompress a document to N-Triples");
    hdt2rdf->add_option("input", in_path, "document")->required();
    hdt2rdf->add_option("output", out_path, "N-Triples file to write")->required();

    auto* cat = app.add_subcommand("cat", "merge two documents into their union");
    cat->add_option("a", a_path, "first document")->required();
    cat->add_option("b", b_path, "second document")->required();
    cat->add_option("output", out_path, "document to write")->required();
    cat->add_option("--tmp-dir", tmp_dir, "directory for temporary mapping files")
        ->envname("HDTX_TMPDIR");
    cat->add_option("--block-size", block_size, "front-coding block size of the output");
    cat->add_flag("--stats", stats, "print merge statistics to stderr");

    auto* info = app.add_subcommand("info", "print header and section sizes");
    info->add_option("input", in_path, "document")->required();

    auto* search = app.add_subcommand("search", "match a triple pattern ('?' = wildcard)");
    search->add_option("input", in_path, "document")->required();
    search->add_option("s", s_pat, "subject term or ?")->required();
    search->add_option("p", p_pat, "predicate term or ?")->required();
    search->add_option("o", o_pat, "object term or ?")->required();

    auto* verify = app.add_subcommand("verify", "check a cat output against a full rebuild");
    verify->add_option("a", a_path, "first input document")->required();
    verify->add_option("b", b_path, "second input document")->required();
    verify->add_option("cat", cat_path, "merged document to verify")->required();

    auto* gen = app.add_subcommand("gen", "write a deterministic synthetic graph");
    gen->group("");  // harness helper; hidden from --help
    gen->add_option("output", out_path, "N-Triples file to write")->required();
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--triples", count, "number of generated lines");
    gen->add_option("--universe", universe, "resource id space size (0: derived)");
    gen->add_option("--offset", offset, "resource id space offset");
    gen->add_option("--predicates", predicates, "predicate pool size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rdf2hdt->parsed())
            return run_rdf2hdt(in_path, out_path, block_size, lax, mem_budget);
        if (hdt2rdf->parsed()) return run_hdt2rdf(in_path, out_path);
        if (cat->parsed()) return run_cat(a_path, b_path, out_path, tmp_dir, block_size, stats);
        if (info->parsed()) return run_info(in_path);
        if (search->parsed()) return run_search(in_path, s_pat, p_pat, o_pat);
        if (verify->parsed()) return run_verify(a_path, b_path, cat_path);
        if (gen->parsed()) return run_gen(out_path, seed, count, universe, offset, predicates);
    } catch (const std::exception& e) {
        std::cerr << "hdtx: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
