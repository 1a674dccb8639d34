#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "testutil.hpp"

// End-to-end runs of the installed binary; HDTX_CLI_PATH is injected by the
// build.

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run_cli(const testutil::ScratchDir& scratch, const std::string& args) {
    auto out_path = scratch.file("cli-stdout.txt");
    auto err_path = scratch.file("cli-stderr.txt");
    std::string cmd = std::string(HDTX_CLI_PATH) + " " + args + " > " + out_path.string() +
                      " 2> " + err_path.string();
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, testutil::read_file(out_path), testutil::read_file(err_path)};
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("rdf2hdt then info") {
    testutil::ScratchDir scratch;
    testutil::write_file(scratch.file("rdf1.nt"), testutil::rdf1_text());
    auto r = run_cli(scratch, "rdf2hdt " + scratch.file("rdf1.nt").string() + " " +
                                  scratch.file("rdf1.hdtx").string());
    REQUIRE(r.exit_code == 0);

    auto info = run_cli(scratch, "info " + scratch.file("rdf1.hdtx").string());
    CHECK(info.exit_code == 0);
    CHECK(info.out.find("triple-count=3") != std::string::npos);
    CHECK(info.out.find("shared-count=1") != std::string::npos);
    CHECK(info.out.find("section SO: entries=1") != std::string::npos);
}

TEST_CASE("rdf2hdt on empty input") {
    testutil::ScratchDir scratch;
    testutil::write_file(scratch.file("empty.nt"), "");
    auto r = run_cli(scratch, "rdf2hdt " + scratch.file("empty.nt").string() + " " +
                                  scratch.file("empty.hdtx").string());
    CHECK(r.exit_code == 0);
    auto info = run_cli(scratch, "info " + scratch.file("empty.hdtx").string());
    CHECK(info.out.find("triple-count=0") != std::string::npos);
}

TEST_CASE("rdf2hdt reports the line of a strict parse failure") {
    testutil::ScratchDir scratch;
    testutil::write_file(scratch.file("bad.nt"), "<a> <b> <c> .\nnope\n");
    auto r = run_cli(scratch, "rdf2hdt " + scratch.file("bad.nt").string() + " " +
                                  scratch.file("bad.hdtx").string());
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("line 2") != std::string::npos);
    auto lax = run_cli(scratch, "rdf2hdt --lax " + scratch.file("bad.nt").string() + " " +
                                    scratch.file("bad.hdtx").string());
    CHECK(lax.exit_code == 0);
    CHECK(lax.err.find("skipped 1") != std::string::npos);
}

TEST_CASE("hdt2rdf round trip") {
    testutil::ScratchDir scratch;
    testutil::write_file(scratch.file("rdf2.nt"), testutil::rdf2_text());
    run_cli(scratch, "rdf2hdt " + scratch.file("rdf2.nt").string() + " " +
                         scratch.file("rdf2.hdtx").string());
    auto r = run_cli(scratch, "hdt2rdf " + scratch.file("rdf2.hdtx").string() + " " +
                                  scratch.file("back.nt").string());
    REQUIRE(r.exit_code == 0);
    std::string text = testutil::read_file(scratch.file("back.nt"));
    CHECK(count_lines(text) == 2);
    // Rebuilding the decompressed text reproduces the document bytes.
    run_cli(scratch, "rdf2hdt " + scratch.file("back.nt").string() + " " +
                         scratch.file("again.hdtx").string());
    CHECK(testutil::read_file(scratch.file("again.hdtx")) ==
          testutil::read_file(scratch.file("rdf2.hdtx")));
}

TEST_CASE("cat, verify, and a detected mismatch") {
    testutil::ScratchDir scratch;
    testutil::write_file(scratch.file("a.nt"), testutil::rdf1_text());
    testutil::write_file(scratch.file("b.nt"), testutil::rdf2_text());
    run_cli(scratch, "rdf2hdt " + scratch.file("a.nt").string() + " " +
                         scratch.file("a.hdtx").string());
    run_cli(scratch, "rdf2hdt " + scratch.file("b.nt").string() + " " +
                         scratch.file("b.hdtx").string());

    auto cat = run_cli(scratch, "cat --stats --tmp-dir " + scratch.dir().string() + " " +
                                    scratch.file("a.hdtx").string() + " " +
                                    scratch.file("b.hdtx").string() + " " +
                                    scratch.file("ab.hdtx").string());
    REQUIRE(cat.exit_code == 0);
    CHECK(cat.err.find("triples-out            5") != std::string::npos);
    CHECK(cat.err.find("comparisons=") != std::string::npos);
    CHECK(cat.err.find("wall time") != std::string::npos);

    auto ok = run_cli(scratch, "verify " + scratch.file("a.hdtx").string() + " " +
                                   scratch.file("b.hdtx").string() + " " +
                                   scratch.file("ab.hdtx").string());
    CHECK(ok.exit_code == 0);

    // A wrong "cat" (the first input again) must be flagged with exit 2.
    auto bad = run_cli(scratch, "verify " + scratch.file("a.hdtx").string() + " " +
                                    scratch.file("b.hdtx").string() + " " +
                                    scratch.file("a.hdtx").string());
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("missing from cat output") != std::string::npos);
}

TEST_CASE("search patterns") {
    testutil::ScratchDir scratch;
    testutil::write_file(scratch.file("rdf1.nt"), testutil::rdf1_text());
    run_cli(scratch, "rdf2hdt " + scratch.file("rdf1.nt").string() + " " +
                         scratch.file("rdf1.hdtx").string());
    std::string doc = scratch.file("rdf1.hdtx").string();

    auto by_subject = run_cli(scratch, "search " + doc + " '<so1>' '?' '?'");
    CHECK(by_subject.exit_code == 0);
    CHECK(count_lines(by_subject.out) == 2);

    auto all = run_cli(scratch, "search " + doc + " '?' '?' '?'");
    CHECK(count_lines(all.out) == 3);

    auto by_object = run_cli(scratch, "search " + doc + " '?' '?' '<o2>'");
    CHECK(by_object.out == "<so1> <p1> <o2> .\n");

    auto absent = run_cli(scratch, "search " + doc + " '<nope>' '?' '?'");
    CHECK(absent.exit_code == 0);
    CHECK(absent.out.empty());
}

TEST_CASE("generated graphs are deterministic") {
    testutil::ScratchDir scratch;
    auto r1 = run_cli(scratch, "gen --seed 42 --triples 500 " + scratch.file("g1.nt").string());
    auto r2 = run_cli(scratch, "gen --seed 42 --triples 500 " + scratch.file("g2.nt").string());
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(testutil::read_file(scratch.file("g1.nt")) ==
          testutil::read_file(scratch.file("g2.nt")));
    CHECK(count_lines(testutil::read_file(scratch.file("g1.nt"))) == 500);
}

TEST_CASE("operational errors exit with 1") {
    testutil::ScratchDir scratch;
    auto missing = run_cli(scratch, "info " + scratch.file("missing.hdtx").string());
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.find("hdtx:") != std::string::npos);

    testutil::write_file(scratch.file("junk.hdtx"), "this is not a document");
    auto junk = run_cli(scratch, "info " + scratch.file("junk.hdtx").string());
    CHECK(junk.exit_code == 1);
}

TEST_CASE("commands do not mutate their inputs") {
    testutil::ScratchDir scratch;
    testutil::write_file(scratch.file("a.nt"), testutil::rdf1_text());
    run_cli(scratch, "rdf2hdt " + scratch.file("a.nt").string() + " " +
                         scratch.file("a.hdtx").string());
    std::string before = testutil::read_file(scratch.file("a.hdtx"));
    run_cli(scratch, "cat " + scratch.file("a.hdtx").string() + " " +
                         scratch.file("a.hdtx").string() + " " + scratch.file("aa.hdtx").string());
    run_cli(scratch, "search " + scratch.file("a.hdtx").string() + " '?' '?' '?'");
    CHECK(testutil::read_file(scratch.file("a.hdtx")) == before);
}
