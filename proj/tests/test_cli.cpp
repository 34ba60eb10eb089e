#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eplan/cli.hpp"
#include "eplan/dot.hpp"
#include "eplan/kripke.hpp"

using namespace eplan;
namespace fs = std::filesystem;

namespace {

std::string domain(const char* name) { return std::string(EPLAN_DOMAINS_DIR) + "/" + name; }

struct RunResult {
    int code;
    std::string out;
};

RunResult run_cli(std::vector<std::string> args) {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    int code = cli::run(args);
    std::cout.rdbuf(old);
    return {code, captured.str()};
}

fs::path fresh_dir(const char* tag) {
    fs::path dir = fs::temp_directory_path() / (std::string("eplan_test_") + tag);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("solve prints the plan then the stats block") {
    auto r = run_cli({"solve", "--domain", domain("coin.epddl"), "--problem",
                      domain("coin-p1.epddl"), "--strategy", "bfs"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("open\npeek_a\nplan_found=true\nplan_length=2\n", 0) == 0);
    CHECK(r.out.find("wall_seconds=") != std::string::npos);
}

TEST_CASE("a trivially satisfied goal prints the empty-plan marker") {
    auto r = run_cli({"solve", "--domain", domain("coin.epddl"), "--problem",
                      domain("coin-p2.epddl")});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("<empty>\n", 0) == 0);
}

TEST_CASE("exhausted searches exit with code 1 and report stats") {
    auto r = run_cli({"solve", "--domain", domain("coin.epddl"), "--problem",
                      domain("coin-p3.epddl"), "--max-depth", "6"});
    CHECK(r.code == 1);
    CHECK(r.out.find("plan_found=false") != std::string::npos);
}

TEST_CASE("validate replays plans with a per-step trace") {
    auto ok = run_cli({"validate", "--domain", domain("coin.epddl"), "--problem",
                       domain("coin-p1.epddl"), "--plan", "open peek_a"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("step 1: open executable") != std::string::npos);
    CHECK(ok.out.find("step 2: peek_a executable") != std::string::npos);
    CHECK(ok.out.find("plan valid") != std::string::npos);

    auto bad = run_cli({"validate", "--domain", domain("coin.epddl"), "--problem",
                        domain("coin-p1.epddl"), "--plan", "peek_a open"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("step 1: peek_a NOT executable") != std::string::npos);
}

TEST_CASE("input errors exit with code 2") {
    CHECK(run_cli({"solve", "--domain", "/nonexistent.epddl", "--problem",
                   domain("coin-p1.epddl")})
              .code == 2);
    CHECK(run_cli({"solve", "--nonsense"}).code == 2);
    CHECK(run_cli({"validate", "--domain", domain("coin.epddl"), "--problem",
                   domain("coin-p1.epddl"), "--plan", "fly"})
              .code == 2);
    // custom models need the custom transition
    CHECK(run_cli({"solve", "--domain", domain("custom.epddl"), "--problem",
                   domain("custom-p1.epddl")})
              .code == 2);
    CHECK(run_cli({"solve", "--domain", domain("custom.epddl"), "--problem",
                   domain("custom-p1.epddl"), "--transition", "custom"})
              .code == 0);
}

TEST_CASE("inspect dumps the initial state and its frame") {
    auto r = run_cli({"inspect", "--domain", domain("coin.epddl"), "--problem",
                      domain("coin-p1.epddl")});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("worlds 4 designated", 0) == 0);
    CHECK(r.out.find("frame S5") != std::string::npos);
}

TEST_CASE("solve writes one DOT file per depth along the plan") {
    fs::path dir = fresh_dir("dots");
    auto r = run_cli({"solve", "--domain", domain("coin.epddl"), "--problem",
                      domain("coin-p1.epddl"), "--dot", dir.string()});
    REQUIRE(r.code == 0);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        files.push_back(entry.path().filename().string());
    std::sort(files.begin(), files.end());
    REQUIRE(files.size() == 3);  // depths 0..2
    CHECK(files[0].rfind("depth_0_", 0) == 0);
    CHECK(files[2].rfind("depth_2_", 0) == 0);
    std::ifstream in(dir / files[0]);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(content.str().find("digraph estate {") != std::string::npos);
    CHECK(content.str().find("doublecircle") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("dot output: a singleton world renders as one double-circled node") {
    Vocabulary vocab;
    vocab.add_fluent("f");
    vocab.add_agent("a");
    KripkeStructure m(1, 1);
    m.add_world({true});
    std::string text = emit_dot(make_pointed(std::move(m), 0), vocab);
    CHECK(text == "digraph estate {\n"
                  "  rankdir=LR;\n"
                  "  node [shape=circle];\n"
                  "  w0 [shape=doublecircle, label=\"f\"];\n"
                  "}\n");
}

TEST_CASE("dot output: the coin model shows all four edges of the relation") {
    Vocabulary vocab;
    vocab.add_fluent("f");
    vocab.add_agent("a");
    KripkeStructure m(1, 1);
    m.add_world({true});
    m.add_world({false});
    for (WorldId w = 0; w < 2; ++w)
        for (WorldId t = 0; t < 2; ++t) m.add_edge(0, w, t);
    std::string text = emit_dot(make_pointed(std::move(m), 0), vocab);
    std::size_t edges = 0, pos = 0;
    while ((pos = text.find("->", pos)) != std::string::npos) {
        ++edges;
        pos += 2;
    }
    CHECK(edges == 4);
}

TEST_CASE("dot output is byte-identical for bisimilar states") {
    Vocabulary vocab;
    vocab.add_fluent("f");
    vocab.add_agent("a");
    KripkeStructure m1(1, 1);
    m1.add_world({true});
    m1.add_world({false});
    for (WorldId w = 0; w < 2; ++w)
        for (WorldId t = 0; t < 2; ++t) m1.add_edge(0, w, t);
    // same state with permuted ids and a bisimilar duplicate world
    KripkeStructure m2(1, 1);
    m2.add_world({false});
    m2.add_world({true});
    m2.add_world({true});
    for (WorldId w = 0; w < 3; ++w)
        for (WorldId t = 0; t < 3; ++t) m2.add_edge(0, w, t);
    CHECK(emit_dot(make_pointed(std::move(m1), 0), vocab) ==
          emit_dot(make_pointed(std::move(m2), 1), vocab));
}
