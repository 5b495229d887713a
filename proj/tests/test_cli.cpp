#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "nestasp/cli.hpp"
#include "oracles.hpp"

using namespace nestasp;

namespace {

const std::string kCorpus = NESTASP_CORPUS_DIR;

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "nestasp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int status = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string scratch_file(const std::string& name, std::string_view text) {
  auto dir = std::filesystem::temp_directory_path() / ("nestasp_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::ofstream(dir / name) << text;
  return (dir / name).string();
}

}  // namespace

TEST_CASE("example 4") {
  Result r = run_args({kCorpus + "/example4.hex"});
  CHECK(r.status == 0);
  CHECK(r.out == "{ash(0,0), ash(0,1)}\n");
  CHECK(r.err.empty());
}

TEST_CASE("empty program prints the empty answer set") {
  Result r = run_args({scratch_file("empty.hex", "")});
  CHECK(r.status == 0);
  CHECK(r.out == "{}\n");
}

TEST_CASE("no answer sets") {
  Result r = run_args({scratch_file("dead.hex", "p. :- p.")});
  CHECK(r.status == 1);
  CHECK(r.out.empty());
}

TEST_CASE("facts are printed unless suppressed") {
  CHECK(run_args({kCorpus + "/example2.hex"}).out == "{handle(0), p1(x,y), p2(a), p2(b)}\n");
  CHECK(run_args({"--format", "facts", kCorpus + "/example2.hex"}).out == "{handle(0)}\n");
}

TEST_CASE("filter only projects") {
  Result all = run_args({scratch_file("two.hex", "a | b. c.")});
  Result some = run_args({"--filter", "a,zzz", scratch_file("two.hex", "a | b. c.")});
  CHECK(all.out == "{a, c}\n{b, c}\n");
  CHECK(some.out == "{a}\n{}\n");
  CHECK(all.status == some.status);
}

TEST_CASE("answer set limit") {
  Result r = run_args({"-n", "1", scratch_file("three.hex", "a | b | c.")});
  CHECK(r.out == "{a}\n");
  CHECK(r.status == 0);
}

TEST_CASE("json lines") {
  Result r = run_args({"--format", "json-lines", kCorpus + "/example6.hex"});
  CHECK(r.status == 0);
  CHECK(r.out ==
        R"({"edge":[{"args":["a","c"],"sign":0},{"args":["b","a"],"sign":0}],"h":[{"args":[0,0],"sign":0}],)"
        R"("node":[{"args":["a"],"sign":0},{"args":["b"],"sign":0},{"args":["c"],"sign":0}]})"
        "\n");
  Result neg = run_args({"--format", "json-lines", scratch_file("neg.hex", "-q(\"x y\"). p.")});
  CHECK(neg.out == R"({"p":[{"args":[],"sign":0}],"q":[{"args":["\"x y\""],"sign":1}]})"
                   "\n");
}

TEST_CASE("call trace") {
  Result r = run_args({"--trace-calls", kCorpus + "/example3.hex"});
  CHECK(r.out == "{h1(0), h2(0), h3(1)}\n");
  std::string file = std::filesystem::weakly_canonical(kCorpus + "/sub.hex").string();
  CHECK(r.err == "call file handle=0 depth=1 identity=\"" + file + "\"\n"
                 "call embedded handle=1 depth=1 identity=\"a.\\nb.\\n\"\n");
}

TEST_CASE("errors exit with status 2") {
  Result parse = run_args({scratch_file("bad.hex", "a.\nb :- c d.")});
  CHECK(parse.status == 2);
  CHECK(parse.out.empty());
  CHECK(parse.err.find("bad.hex:2:8: error:") != std::string::npos);

  Result missing = run_args({kCorpus + "/does_not_exist.hex"});
  CHECK(missing.status == 2);
  CHECK(missing.err.find("error") != std::string::npos);

  CHECK(run_args({"--bogus", kCorpus + "/example4.hex"}).status == 2);
  CHECK(run_args({"--format", "xml", kCorpus + "/example4.hex"}).status == 2);
  CHECK(run_args({"--max-depth", "0", kCorpus + "/example4.hex"}).status == 2);
  CHECK(run_args({}).status == 2);
  CHECK(run_args({kCorpus + "/loop.hex"}).status == 2);
}

TEST_CASE("depth from flag and environment") {
  std::string chain = scratch_file("chain4.hex", testing::chain_program(4));
  CHECK(run_args({chain}).status == 0);
  CHECK(run_args({"--max-depth", "3", chain}).status == 2);
  ::setenv("NESTASP_MAX_DEPTH", "3", 1);
  CHECK(run_args({chain}).status == 2);
  CHECK(run_args({"--max-depth", "4", chain}).status == 0);
  ::setenv("NESTASP_MAX_DEPTH", "nonsense", 1);
  CHECK(run_args({chain}).status == 2);
  ::unsetenv("NESTASP_MAX_DEPTH");
}

TEST_CASE("output is deterministic with and without parallel solving") {
  for (const char* name : {"example2.hex", "example3.hex", "example4.hex", "example5.hex", "example6.hex", "paths.hex"}) {
    CAPTURE(name);
    Result first = run_args({kCorpus + "/" + name});
    for (int i = 0; i < 3; ++i) CHECK(run_args({kCorpus + "/" + name}).out == first.out);
    CHECK(run_args({"--parallel", kCorpus + "/" + name}).out == first.out);
  }
  std::string branches = scratch_file("branches.hex", "s(a) | s(b) | s(c). r(H) :- &callhex[\"x :- s(b).\", s](H).");
  Result seq = run_args({"--trace-calls", branches});
  Result par = run_args({"--trace-calls", "--parallel", branches});
  CHECK(seq.out == par.out);
  CHECK(seq.err == par.err);
}

TEST_CASE("help") {
  Result r = run_args({"--help"});
  CHECK(r.status == 0);
  CHECK(r.out.find("--max-depth") != std::string::npos);
}
