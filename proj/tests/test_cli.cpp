#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "phishpond/study.hpp"
#include "phishpond/text.hpp"
#include "support.hpp"

using testsupport::example;
using testsupport::ScratchDir;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(PHISHPOND_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool has(const Run& r, const std::string& needle) { return r.out.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("cli classify") {
  auto r = cli("classify http://www.msn-verify.com/");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("Phishing\n", 0) == 0);
  CHECK(has(r, "Company name followed by a hyphen usually means, it's a scam website"));
  r = cli("classify https://ibank.barclays.co.uk/");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("Legitimate\n", 0) == 0);
  r = cli("classify localhost");
  CHECK(r.code == 1);
  CHECK(has(r, "MalformedHost"));
}

TEST_CASE("cli play is deterministic") {
  const auto script = (testsupport::data_dir() / "examples" / "perfect_play.txt").string();
  const auto a = cli("play --script " + script + " --seed 1");
  const auto b = cli("play --script " + script + " --seed 1");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(has(a, "status: Completed"));
  CHECK(has(a, "score: 10"));
  const auto other = cli("play --script " + example("help_and_mistakes.txt").string() + " --seed 1");
  CHECK(other.code == 0);
  CHECK(has(other, "helps_used: 2"));
  CHECK(has(other, "time_remaining: 355"));

  ScratchDir dir("cli-play");
  std::ofstream(dir.path() / "bad.txt") << "eat\njump\n";
  const auto bad = cli("play --script " + (dir.path() / "bad.txt").string());
  CHECK(bad.code == 1);
  CHECK(has(bad, "line 2"));
}

TEST_CASE("cli sus") {
  const auto r = cli("sus " + example("sus_responses.csv").string());
  CHECK(r.code == 0);
  CHECK(has(r, "SUS score: 83.625"));
  CHECK(has(r, "Q1,3.95,0.759"));
  CHECK(has(r, "awkward"));
}

TEST_CASE("cli ttest") {
  auto r = cli("ttest " + example("paired_game.csv").string());
  CHECK(r.code == 0);
  CHECK(has(r, "t = -7.973, df = 19"));
  CHECK(has(r, "-35.981"));
  CHECK(has(r, "-21.019"));
  r = cli("ttest " + example("paired_web.csv").string());
  CHECK(has(r, "t = -0.358, df = 19, Sig. (2-tailed) = .725"));
}

TEST_CASE("cli report") {
  const auto r = cli("report " + (testsupport::data_dir() / "demo_study").string());
  CHECK(r.code == 0);
  CHECK(has(r, "Game,20,55.00"));
  CHECK(has(r, "84.00"));
  CHECK(has(r, "29.00"));
  CHECK(has(r, "Pair 2: t = -0.358, df = 19, Sig. (2-tailed) = .725"));
  CHECK(cli("report /nonexistent").code == 1);
}

TEST_CASE("cli corpus validate") {
  auto r = cli("corpus validate " + (testsupport::data_dir() / "corpus.jsonl").string());
  CHECK(r.code == 0);
  CHECK(has(r, "ok: 10 entries (5 Legit, 5 Phish)"));
  r = cli("corpus validate " + example("broken_corpus.jsonl").string());
  CHECK(r.code == 1);
  CHECK(has(r, "ParseError (line 3)"));
}

TEST_CASE("cli usage errors") {
  CHECK(cli("").code != 0);
  CHECK(cli("frobnicate").code != 0);
  CHECK(cli("serve --port 70000").code != 0);
}
