#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "hardneg/bundle.hpp"
#include "hardneg/cli.hpp"
#include "support.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = hardneg::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("generate with the fallback backend") {
    testing::TempDir dir("cli-gen");
    testing::write_file(dir.file("captions.jsonl"),
                        "\"The chef cooks a meal.\"\n{\"id\": \"c2\", \"text\": \"The old man pushes the box.\"}\n");
    const Result r = run({"generate", "--in", dir.file("captions.jsonl"), "--components", "verb,object", "--backend",
                          "fallback", "--out", dir.file("bundles.jsonl")});
    CHECK(r.code == hardneg::cli::kExitOk);
    const auto bundles = hardneg::load_bundles(dir.file("bundles.jsonl"));
    REQUIRE(bundles.size() == 2);
    CHECK(bundles[0].negatives.at(hardneg::ComponentKind::Verb) == "The chef burns a meal.");
    CHECK(bundles[1].id == "c2");
    CHECK(bundles[1].negatives.size() == 2);

    // Same argv and inputs give the same bytes.
    const std::string first = testing::read_file(dir.file("bundles.jsonl"));
    const Result again = run({"generate", "--in", dir.file("captions.jsonl"), "--components", "verb,object",
                              "--backend", "fallback", "--out", dir.file("bundles.jsonl")});
    CHECK(again.code == 0);
    CHECK(again.out == r.out);
    CHECK(testing::read_file(dir.file("bundles.jsonl")) == first);

    const Result v = run({"validate", "--in", dir.file("bundles.jsonl"), "--dim", "16"});
    CHECK(v.code == 0);
    CHECK(std::count(v.out.begin(), v.out.end(), '\n') == 2);
    CHECK(nlohmann::json::parse(v.out.substr(0, v.out.find('\n'))).contains("hard"));

    const Result imp = run({"importance", "--in", dir.file("bundles.jsonl")});
    CHECK(imp.code == 0);
    const auto line = nlohmann::json::parse(imp.out.substr(0, imp.out.find('\n')));
    CHECK(line["omega"].size() == 2);
  }

  TEST_CASE("usage errors exit 2 with a synopsis") {
    const Result unknown = run({"frobnicate"});
    CHECK(unknown.code == hardneg::cli::kExitUsage);
    CHECK(run({}).code == hardneg::cli::kExitUsage);
    const Result tau = run({"simscore", "--a", "x", "--b", "x", "--tau", "-1"});
    CHECK(tau.code == 2);
    CHECK(tau.err.find("--tau") != std::string::npos);
    CHECK(run({"simscore", "--a", "x", "--b", "x", "--bogus"}).code == 2);
    CHECK(run({"generate", "--in", "a", "--out", "b", "--backend", "llm"}).code == 2);
    CHECK(run({"generate", "--in", "a", "--out", "b", "--no-fallback"}).code == 2);
    CHECK(run({"generate", "--in", "a", "--out", "b", "--parallelism", "0"}).code == 2);
    CHECK(run({"train", "--out-dir", "/tmp/x", "--lambda", "-2"}).code == 2);
  }

  TEST_CASE("help exits 0") {
    const Result h = run({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("simscore") != std::string::npos);
  }

  TEST_CASE("simscore self-similarity") {
    const Result r = run({"simscore", "--a", "x", "--b", "x", "--tau", "0.07", "--backend", "toy-encoder"});
    CHECK(r.code == 0);
    CHECK(r.out == "1.0\n");
  }

  TEST_CASE("domain errors exit 1") {
    testing::TempDir dir("cli-err");
    CHECK(run({"generate", "--in", dir.file("missing.jsonl"), "--out", dir.file("o.jsonl")}).code ==
          hardneg::cli::kExitDomain);
    CHECK(run({"eval", "--checkpoint", dir.file("missing.ckpt")}).code == 1);
    testing::write_file(dir.file("bad.conf"), "colour = red\n");
    CHECK(run({"train", "--config", dir.file("bad.conf"), "--out-dir", dir.path()}).code == 1);
  }

  TEST_CASE("train, eval and shift-report") {
    testing::TempDir dir("cli-train");
    testing::write_file(dir.file("run.conf"), "mode = simple_cl\nepochs = 50\nn = 12\nbatch-size = 6\n");
    const std::vector<std::string> argv{"train", "--config", dir.file("run.conf"), "--epochs", "2",
                                        "--out-dir", dir.file("a")};
    const Result t = run(argv);
    REQUIRE(t.code == 0);
    // The flag overrides the config file.
    const std::string losses = testing::read_file(dir.file("a/losses.jsonl"));
    CHECK(std::count(losses.begin(), losses.end(), '\n') == 4);
    const auto metrics = nlohmann::json::parse(testing::read_file(dir.file("a/metrics.json")));
    CHECK(metrics["mode"] == "simple_cl");
    CHECK(metrics.contains("R@1_v2t"));

    auto again = argv;
    again.back() = dir.file("b");
    CHECK(run(again).out == t.out);
    CHECK(testing::read_file(dir.file("a/losses.jsonl")) == testing::read_file(dir.file("b/losses.jsonl")));
    CHECK(testing::read_file(dir.file("a/metrics.json")) == testing::read_file(dir.file("b/metrics.json")));
    CHECK(testing::read_file(dir.file("a/final.ckpt")) == testing::read_file(dir.file("b/final.ckpt")));

    const Result e = run({"eval", "--checkpoint", dir.file("a/final.ckpt")});
    CHECK(e.code == 0);
    CHECK(nlohmann::json::parse(e.out)["R@1_v2t"] == metrics["R@1_v2t"]);
    CHECK(run({"eval", "--checkpoint", dir.file("a/final.ckpt"), "--n", "3"}).code == 0);

    const Result s = run({"shift-report", "--before", dir.file("a/initial.ckpt"), "--after", dir.file("a/final.ckpt"),
                          "--summary", dir.file("sum.json"), "--bins", "5"});
    CHECK(s.code == 0);
    CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 25);
    CHECK(nlohmann::json::parse(testing::read_file(dir.file("sum.json"))).is_object());
  }
}
