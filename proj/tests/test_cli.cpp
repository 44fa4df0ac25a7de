#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "plantsim/cli.hpp"
#include "plantsim/dataset.hpp"
#include "plantsim/evaluate.hpp"

using namespace plantsim;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string line_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2, help exits 0") {
    CHECK(run({"generate", "--plnts", "5"}).code == 2);
    CHECK(run({"generate", "--preset", "maize"}).code == 2);  // --out missing
    CHECK(run({"frobnicate"}).code == 2);
    const auto h = run({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("generate") != std::string::npos);
    CHECK(run({"generate", "--help"}).code == 0);
  }

  TEST_CASE("runtime errors exit 1 with a message") {
    testutil::TempDir dir("cli_err");
    const auto r = run({"generate", "--preset", "tulip", "--out", dir.path().string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("tulip") != std::string::npos);
    const auto bad = run({"generate", "--preset", "maize", "--out", dir.path().string(), "--set", "nonsense=3"});
    CHECK(bad.code != 0);
  }

  TEST_CASE("generate is reproducible") {
    testutil::TempDir a("cli_a"), b("cli_b");
    const auto ra = run({"generate", "--preset", "maize", "--plants", "2", "--seed", "42", "--resolution", "64", "--out",
                         a.path().string()});
    const auto rb = run({"generate", "--preset", "maize", "--plants", "2", "--seed", "42", "--resolution", "64", "--out",
                         b.path().string()});
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    CHECK(line_value(ra.out, "hash") == line_value(rb.out, "hash"));
    CHECK(line_value(ra.out, "records") != "");
    const auto rc = run({"generate", "--preset", "maize", "--plants", "2", "--seed", "43", "--resolution", "64", "--out",
                         a.path().string() + "_c"});
    CHECK(line_value(rc.out, "hash") != line_value(ra.out, "hash"));
    std::filesystem::remove_all(a.path().string() + "_c");
  }

  TEST_CASE("split, train, predict and evaluate chain") {
    testutil::TempDir dir("cli_chain");
    const auto data = dir / "data";
    REQUIRE(run({"generate", "--preset", "maize", "--plants", "7", "--seed", "5", "--resolution", "48", "--out",
                 data.string()})
                .code == 0);
    const auto manifest = (data / "manifest.csv").string();
    const auto split = (dir / "split.json").string();
    const auto s = run({"split", "--real", manifest, "--units", "2", "--test", "all-remaining", "--seed", "3", "--out", split});
    REQUIRE(s.code == 0);
    CHECK(s.out.rfind("2 real plant (", 0) == 0);
    const auto model = (dir / "model.json").string();
    REQUIRE(run({"train-baseline", "--manifest", manifest, "--split", split, "--out", model}).code == 0);
    const auto pred = (dir / "pred.csv").string();
    REQUIRE(run({"predict-baseline", "--model", model, "--manifest", manifest, "--split", split, "--out", pred}).code == 0);
    const auto json = (dir / "report.json").string();
    const auto hist = (dir / "hist.csv").string();
    const auto e = run({"evaluate", "--pred", pred, "--manifest", manifest, "--split", split, "--json", json, "--hist", hist});
    REQUIRE(e.code == 0);
    CHECK(e.out.find(" (") != std::string::npos);
    CHECK(std::filesystem::exists(json));
    CHECK(std::filesystem::exists(hist));

    const auto preds = metrics::read_predictions(pred);
    const auto sp = dataset::split_from_json([&] {
      std::ifstream in(split);
      return std::string(std::istreambuf_iterator<char>(in), {});
    }());
    CHECK(preds.size() == sp.test.size());

    // the split printed to stdout when --out is omitted
    const auto js = run({"split", "--real", manifest, "--units", "2", "--seed", "3", "--test", "all-remaining"});
    CHECK(js.code == 0);
    CHECK(dataset::split_from_json(js.out).test == sp.test);

    // missing predictions are a runtime error
    std::ofstream(dir / "partial.csv") << "image_id,predicted_count\n" << sp.test[0] << ",1\n";
    const auto miss = run({"evaluate", "--pred", (dir / "partial.csv").string(), "--manifest", manifest, "--split", split});
    CHECK(miss.code == 1);
    CHECK(miss.err.find(sp.test[1]) != std::string::npos);

    const auto cmp = run({"compare-dist", manifest, manifest});
    CHECK(cmp.code == 0);
    CHECK(cmp.out.find("\"distance\":0.0") != std::string::npos);
  }

  TEST_CASE("calibrate prints the best grid point") {
    testutil::TempDir dir("cli_cal");
    const auto patch = (dir / "best.json").string();
    const auto r = run({"calibrate", "--preset", "canola3", "--vigour-mean", "1.0,1.4", "--vigour-sd", "0.3",
                        "--samples", "100", "--threads", "1", "--out", patch});
    REQUIRE(r.code == 0);
    CHECK(line_value(r.out, "vigour_sd") == "0.3");
    CHECK(!line_value(r.out, "distance").empty());
    CHECK(std::filesystem::exists(patch));
    // the patch can be fed back as overrides
    testutil::TempDir gen("cli_cal_gen");
    CHECK(run({"generate", "--preset", "canola3", "--plants", "1", "--resolution", "32", "--overrides", patch, "--out",
               gen.path().string()})
              .code == 0);
    CHECK(run({"calibrate", "--preset", "maize"}).code != 0);
  }
}
