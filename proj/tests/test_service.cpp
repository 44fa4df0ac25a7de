#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

#include "helpers.hpp"
#include "plantsim/dataset.hpp"
#include "plantsim/image.hpp"
#include "plantsim/service.hpp"

using namespace plantsim;
using json = nlohmann::json;

namespace {

// Service on a free port, served from a background thread.
class Running {
 public:
  explicit Running(std::filesystem::path ui = {}) : svc_([&] {
      service::Options o;
      o.port = 0;
      o.ui_dir = std::move(ui);
      return o;
    }()) {
    port_ = svc_.bind();
    thread_ = std::thread([this] { svc_.run(); });
  }
  ~Running() {
    svc_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

 private:
  service::Service svc_;
  int port_ = 0;
  std::thread thread_;
};

httplib::Result post(httplib::Client& c, const std::string& path, const json& body) {
  return c.Post(path, body.dump(), "application/json");
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("health and presets") {
    Running s;
    auto c = s.client();
    auto h = c.Get("/health");
    REQUIRE(h);
    CHECK(h->status == 200);
    CHECK(h->body == "ok");
    auto p = c.Get("/presets");
    REQUIRE(p);
    CHECK(p->status == 200);
    const auto list = json::parse(p->body);
    REQUIRE(list.size() == 6);
    CHECK(list[0]["name"] == "maize");
    bool saw_target = false;
    for (const auto& e : list) saw_target |= !e["target"].empty();
    CHECK(saw_target);
  }

  TEST_CASE("render is deterministic and annotated") {
    Running s;
    auto c = s.client();
    const json body{{"preset", "maize"}, {"day", 20}, {"resolution", 64}, {"seed", 3}};
    auto a = post(c, "/render", body);
    auto b = post(c, "/render", body);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->status == 200);
    CHECK(a->get_header_value("Content-Type") == "image/png");
    CHECK(a->body == b->body);
    const auto img = decode_png(std::vector<std::uint8_t>(a->body.begin(), a->body.end()));
    CHECK(img.width() == 64);
    const auto ann = json::parse(a->get_header_value("X-Annotation"));
    CHECK(ann["task"] == "leaf_count");
    CHECK(ann["count"].get<int>() >= 1);
    CHECK(ann["count"].get<int>() <= ann["leaf_count"].get<int>());

    auto other = post(c, "/render", {{"preset", "maize"}, {"day", 20}, {"resolution", 64}, {"seed", 4}});
    REQUIRE(other);
    CHECK(other->body != a->body);
  }

  TEST_CASE("request validation") {
    Running s;
    auto c = s.client();
    auto unknown = post(c, "/render", {{"preset", "tulip"}});
    REQUIRE(unknown);
    CHECK(unknown->status == 404);
    auto malformed = c.Post("/render", "{not json", "application/json");
    REQUIRE(malformed);
    CHECK(malformed->status == 400);
    CHECK(json::parse(malformed->body).contains("error"));
    auto bad_day = post(c, "/render", {{"preset", "maize"}, {"day", 99}});
    REQUIRE(bad_day);
    CHECK(bad_day->status == 400);
    CHECK(json::parse(bad_day->body)["error"].get<std::string>().find("day") != std::string::npos);
    auto bad_override = post(c, "/render", {{"preset", "maize"}, {"overrides", {{"phyllotaxy", 137.5}}}});
    REQUIRE(bad_override);
    CHECK(bad_override->status == 400);
    // preset files are never reachable through the service
    auto path = post(c, "/render", {{"preset", "/etc/passwd"}});
    REQUIRE(path);
    CHECK(path->status == 404);
  }

  TEST_CASE("simulate-batch") {
    Running s;
    auto c = s.client();
    auto r = post(c, "/simulate-batch", {{"preset", "canola3"}, {"n", 200}, {"seed", 1}});
    REQUIRE(r);
    REQUIRE(r->status == 200);
    const auto j = json::parse(r->body);
    CHECK(j["total"].get<double>() == 200.0);
    double sum = 0;
    for (const auto& [k, v] : j["histogram"].items()) sum += v.get<double>();
    CHECK(sum == 200.0);
    CHECK(j.contains("distance_to_target"));
    CHECK(j["distance_to_target"].get<double>() < 0.3);

    for (int n : {0, 1001}) {
      auto bad = post(c, "/simulate-batch", {{"preset", "canola3"}, {"n", n}});
      REQUIRE(bad);
      CHECK(bad->status == 400);
    }
    auto missing = post(c, "/simulate-batch", {{"preset", "canola3"}});
    REQUIRE(missing);
    CHECK(missing->status == 400);
  }

  TEST_CASE("sessions are isolated") {
    Running s;
    auto c = s.client();
    auto a = c.Put("/session/alice", json{{"preset", "canola3"}, {"overrides", {{"branch_vigour.mean", 0.1}, {"branch_vigour.sd", 0.0}}}}.dump(),
                   "application/json");
    auto b = c.Put("/session/bob", json{{"preset", "canola3"}}.dump(), "application/json");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->status == 200);
    CHECK(b->status == 200);
    auto ga = c.Get("/session/alice");
    REQUIRE(ga);
    CHECK(json::parse(ga->body)["overrides"]["branch_vigour.mean"] == 0.1);
    CHECK(json::parse(c.Get("/session/bob")->body)["overrides"].empty());

    auto ha = json::parse(post(c, "/simulate-batch", {{"session", "alice"}, {"n", 50}})->body);
    auto hb = json::parse(post(c, "/simulate-batch", {{"session", "bob"}, {"n", 50}})->body);
    CHECK(ha["histogram"].size() == 1);  // low vigour: every plant has one branch
    CHECK(ha["histogram"] != hb["histogram"]);

    auto del = c.Delete("/session/alice");
    REQUIRE(del);
    CHECK(del->status == 200);
    CHECK(c.Get("/session/alice")->status == 404);
    CHECK(post(c, "/simulate-batch", {{"session", "alice"}, {"n", 5}})->status == 404);
    CHECK(c.Get("/session/bob")->status == 200);
  }

  TEST_CASE("real distribution") {
    testutil::TempDir dir("svc_real");
    const auto m = testutil::fake_maize_real(2, 3);
    dataset::write_manifest(dir.path(), m);
    Running s;
    auto c = s.client();
    auto r = c.Get("/real-distribution", httplib::Params{{"manifest", (dir / "manifest.csv").string()}},
                   httplib::Headers{});
    REQUIRE(r);
    REQUIRE(r->status == 200);
    const auto j = json::parse(r->body);
    CHECK(j["total"].get<std::size_t>() == m.records.size());
    CHECK(c.Get("/real-distribution")->status == 400);
    CHECK(c.Get("/real-distribution", httplib::Params{{"manifest", "/nonexistent.csv"}}, httplib::Headers{})->status ==
          404);
  }

  TEST_CASE("static UI directory") {
    testutil::TempDir ui("svc_ui");
    std::ofstream(ui / "index.html") << "<html>hello</html>";
    Running s(ui.path());
    auto c = s.client();
    auto r = c.Get("/index.html");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->body.find("hello") != std::string::npos);
  }

  TEST_CASE("concurrent renders agree") {
    Running s;
    const json body{{"preset", "canola2"}, {"resolution", 48}, {"seed", 8}};
    std::vector<std::string> out(4);
    std::vector<std::thread> ts;
    for (int i = 0; i < 4; ++i)
      ts.emplace_back([&, i] {
        auto c = s.client();
        auto r = post(c, "/render", body);
        if (r && r->status == 200) out[static_cast<std::size_t>(i)] = r->body;
      });
    for (auto& t : ts) t.join();
    CHECK(!out[0].empty());
    for (const auto& o : out) CHECK(o == out[0]);
  }
}
