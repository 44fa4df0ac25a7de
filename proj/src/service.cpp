#include "plantsim/service.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "plantsim/annotation.hpp"
#include "plantsim/dataset.hpp"
#include "plantsim/error.hpp"
#include "plantsim/metrics.hpp"

namespace plantsim::service {

using nlohmann::json;

void SessionStore::put(const std::string& name, const std::string& preset, const models::Overrides& overrides) {
  std::lock_guard lock(mu_);
  sessions_[name] = Entry{preset, overrides};
}

bool SessionStore::get(const std::string& name, std::string& preset, models::Overrides& overrides) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(name);
  if (it == sessions_.end()) return false;
  preset = it->second.preset;
  overrides = it->second.overrides;
  return true;
}

bool SessionStore::erase(const std::string& name) {
  std::lock_guard lock(mu_);
  return sessions_.erase(name) > 0;
}

int default_port() {
  if (const char* env = std::getenv("PLANTSIM_PORT")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0 && v < 65536) return static_cast<int>(v);
  }
  return 8080;
}

namespace {

// Client-side problem; maps to 400 (or 404 for unknown resources).
struct RequestError {
  int status;
  std::string message;
};

std::atomic<unsigned> g_error_counter{0};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const RequestError& e) {
  send_json(res, e.status, json{{"error", e.message}});
}

void send_internal(httplib::Response& res, const std::string& what) {
  char id[32];
  std::snprintf(id, sizeof id, "E%06u", ++g_error_counter);
  std::fprintf(stderr, "[%s] %s\n", id, what.c_str());
  send_json(res, 500, json{{"error", what}, {"error_id", id}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw RequestError{400, "body: expected a JSON object"};
    return j;
  } catch (const json::parse_error& e) {
    throw RequestError{400, std::string("body: malformed JSON: ") + e.what()};
  }
}

long long int_field(const json& body, const char* field, long long fallback, long long lo, long long hi) {
  if (!body.contains(field)) return fallback;
  const json& v = body.at(field);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw RequestError{400, std::string("field '") + field + "': expected an integer"};
  const long long x = v.is_number_unsigned() ? static_cast<long long>(v.get<unsigned long long>()) : v.get<long long>();
  if (x < lo || x > hi)
    throw RequestError{400, std::string("field '") + field + "': must be in " + std::to_string(lo) + ".." +
                                std::to_string(hi)};
  return x;
}

std::uint64_t seed_field(const json& body) {
  if (!body.contains("seed")) return 0;
  const json& v = body.at("seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  throw RequestError{400, "field 'seed': expected a nonnegative integer"};
}

models::Overrides overrides_field(const json& body) {
  models::Overrides o;
  if (!body.contains("overrides")) return o;
  const json& v = body.at("overrides");
  if (!v.is_object()) throw RequestError{400, "field 'overrides': expected an object of numbers"};
  for (const auto& [k, x] : v.items()) {
    if (!x.is_number()) throw RequestError{400, "field 'overrides." + k + "': expected a number"};
    o[k] = x.get<double>();
  }
  return o;
}

// Preset named in the body (or the session), with session and request overrides applied.
models::PlantModelPreset resolve_preset(const json& body, const SessionStore& sessions) {
  std::string name;
  models::Overrides overrides;
  if (body.contains("session")) {
    if (!body.at("session").is_string()) throw RequestError{400, "field 'session': expected a string"};
    if (!sessions.get(body.at("session").get<std::string>(), name, overrides))
      throw RequestError{404, "unknown session '" + body.at("session").get<std::string>() + "'"};
  }
  if (body.contains("preset")) {
    if (!body.at("preset").is_string()) throw RequestError{400, "field 'preset': expected a string"};
    name = body.at("preset").get<std::string>();
  }
  if (name.empty()) throw RequestError{400, "field 'preset': required"};
  for (const auto& [k, v] : overrides_field(body)) overrides[k] = v;

  // Only built-in presets are reachable over HTTP, never file paths.
  models::PlantModelPreset preset;
  try {
    (void)models::builtin_preset_text(name);
    preset = models::load_preset(name);
  } catch (const Error&) {
    throw RequestError{404, "unknown preset '" + name + "'"};
  }
  try {
    return models::apply_overrides(preset, overrides);
  } catch (const Error& e) {
    throw RequestError{400, std::string("field 'overrides': ") + e.what()};
  }
}

json histogram_json(const metrics::Histogram& h) {
  json j = json::object();
  for (const auto& [k, v] : h) j[std::to_string(k)] = v;
  return j;
}

json preset_json(const models::PlantModelPreset& p) {
  json params = json::array();
  for (const auto& sp : p.params) {
    json e{{"name", sp.name}, {"mean", sp.mean}, {"sd", sp.sd}};
    if (sp.lower > -1e299) e["lower"] = sp.lower;
    if (sp.upper < 1e299) e["upper"] = sp.upper;
    params.push_back(e);
  }
  json constants = json::object();
  for (const auto& c : p.model.constants) constants[c.name] = c.value;
  return json{{"name", p.name},
              {"species", models::species_name(p.species)},
              {"variant", p.variant},
              {"timeline", p.timeline_days},
              {"params", params},
              {"constants", constants},
              {"target", histogram_json(p.target_histogram)},
              {"notes", p.notes},
              {"hash", models::preset_hash(p)}};
}

template <class Fn>
void guarded(httplib::Response& res, Fn fn) {
  try {
    fn();
  } catch (const RequestError& e) {
    send_error(res, e);
  } catch (const std::exception& e) {
    send_internal(res, e.what());
  }
}

}  // namespace

Service::Service(Options options) : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;

  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });

  srv.Get("/presets", [](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      json list = json::array();
      for (const auto& n : models::builtin_preset_names()) list.push_back(preset_json(models::load_preset(n)));
      send_json(res, 200, list);
    });
  });

  srv.Post("/render", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const models::PlantModelPreset preset = resolve_preset(body, sessions_);
      const int day = static_cast<int>(int_field(body, "day", preset.timeline_days, 1, preset.timeline_days));
      const int resolution = static_cast<int>(int_field(body, "resolution", 256, 16, 1024));
      const std::uint64_t seed = seed_field(body);
      std::vector<std::uint8_t> png;
      json ann;
      try {
        const auto inst = models::sample_plant(preset, seed);
        const auto rd = dataset::render_plant_day(preset, inst, day, resolution, resolution);
        const auto task = annotation::task_for(preset.species);
        const auto rec = annotation::annotate(inst, preset.species, day, rd.scene, rd.result.ids, task,
                                              annotation::default_min_pixels(resolution, resolution));
        png = encode_png(rd.result.image);
        const auto& topo = inst.day_topology(day);
        json sampled = json::object();
        for (const auto& [k, v] : inst.sampled) sampled[k] = v;
        ann = json{{"preset", preset.name},
                   {"species", models::species_name(preset.species)},
                   {"day", day},
                   {"seed", seed},
                   {"task", annotation::task_name(task)},
                   {"count", rec.count},
                   {"leaf_count", topo.leaf_count},
                   {"branch_count", topo.branch_count},
                   {"open_flowers", topo.open_flowers},
                   {"flowering", topo.open_flowers > 0},
                   {"sampled", sampled}};
      } catch (const std::exception& e) {
        send_internal(res, std::string("render failed: ") + e.what());
        return;
      }
      res.status = 200;
      res.set_header("X-Annotation", ann.dump());
      res.set_content(std::string(png.begin(), png.end()), "image/png");
    });
  });

  srv.Post("/simulate-batch", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const models::PlantModelPreset preset = resolve_preset(body, sessions_);
      if (!body.contains("n")) throw RequestError{400, "field 'n': required"};
      const auto n = static_cast<std::size_t>(int_field(body, "n", 0, 1, kMaxBatch));
      const std::uint64_t seed = seed_field(body);
      const auto h = models::simulate_branch_histogram(preset, n, seed, 1);
      double total = 0.0;
      for (const auto& [k, v] : h) total += v;
      json out{{"preset", preset.name}, {"n", n}, {"seed", seed}, {"histogram", histogram_json(h)}, {"total", total}};
      if (!preset.target_histogram.empty()) {
        out["target"] = histogram_json(preset.target_histogram);
        out["distance_to_target"] = metrics::histogram_distance(h, preset.target_histogram);
      }
      send_json(res, 200, out);
    });
  });

  srv.Get("/real-distribution", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      if (!req.has_param("manifest")) throw RequestError{400, "query 'manifest': required"};
      const std::filesystem::path path = req.get_param_value("manifest");
      if (!std::filesystem::exists(path)) throw RequestError{404, "manifest not found: " + path.string()};
      dataset::DatasetManifest m;
      try {
        m = dataset::read_manifest(path);
      } catch (const Error& e) {
        throw RequestError{400, e.what()};
      }
      metrics::Histogram h;
      for (const auto& r : m.records) h[r.count] += 1.0;
      send_json(res, 200, json{{"manifest", path.string()}, {"histogram", histogram_json(h)},
                               {"total", m.records.size()}});
    });
  });

  srv.Put(R"(/session/([A-Za-z0-9_\-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const std::string name = req.matches[1];
      // resolve once to validate preset and overrides before storing
      const models::PlantModelPreset preset = resolve_preset(body, sessions_);
      sessions_.put(name, preset.name, overrides_field(body));
      send_json(res, 200, json{{"session", name}, {"preset", preset.name}});
    });
  });

  srv.Get(R"(/session/([A-Za-z0-9_\-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string preset;
      models::Overrides o;
      if (!sessions_.get(req.matches[1], preset, o)) throw RequestError{404, "unknown session"};
      json ov = json::object();
      for (const auto& [k, v] : o) ov[k] = v;
      send_json(res, 200, json{{"session", std::string(req.matches[1])}, {"preset", preset}, {"overrides", ov}});
    });
  });

  srv.Delete(R"(/session/([A-Za-z0-9_\-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      if (!sessions_.erase(req.matches[1])) throw RequestError{404, "unknown session"};
      send_json(res, 200, json{{"deleted", std::string(req.matches[1])}});
    });
  });

  if (!options_.ui_dir.empty() && std::filesystem::is_directory(options_.ui_dir))
    srv.set_mount_point("/", options_.ui_dir.string());
}

Service::~Service() { stop(); }

int Service::bind() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else {
    port_ = server_->bind_to_port(options_.host, options_.port) ? options_.port : -1;
  }
  if (port_ <= 0) throw Error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  return port_;
}

void Service::run() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

}  // namespace plantsim::service
