#include "plantsim/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "plantsim/csv.hpp"
#include "plantsim/error.hpp"
#include "plantsim/random.hpp"

#ifndef PLANTSIM_VERSION
#define PLANTSIM_VERSION "0.0.0"
#endif

namespace plantsim::dataset {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* tool_version() { return PLANTSIM_VERSION; }

const char* source_name(Source s) { return s == Source::real ? "real" : "synthetic"; }

const Record* DatasetManifest::find(std::string_view image_id) const {
  for (const auto& r : records)
    if (r.image_id == image_id) return &r;
  return nullptr;
}

namespace {

int to_int(const std::string& s, std::size_t line, const char* column) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError(line, 1, std::string(column) + ": expected an integer, got '" + s + "'");
  return v;
}

Source parse_source(const std::string& s, std::size_t line) {
  if (s == "real") return Source::real;
  if (s == "synthetic") return Source::synthetic;
  throw ParseError(line, 1, "source: expected real or synthetic, got '" + s + "'");
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed: " + p.string());
}

std::string fnv_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Parses rows of a manifest-like table. `required` columns must exist;
// missing optional columns take the defaults in `base`.
DatasetManifest records_from_table(const csv::Table& t, bool require_all, Source forced_source, bool force_source) {
  const std::vector<std::string> required =
      require_all ? std::vector<std::string>(std::begin(kManifestColumns), std::end(kManifestColumns))
                  : std::vector<std::string>{"image_id", "path", "plant_id", "day", "species", "task", "count"};
  for (const auto& c : required)
    if (!t.column(c)) throw ParseError(1, 1, "missing column '" + c + "'");

  auto get = [&](const std::vector<std::string>& row, const char* name) -> const std::string* {
    const auto i = t.column(name);
    return i ? &row[*i] : nullptr;
  };

  DatasetManifest m;
  std::unordered_set<std::string> ids;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    const std::size_t line = t.lines[k];
    Record r;
    r.image_id = *get(row, "image_id");
    if (r.image_id.empty()) throw ParseError(line, 1, "empty image_id");
    if (!ids.insert(r.image_id).second) throw ParseError(line, 1, "duplicate image id '" + r.image_id + "'");
    r.path = *get(row, "path");
    r.plant_id = to_int(*get(row, "plant_id"), line, "plant_id");
    if (const auto* g = get(row, "genotype_id")) r.genotype_id = *g;
    r.day = to_int(*get(row, "day"), line, "day");
    if (const auto* v = get(row, "view")) r.view = *v;
    try {
      r.species = models::parse_species(*get(row, "species"));
      r.task = annotation::parse_task(*get(row, "task"));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line, 1, e.what());
    }
    if (const auto* s = get(row, "source")) {
      r.source = parse_source(*s, line);
      if (force_source && r.source != forced_source)
        throw ParseError(line, 1, std::string("source must be ") + source_name(forced_source));
    }
    if (force_source) r.source = forced_source;
    if (const auto* v = get(row, "variant"); v && !v->empty()) r.variant = to_int(*v, line, "variant");
    r.count = to_int(*get(row, "count"), line, "count");
    if (r.count < 0) throw ParseError(line, 1, "negative count " + std::to_string(r.count) + " for " + r.image_id);
    if (r.day < 0) throw ParseError(line, 1, "negative day");
    m.records.push_back(std::move(r));
  }
  return m;
}

}  // namespace

std::string manifest_to_csv(const DatasetManifest& m) {
  std::string out = csv::row(std::vector<std::string>(std::begin(kManifestColumns), std::end(kManifestColumns)));
  for (const auto& r : m.records) {
    out += csv::row({r.image_id, r.path, std::to_string(r.plant_id), r.genotype_id, std::to_string(r.day), r.view,
                     models::species_name(r.species), source_name(r.source), std::to_string(r.variant),
                     annotation::task_name(r.task), std::to_string(r.count)});
  }
  return out;
}

DatasetManifest manifest_from_csv(std::string_view text) {
  return records_from_table(csv::parse(text), true, Source::real, false);
}

std::string provenance_to_json(const DatasetManifest& m) {
  const auto& p = m.provenance;
  ordered_json j;
  j["seed"] = p.seed;
  j["preset"] = p.preset;
  j["preset_hash"] = p.preset_hash;
  j["tool_version"] = p.tool_version;
  j["n_plants"] = p.n_plants;
  j["resolution"] = p.resolution;
  j["min_pixels"] = p.min_pixels;
  j["max_days_per_plant"] = p.max_days_per_plant;
  j["records"] = m.records.size();
  std::map<std::string, int> summary;
  ordered_json dropped = ordered_json::array();
  for (const auto& d : m.dropped) {
    ++summary[d.reason];
    dropped.push_back({{"plant_id", d.plant_id}, {"day", d.day}, {"reason", d.reason}, {"count", d.count}});
  }
  ordered_json s = ordered_json::object();
  for (const auto& [k, v] : summary) s[k] = v;
  j["dropped_summary"] = s;
  j["dropped"] = dropped;
  return j.dump(2) + "\n";
}

void write_manifest(const fs::path& dir, const DatasetManifest& m) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
  write_text(dir / "manifest.csv", manifest_to_csv(m));
  write_text(dir / "manifest.json", provenance_to_json(m));
}

DatasetManifest read_manifest(const fs::path& csv_path) {
  DatasetManifest m;
  try {
    m = manifest_from_csv(read_text(csv_path));
  } catch (const ParseError& e) {
    throw Error(csv_path.string() + ":" + std::to_string(e.line()) + ": " + e.detail());
  }
  fs::path sidecar = csv_path;
  sidecar.replace_extension(".json");
  if (fs::exists(sidecar)) {
    try {
      const auto j = nlohmann::json::parse(read_text(sidecar));
      auto& p = m.provenance;
      p.seed = j.value("seed", std::uint64_t{0});
      p.preset = j.value("preset", std::string{});
      p.preset_hash = j.value("preset_hash", std::string{});
      p.tool_version = j.value("tool_version", std::string{});
      p.n_plants = j.value("n_plants", 0);
      p.resolution = j.value("resolution", 0);
      p.min_pixels = j.value("min_pixels", 0);
      p.max_days_per_plant = j.value("max_days_per_plant", 0);
      if (j.contains("dropped")) {
        for (const auto& d : j["dropped"])
          m.dropped.push_back({d.value("plant_id", 0), d.value("day", 0), d.value("reason", std::string{}),
                               d.value("count", 0)});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(sidecar.string() + ": " + e.what());
    }
  }
  return m;
}

fs::path image_path(const fs::path& manifest_csv, const Record& r) {
  const fs::path p(r.path);
  if (p.is_absolute()) return p;
  return manifest_csv.parent_path() / p;
}

std::string manifest_hash(const DatasetManifest& m) { return fnv_hex(manifest_to_csv(m)); }

// ---------------------------------------------------------------------------

render::ViewDirection view_direction(const models::PlantModelPreset& preset) {
  return preset.view.kind == models::ViewSpec::Kind::side ? render::ViewDirection::side : render::ViewDirection::top;
}

RenderedDay render_plant_day(const models::PlantModelPreset& preset, const models::PlantInstance& instance, int day,
                             int width, int height) {
  RenderedDay out;
  out.scene = turtle::interpret(instance.day(day), preset.interpret_config());
  out.camera = render::frame_scene(out.scene, view_direction(preset), preset.view.min_extent, width, height);
  out.result = render::render(out.scene, out.camera);
  return out;
}

std::string synthetic_image_id(const models::PlantModelPreset& preset, int plant, int day) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s_v%d_p%04d_d%02d", models::species_name(preset.species), preset.variant, plant,
                day);
  return buf;
}

namespace {

struct PlantOutput {
  std::vector<Record> records;
  std::vector<DroppedDay> dropped;
};

PlantOutput generate_plant(const models::PlantModelPreset& preset, const GenerateOptions& opt, int cap,
                           int min_pixels, int p, const fs::path& out_dir) {
  PlantOutput out;
  const std::uint64_t seed_p = mix64(opt.seed, static_cast<std::uint64_t>(p));
  const models::PlantInstance inst = models::sample_plant(preset, seed_p);
  const annotation::Task task = annotation::task_for(preset.species);
  const int T = inst.timeline();

  std::vector<int> days;
  if (preset.species == models::Species::canola) {
    std::vector<int> flowering;
    for (int d = 1; d <= T; ++d) {
      if (inst.flowering(d)) flowering.push_back(d);
      else out.dropped.push_back({p, d, "not flowering", inst.day_topology(d).branch_count});
    }
    if (cap > 0 && static_cast<int>(flowering.size()) > cap) {
      Rng rng(mix64(seed_p, 2));
      for (int i = 0; i < cap; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.below(flowering.size() - static_cast<std::size_t>(i));
        std::swap(flowering[static_cast<std::size_t>(i)], flowering[j]);
      }
      for (std::size_t i = static_cast<std::size_t>(cap); i < flowering.size(); ++i)
        out.dropped.push_back({p, flowering[i], "over per-plant day cap", inst.day_topology(flowering[i]).branch_count});
      flowering.resize(static_cast<std::size_t>(cap));
      std::sort(flowering.begin(), flowering.end());
    }
    days = std::move(flowering);
  } else {
    for (int d = 1; d <= T; ++d) days.push_back(d);
  }

  for (int d : days) {
    const RenderedDay rd = render_plant_day(preset, inst, d, opt.resolution, opt.resolution);
    const annotation::AnnotationRecord a =
        annotation::annotate(inst, preset.species, d, rd.scene, rd.result.ids, task, min_pixels);
    if (task == annotation::Task::leaf_count && a.count == 0) {
      out.dropped.push_back({p, d, "no visible leaf", 0});
      continue;
    }
    Record r;
    r.image_id = synthetic_image_id(preset, p, d);
    r.path = "images/" + r.image_id + ".png";
    r.plant_id = p;
    r.day = d;
    r.view = preset.view.kind == models::ViewSpec::Kind::side ? "side" : "top";
    r.species = preset.species;
    r.source = Source::synthetic;
    r.variant = preset.variant;
    r.task = task;
    r.count = a.count;
    save_png(out_dir / r.path, rd.result.image);
    if (opt.write_id_buffers) write_file(out_dir / "ids" / (r.image_id + ".png"), encode_png_gray16(rd.result.ids));
    out.records.push_back(std::move(r));
  }
  std::stable_sort(out.dropped.begin(), out.dropped.end(),
                   [](const DroppedDay& a, const DroppedDay& b) { return a.day < b.day; });
  return out;
}

}  // namespace

DatasetManifest generate_dataset(const models::PlantModelPreset& preset, const GenerateOptions& opt,
                                 const fs::path& out_dir) {
  if (opt.n_plants < 1) throw Error("n_plants must be at least 1");
  if (opt.resolution < 16) throw Error("resolution must be at least 16");
  preset.validate();
  const int cap = opt.max_days_per_plant >= 0 ? opt.max_days_per_plant
                                              : (preset.species == models::Species::canola ? 6 : 0);
  const int min_pixels = opt.min_pixels > 0 ? opt.min_pixels
                                            : annotation::default_min_pixels(opt.resolution, opt.resolution);

  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) throw Error("cannot create output directory " + (out_dir / "images").string() + ": " + ec.message());
  if (opt.write_id_buffers) fs::create_directories(out_dir / "ids", ec);
  {
    const fs::path probe = out_dir / ".write_test";
    std::ofstream f(probe);
    if (!f) throw Error("output directory is not writable: " + out_dir.string());
    f.close();
    fs::remove(probe, ec);
  }

  const auto n = static_cast<std::size_t>(opt.n_plants);
  std::vector<PlantOutput> plants(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(n)));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < n; i += workers)
        plants[i] = generate_plant(preset, opt, cap, min_pixels, static_cast<int>(i), out_dir);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  DatasetManifest m;
  for (auto& p : plants) {
    for (auto& r : p.records) m.records.push_back(std::move(r));
    for (auto& d : p.dropped) m.dropped.push_back(std::move(d));
  }
  m.provenance = Provenance{opt.seed, preset.name, models::preset_hash(preset), tool_version(), opt.n_plants,
                            opt.resolution, min_pixels, cap};
  write_manifest(out_dir, m);
  return m;
}

DatasetManifest ingest_real_annotations(const fs::path& csv_path, const fs::path& image_root) {
  DatasetManifest m;
  try {
    m = records_from_table(csv::parse(read_text(csv_path)), false, Source::real, true);
  } catch (const ParseError& e) {
    throw Error(csv_path.string() + ":" + std::to_string(e.line()) + ": " + e.detail());
  }
  for (auto& r : m.records) {
    fs::path p(r.path);
    if (!p.is_absolute()) p = image_root / p;
    r.path = p.string();
    if (!fs::exists(p)) m.warnings.push_back("missing image file for " + r.image_id + ": " + p.string());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Splits

const char* unit_type_name(UnitType u) { return u == UnitType::plant ? "plant" : "genotype"; }
const char* test_policy_name(TestPolicy p) { return p == TestPolicy::fixed_100 ? "fixed-100" : "all-remaining"; }
const char* augmentation_name(Augmentation a) {
  switch (a) {
    case Augmentation::none: return "none";
    case Augmentation::all: return "all";
    case Augmentation::equal_count: return "equal-count";
  }
  return "none";
}

TestPolicy parse_test_policy(std::string_view s) {
  if (s == "fixed-100") return TestPolicy::fixed_100;
  if (s == "all-remaining") return TestPolicy::all_remaining;
  throw Error("unknown test policy '" + std::string(s) + "' (fixed-100 or all-remaining)");
}

Augmentation parse_augmentation(std::string_view s) {
  if (s == "none") return Augmentation::none;
  if (s == "all") return Augmentation::all;
  if (s == "equal-count") return Augmentation::equal_count;
  throw Error("unknown synthetic policy '" + std::string(s) + "' (none, all or equal-count)");
}

std::string ExperimentSplit::row_label() const {
  if (unit == UnitType::plant) {
    if (i_units == 0) return "0 real plant";
    return std::to_string(i_units) + " real plant (" + std::to_string(real_train_images) + ")";
  }
  if (i_units == 0) return "0 real data";
  return std::to_string(i_units) + " genotypes (" + std::to_string(real_train_plants) + ", " +
         std::to_string(real_train_images) + ")";
}

namespace {

template <class T>
void partial_shuffle(std::vector<T>& v, std::size_t k, Rng& rng) {
  k = std::min(k, v.size());
  for (std::size_t i = 0; i < k; ++i) std::swap(v[i], v[i + rng.below(v.size() - i)]);
}

std::string unit_of(const Record& r, UnitType u) {
  return u == UnitType::plant ? std::to_string(r.plant_id) : r.genotype_id;
}

}  // namespace

ExperimentSplit split_experiment(const DatasetManifest& real, const DatasetManifest& synthetic, int i_units,
                                 const SplitPolicy& policy, std::uint64_t seed) {
  if (real.records.empty()) throw Error("real manifest is empty");
  if (i_units < 0) throw Error("number of training units must be nonnegative");
  const models::Species species = real.records.front().species;
  for (const auto& r : real.records)
    if (r.species != species) throw Error("real manifest mixes species");

  ExperimentSplit s;
  s.unit = species == models::Species::maize ? UnitType::plant : UnitType::genotype;
  s.policy = policy;
  s.seed = seed;
  s.i_units = i_units;

  std::set<std::string> unit_set;
  for (const auto& r : real.records) {
    const std::string u = unit_of(r, s.unit);
    if (u.empty()) throw Error("record " + r.image_id + " has no " + unit_type_name(s.unit) + " id");
    unit_set.insert(u);
  }
  std::vector<std::string> units(unit_set.begin(), unit_set.end());
  // numeric plant ids sort numerically
  if (s.unit == UnitType::plant)
    std::sort(units.begin(), units.end(), [](const std::string& a, const std::string& b) {
      return std::stoll(a) < std::stoll(b);
    });
  if (static_cast<std::size_t>(i_units) >= units.size())
    throw Error("cannot train on " + std::to_string(i_units) + " of " + std::to_string(units.size()) + " " +
                unit_type_name(s.unit) + "s and still test");

  Rng rng(mix64(seed, 0));
  std::size_t n_test_units = units.size() - static_cast<std::size_t>(i_units);
  if (s.unit == UnitType::plant) {
    const auto want = static_cast<std::size_t>(std::max(1, policy.maize_test_plants));
    if (n_test_units < want) {
      s.warnings.push_back("only " + std::to_string(n_test_units) + " held-out plants available for testing");
    } else {
      n_test_units = want;
    }
  }
  partial_shuffle(units, static_cast<std::size_t>(i_units) + n_test_units, rng);
  s.train_units.assign(units.begin(), units.begin() + i_units);
  s.test_units.assign(units.begin() + i_units, units.begin() + i_units + static_cast<std::ptrdiff_t>(n_test_units));
  const std::set<std::string> train_u(s.train_units.begin(), s.train_units.end());
  const std::set<std::string> test_u(s.test_units.begin(), s.test_units.end());

  std::vector<std::string> pool;
  std::set<int> train_plants;
  for (const auto& r : real.records) {
    const std::string u = unit_of(r, s.unit);
    if (train_u.count(u)) {
      s.train.push_back(r.image_id);
      train_plants.insert(r.plant_id);
    } else if (test_u.count(u)) {
      pool.push_back(r.image_id);
    }
  }
  s.real_train_images = s.train.size();
  s.real_train_plants = train_plants.size();
  if (pool.empty()) throw Error("test pool is empty");

  if (policy.test == TestPolicy::fixed_100 && pool.size() > policy.test_images) {
    Rng pick(mix64(seed, 1));
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    partial_shuffle(idx, policy.test_images, pick);
    idx.resize(policy.test_images);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i : idx) s.test.push_back(pool[i]);
  } else {
    if (policy.test == TestPolicy::fixed_100 && pool.size() < policy.test_images)
      s.warnings.push_back("test pool has only " + std::to_string(pool.size()) + " images; using all of them");
    s.test = std::move(pool);
  }

  std::unordered_set<std::string> real_ids;
  for (const auto& r : real.records) real_ids.insert(r.image_id);
  std::vector<std::string> syn;
  for (const auto& r : synthetic.records) {
    if (real_ids.count(r.image_id)) throw Error("image id " + r.image_id + " appears in both manifests");
    syn.push_back(r.image_id);
  }
  if (policy.synthetic == Augmentation::all) {
    s.train.insert(s.train.end(), syn.begin(), syn.end());
    s.synthetic_train_images = syn.size();
  } else if (policy.synthetic == Augmentation::equal_count) {
    if (syn.size() < s.real_train_images)
      throw Error("equal-count augmentation needs " + std::to_string(s.real_train_images) +
                  " synthetic images, manifest has " + std::to_string(syn.size()));
    Rng pick(mix64(seed, 2));
    std::vector<std::size_t> idx(syn.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    partial_shuffle(idx, s.real_train_images, pick);
    idx.resize(s.real_train_images);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i : idx) s.train.push_back(syn[i]);
    s.synthetic_train_images = idx.size();
  }
  if (s.train.empty()) throw Error("nothing to train on: no real units and no synthetic images");
  return s;
}

std::string split_to_json(const ExperimentSplit& s) {
  ordered_json j;
  j["row_label"] = s.row_label();
  j["unit"] = unit_type_name(s.unit);
  j["i_units"] = s.i_units;
  j["seed"] = s.seed;
  j["test_policy"] = test_policy_name(s.policy.test);
  j["synthetic"] = augmentation_name(s.policy.synthetic);
  j["maize_test_plants"] = s.policy.maize_test_plants;
  j["test_images"] = s.policy.test_images;
  j["real_train_images"] = s.real_train_images;
  j["real_train_plants"] = s.real_train_plants;
  j["synthetic_train_images"] = s.synthetic_train_images;
  j["train_units"] = s.train_units;
  j["test_units"] = s.test_units;
  j["warnings"] = s.warnings;
  j["train"] = s.train;
  j["test"] = s.test;
  return j.dump(2) + "\n";
}

ExperimentSplit split_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ExperimentSplit s;
    s.unit = j.at("unit").get<std::string>() == "plant" ? UnitType::plant : UnitType::genotype;
    s.i_units = j.at("i_units").get<int>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.policy.test = parse_test_policy(j.value("test_policy", std::string("fixed-100")));
    s.policy.synthetic = parse_augmentation(j.value("synthetic", std::string("none")));
    s.policy.maize_test_plants = j.value("maize_test_plants", 5);
    s.policy.test_images = j.value("test_images", std::size_t{100});
    s.real_train_images = j.value("real_train_images", std::size_t{0});
    s.real_train_plants = j.value("real_train_plants", std::size_t{0});
    s.synthetic_train_images = j.value("synthetic_train_images", std::size_t{0});
    s.train_units = j.value("train_units", std::vector<std::string>{});
    s.test_units = j.value("test_units", std::vector<std::string>{});
    s.warnings = j.value("warnings", std::vector<std::string>{});
    s.train = j.at("train").get<std::vector<std::string>>();
    s.test = j.at("test").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed split file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Augmentation

namespace {

unsigned char clamp_channel(double v) {
  return static_cast<unsigned char>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

RasterImage map_channels(const RasterImage& in, auto f) {
  RasterImage out = in;
  for (auto& b : out.bytes()) b = clamp_channel(f(static_cast<double>(b)));
  return out;
}

}  // namespace

RasterImage augment(const RasterImage& image, std::span<const AugmentOp> ops) {
  RasterImage cur = image;
  for (const auto& op : ops) {
    switch (op.kind) {
      case AugmentOp::Kind::crop: {
        if (op.x < 0 || op.y < 0 || op.width < 1 || op.height < 1 || op.x + op.width > cur.width() ||
            op.y + op.height > cur.height())
          throw Error("crop box out of bounds");
        RasterImage out(op.width, op.height);
        out.set_background(cur.background());
        for (int y = 0; y < op.height; ++y)
          for (int x = 0; x < op.width; ++x) out.set(x, y, cur.at(op.x + x, op.y + y));
        cur = std::move(out);
        break;
      }
      case AugmentOp::Kind::hflip: {
        RasterImage out = cur;
        for (int y = 0; y < cur.height(); ++y)
          for (int x = 0; x < cur.width(); ++x) out.set(cur.width() - 1 - x, y, cur.at(x, y));
        cur = std::move(out);
        break;
      }
      case AugmentOp::Kind::brightness:
        if (op.amount != 0.0) cur = map_channels(cur, [&](double v) { return v + op.amount; });
        break;
      case AugmentOp::Kind::contrast:
        if (!(op.amount >= 0.0)) throw Error("contrast factor must be nonnegative");
        if (op.amount != 1.0) cur = map_channels(cur, [&](double v) { return (v - 128.0) * op.amount + 128.0; });
        break;
    }
  }
  return cur;
}

std::vector<AugmentOp> random_augmentation(int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<AugmentOp> ops;
  const int cw = width - static_cast<int>(rng.below(static_cast<std::uint64_t>(width / 5 + 1)));
  const int ch = height - static_cast<int>(rng.below(static_cast<std::uint64_t>(height / 5 + 1)));
  const int cx = static_cast<int>(rng.below(static_cast<std::uint64_t>(width - cw + 1)));
  const int cy = static_cast<int>(rng.below(static_cast<std::uint64_t>(height - ch + 1)));
  ops.push_back(AugmentOp::crop(cx, cy, cw, ch));
  if (rng.uniform() < 0.5) ops.push_back(AugmentOp::hflip());
  ops.push_back(AugmentOp::brightness(-20.0 + 40.0 * rng.uniform()));
  ops.push_back(AugmentOp::contrast(0.8 + 0.4 * rng.uniform()));
  return ops;
}

}  // namespace plantsim::dataset
