#include "plantsim/plant_models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "plantsim/error.hpp"
#include "plantsim/metrics.hpp"
#include "plantsim/random.hpp"
#include "preset_data.hpp"

namespace plantsim::models {

const char* species_name(Species s) { return s == Species::maize ? "maize" : "canola"; }

Species parse_species(std::string_view name) {
  if (name == "maize") return Species::maize;
  if (name == "canola") return Species::canola;
  throw Error("unknown species '" + std::string(name) + "'");
}

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

double parse_double(const std::string& w, int line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc() || p != w.data() + w.size() || !std::isfinite(v))
    throw ParseError(line, 1, "expected a number, got '" + w + "'");
  return v;
}

int parse_int(const std::string& w, int line) {
  const double v = parse_double(w, line);
  if (v != std::floor(v) || std::fabs(v) > 1e9) throw ParseError(line, 1, "expected an integer, got '" + w + "'");
  return static_cast<int>(v);
}

unsigned char parse_channel(const std::string& w, int line) {
  const int v = parse_int(w, line);
  if (v < 0 || v > 255) throw ParseError(line, 1, "colour channel out of range: " + w);
  return static_cast<unsigned char>(v);
}

constexpr std::string_view kHeaderKeys[] = {"species", "variant", "timeline", "param",
                                            "target",  "view",    "material", "note"};

bool is_header_key(std::string_view k) {
  return std::find(std::begin(kHeaderKeys), std::end(kHeaderKeys), k) != std::end(kHeaderKeys);
}

// Returns the keyword of a "keyword: rest" line, or empty.
std::string_view line_keyword(std::string_view line, std::string_view& rest) {
  const std::string_view t = trim(line);
  std::size_t i = 0;
  if (t.empty() || !(std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '_')) return {};
  while (i < t.size() && (std::isalnum(static_cast<unsigned char>(t[i])) || t[i] == '_')) ++i;
  std::size_t j = i;
  while (j < t.size() && (t[j] == ' ' || t[j] == '\t')) ++j;
  if (j >= t.size() || t[j] != ':') return {};
  rest = trim(t.substr(j + 1));
  return t.substr(0, i);
}

turtle::Material parse_material(const std::vector<std::string>& w, std::size_t at, int line) {
  if (at >= w.size()) throw ParseError(line, 1, "material kind missing");
  const std::string& kind = w[at];
  auto rgb = [&](std::size_t i) {
    if (i + 2 >= w.size()) throw ParseError(line, 1, "material colour needs r g b");
    return Rgb{parse_channel(w[i], line), parse_channel(w[i + 1], line), parse_channel(w[i + 2], line)};
  };
  if (kind == "flat") {
    if (w.size() != at + 4) throw ParseError(line, 1, "flat material takes r g b");
    return turtle::Material::flat_color(rgb(at + 1));
  }
  if (kind == "midvein") {
    if (w.size() != at + 7) throw ParseError(line, 1, "midvein material takes r g b r g b");
    turtle::Material m;
    m.kind = turtle::Material::Kind::midvein;
    m.color = rgb(at + 1);
    m.vein = rgb(at + 4);
    return m;
  }
  if (kind == "texture") {
    if (w.size() != at + 2) throw ParseError(line, 1, "texture material takes a texture name");
    turtle::Material m;
    m.kind = turtle::Material::Kind::texture;
    m.texture = w[at + 1];
    return m;
  }
  throw ParseError(line, 1, "unknown material kind '" + kind + "'");
}

std::string material_text(const turtle::Material& m) {
  auto rgb = [](Rgb c) {
    return std::to_string(c.r) + " " + std::to_string(c.g) + " " + std::to_string(c.b);
  };
  switch (m.kind) {
    case turtle::Material::Kind::flat: return "flat " + rgb(m.color);
    case turtle::Material::Kind::midvein: return "midvein " + rgb(m.color) + " " + rgb(m.vein);
    case turtle::Material::Kind::texture: return "texture " + m.texture;
  }
  return {};
}

// Slot "leaf3" -> ("leaf", 3); "stem" -> ("stem", -1).
std::pair<std::string, int> split_slot(const std::string& slot, int line) {
  std::size_t i = slot.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(slot[i - 1]))) --i;
  if (i == slot.size()) return {slot, -1};
  return {slot.substr(0, i), parse_int(slot.substr(i), line)};
}

void set_indexed(std::vector<turtle::Material>& v, std::vector<bool>& seen, int index,
                 turtle::Material m, int line) {
  if (index < 0 || index > 255) throw ParseError(line, 1, "material slot index out of range");
  const auto i = static_cast<std::size_t>(index);
  if (!seen.empty() && seen.size() > i && seen[i]) throw ParseError(line, 1, "duplicate material slot");
  if (seen.size() <= i) seen.resize(i + 1, false);
  if (v.size() <= i) v.resize(i + 1);
  v[i] = std::move(m);
  seen[i] = true;
}

}  // namespace

// ---------------------------------------------------------------------------

const StochasticParam* PlantModelPreset::param(std::string_view n) const {
  for (const auto& p : params)
    if (p.name == n) return &p;
  return nullptr;
}

StochasticParam* PlantModelPreset::param(std::string_view n) {
  for (auto& p : params)
    if (p.name == n) return &p;
  return nullptr;
}

double PlantModelPreset::growth_stretch() const {
  double s = 0.0;
  for (const auto& g : model.growth)
    if (g.name != "leafwidth") s = std::max(s, g.stretch);
  return s > 0.0 ? s : 1.0;
}

turtle::InterpretConfig PlantModelPreset::interpret_config() const {
  turtle::InterpretConfig c;
  c.stem_material = stem_material;
  c.leaf_materials = leaf_materials;
  c.petal_materials = petal_materials;
  c.flower_center = flower_center;
  if (const auto* w = model.growth_function("leafwidth")) c.leaf_width = *w;
  return c;
}

void PlantModelPreset::validate() const {
  const std::string where = "preset '" + name + "': ";
  if (timeline_days < 1) throw Error(where + "timeline must be at least 1 day");
  if (species == Species::maize && variant != 1) throw Error(where + "maize has a single variant");
  if (species == Species::canola && (variant < 1 || variant > 5))
    throw Error(where + "canola variant must be 1..5");
  if (species == Species::maize) {
    if (!model.constant_index("phyllotaxy")) throw Error(where + "maize preset must declare phyllotaxy");
    if (phyllotaxy() != 180.0) throw Error(where + "maize phyllotaxy must be 180 degrees");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (!model.constant_index(p.name))
      throw Error(where + "stochastic parameter '" + p.name + "' is not a model constant");
    if (!(p.sd >= 0.0) || !std::isfinite(p.sd)) throw Error(where + "parameter '" + p.name + "' has negative sd");
    if (!std::isfinite(p.mean)) throw Error(where + "parameter '" + p.name + "' has non-finite mean");
    if (!(p.lower <= p.upper)) throw Error(where + "parameter '" + p.name + "' has empty bounds");
    for (std::size_t j = 0; j < i; ++j)
      if (params[j].name == p.name) throw Error(where + "duplicate parameter '" + p.name + "'");
  }
  for (const auto& [k, v] : target_histogram)
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(where + "target histogram has a negative frequency");
  if (!(view.min_extent > 0.0)) throw Error(where + "view extent must be positive");
  if (leaf_materials.empty() || petal_materials.empty()) throw Error(where + "material lists cannot be empty");
  auto check_texture = [&](const turtle::Material& m) {
    if (m.kind == turtle::Material::Kind::texture) render::builtin_texture(m.texture);
  };
  check_texture(stem_material);
  check_texture(flower_center);
  for (const auto& m : leaf_materials) check_texture(m);
  for (const auto& m : petal_materials) check_texture(m);
  for (const auto& g : model.growth) g.validate();
}

PlantModelPreset parse_preset(std::string_view text, std::string name) {
  PlantModelPreset p;
  p.name = std::move(name);
  std::string body;
  body.reserve(text.size());
  bool have_species = false, have_timeline = false;
  std::vector<bool> leaf_seen, petal_seen;
  std::vector<turtle::Material> leaves, petals;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    std::string_view rest;
    const std::string_view key = line_keyword(line, rest);
    if (!key.empty() && is_header_key(key)) {
      const auto w = words(rest);
      auto need = [&](std::size_t n) {
        if (w.size() != n) throw ParseError(line_no, 1, std::string(key) + ": wrong number of fields");
      };
      if (key == "species") {
        need(1);
        try {
          p.species = parse_species(w[0]);
        } catch (const Error& e) {
          throw ParseError(line_no, 1, e.what());
        }
        have_species = true;
      } else if (key == "variant") {
        need(1);
        p.variant = parse_int(w[0], line_no);
      } else if (key == "timeline") {
        need(1);
        p.timeline_days = parse_int(w[0], line_no);
        have_timeline = true;
      } else if (key == "param") {
        if (!(w.size() == 5 || w.size() == 8) || w[1] != "mean" || w[3] != "sd" ||
            (w.size() == 8 && w[5] != "bounds"))
          throw ParseError(line_no, 1, "param: expected 'name mean X sd Y [bounds LO HI]'");
        StochasticParam sp;
        sp.name = w[0];
        sp.mean = parse_double(w[2], line_no);
        sp.sd = parse_double(w[4], line_no);
        if (w.size() == 8) {
          sp.lower = parse_double(w[6], line_no);
          sp.upper = parse_double(w[7], line_no);
        }
        p.params.push_back(std::move(sp));
      } else if (key == "target") {
        for (const auto& item : w) {
          const auto colon = item.find(':');
          if (colon == std::string::npos) throw ParseError(line_no, 1, "target: expected count:frequency");
          const int k = parse_int(item.substr(0, colon), line_no);
          if (p.target_histogram.count(k)) throw ParseError(line_no, 1, "target: duplicate bin");
          p.target_histogram[k] = parse_double(item.substr(colon + 1), line_no);
        }
      } else if (key == "view") {
        need(2);
        if (w[0] == "side") p.view.kind = ViewSpec::Kind::side;
        else if (w[0] == "top") p.view.kind = ViewSpec::Kind::top;
        else throw ParseError(line_no, 1, "view: expected side or top");
        p.view.min_extent = parse_double(w[1], line_no);
      } else if (key == "material") {
        if (w.empty()) throw ParseError(line_no, 1, "material: slot missing");
        auto m = parse_material(w, 1, line_no);
        const auto [slot, index] = split_slot(w[0], line_no);
        if (slot == "stem" && index < 0) p.stem_material = m;
        else if (slot == "center" && index < 0) p.flower_center = m;
        else if (slot == "leaf" && index >= 0) set_indexed(leaves, leaf_seen, index, m, line_no);
        else if (slot == "petal" && index >= 0) set_indexed(petals, petal_seen, index, m, line_no);
        else throw ParseError(line_no, 1, "unknown material slot '" + w[0] + "'");
      } else {
        p.notes.emplace_back(rest);
      }
      // keep line numbering intact for the model parser
    } else {
      body.append(line);
    }
    body.push_back('\n');
    if (end == text.size()) break;
    pos = end + 1;
  }
  auto contiguous = [](const std::vector<bool>& seen) {
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  if (!contiguous(leaf_seen) || !contiguous(petal_seen))
    throw Error("material slots must be numbered contiguously from 0");
  if (!leaves.empty()) p.leaf_materials = std::move(leaves);
  if (!petals.empty()) p.petal_materials = std::move(petals);
  if (!have_species) throw Error("preset is missing 'species:'");
  if (!have_timeline) throw Error("preset is missing 'timeline:'");
  p.model = lsys::parse_model(body);
  p.validate();
  return p;
}

std::string serialize_preset(const PlantModelPreset& p) {
  std::string out;
  out += "species: " + std::string(species_name(p.species)) + "\n";
  out += "variant: " + std::to_string(p.variant) + "\n";
  out += "timeline: " + std::to_string(p.timeline_days) + "\n";
  out += std::string("view: ") + (p.view.kind == ViewSpec::Kind::side ? "side " : "top ") + num(p.view.min_extent) + "\n";
  for (const auto& sp : p.params) {
    out += "param: " + sp.name + " mean " + num(sp.mean) + " sd " + num(sp.sd);
    if (sp.lower != StochasticParam{}.lower || sp.upper != StochasticParam{}.upper)
      out += " bounds " + num(sp.lower) + " " + num(sp.upper);
    out += "\n";
  }
  if (!p.target_histogram.empty()) {
    out += "target:";
    for (const auto& [k, v] : p.target_histogram) out += " " + std::to_string(k) + ":" + num(v);
    out += "\n";
  }
  out += "material: stem " + material_text(p.stem_material) + "\n";
  out += "material: center " + material_text(p.flower_center) + "\n";
  for (std::size_t i = 0; i < p.leaf_materials.size(); ++i)
    out += "material: leaf" + std::to_string(i) + " " + material_text(p.leaf_materials[i]) + "\n";
  for (std::size_t i = 0; i < p.petal_materials.size(); ++i)
    out += "material: petal" + std::to_string(i) + " " + material_text(p.petal_materials[i]) + "\n";
  for (const auto& n : p.notes) out += "note: " + n + "\n";
  out += lsys::serialize_model(p.model);
  return out;
}

std::string preset_hash(const PlantModelPreset& preset) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : serialize_preset(preset)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

std::string file_for(std::string_view name) {
  if (name == "maize") return "maize.lsys";
  std::string_view v;
  if (name.starts_with("canola_v")) v = name.substr(8);
  else if (name.starts_with("canola")) v = name.substr(6);
  else return {};
  if (v.size() == 1 && v[0] >= '1' && v[0] <= '5') return "canola_v" + std::string(v) + ".lsys";
  return {};
}

std::string canonical_name(const std::string& file) {
  if (file == "maize.lsys") return "maize";
  return "canola" + file.substr(8, 1);
}

}  // namespace

std::vector<std::string> builtin_preset_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < detail::kPresetFileCount; ++i)
    names.push_back(canonical_name(std::string(detail::kPresetFiles[i].name)));
  return names;
}

std::string builtin_preset_text(std::string_view name) {
  const std::string file = file_for(name);
  for (std::size_t i = 0; i < detail::kPresetFileCount; ++i)
    if (detail::kPresetFiles[i].name == file) return std::string(detail::kPresetFiles[i].text);
  throw Error("unknown preset '" + std::string(name) + "'");
}

PlantModelPreset load_preset(std::string_view name_or_path) {
  const std::string file = file_for(name_or_path);
  if (!file.empty()) return parse_preset(builtin_preset_text(name_or_path), canonical_name(file));
  const std::filesystem::path path{std::string(name_or_path)};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unknown preset '" + std::string(name_or_path) + "' (no such built-in or file)");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_preset(ss.str(), path.stem().string());
  } catch (const ParseError& e) {
    throw Error(path.string() + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                e.detail());
  }
}

PlantModelPreset maize_preset() { return load_preset("maize"); }

PlantModelPreset canola_preset(int variant) {
  if (variant < 1 || variant > 5) throw Error("canola variant must be 1..5, got " + std::to_string(variant));
  return load_preset("canola" + std::to_string(variant));
}

PlantModelPreset apply_overrides(const PlantModelPreset& preset, const Overrides& overrides) {
  PlantModelPreset p = preset;
  for (const auto& [key, value] : overrides) {
    if (!std::isfinite(value)) throw Error("override '" + key + "' is not finite");
    const auto dot = key.rfind('.');
    if (dot != std::string::npos) {
      const std::string field = key.substr(dot + 1);
      StochasticParam* sp = p.param(key.substr(0, dot));
      if (!sp || (field != "mean" && field != "sd")) throw Error("unknown parameter '" + key + "'");
      (field == "mean" ? sp->mean : sp->sd) = value;
    } else if (StochasticParam* sp = p.param(key)) {
      // a bare stochastic name pins the parameter
      sp->mean = value;
      sp->sd = 0.0;
    } else if (p.model.constant_index(key)) {
      p.model = p.model.with_constant(key, value);
    } else {
      throw Error("unknown parameter '" + key + "'");
    }
  }
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Topology

int count_leaves(const lsys::SymbolString& s) {
  return static_cast<int>(std::count_if(s.begin(), s.end(), [](const auto& m) { return m.name == "Leaf"; }));
}

int count_open_flowers(const lsys::SymbolString& s) {
  return static_cast<int>(std::count_if(s.begin(), s.end(), [](const auto& m) { return m.name == "Flower"; }));
}

int count_inflorescence_branches(const lsys::SymbolString& s) {
  int count = 1;
  int depth = 0;
  bool has_f = false, has_flower = false;
  for (const auto& m : s) {
    if (m.is_push()) {
      if (depth == 0) has_f = has_flower = false;
      ++depth;
    } else if (m.is_pop()) {
      --depth;
      if (depth == 0 && has_f && has_flower) ++count;
    } else if (depth > 0) {
      if (m.name == "F") has_f = true;
      else if (m.name == "Flower") has_flower = true;
    }
  }
  return count;
}

namespace {

DayTopology topology_of(const lsys::SymbolString& s, int day) {
  return DayTopology{day, count_leaves(s), count_inflorescence_branches(s), count_open_flowers(s)};
}

std::vector<double> sample_constants(const PlantModelPreset& preset, std::uint64_t seed,
                                     std::vector<std::pair<std::string, double>>* sampled) {
  Rng rng(mix64(seed, 0));
  std::vector<double> constants = preset.model.constant_values();
  for (const auto& sp : preset.params) {
    // always draw so later parameters do not shift when an sd becomes zero
    const double z = rng.normal();
    double v = sp.mean + sp.sd * z;
    v = std::clamp(v, sp.mean - 3.0 * sp.sd, sp.mean + 3.0 * sp.sd);
    v = std::clamp(v, sp.lower, sp.upper);
    constants[*preset.model.constant_index(sp.name)] = v;
    if (sampled) sampled->emplace_back(sp.name, v);
  }
  return constants;
}

}  // namespace

PlantInstance sample_plant(const PlantModelPreset& preset, std::uint64_t seed) {
  PlantInstance inst;
  inst.preset_name = preset.name;
  inst.seed = seed;
  inst.constants = sample_constants(preset, seed, &inst.sampled);
  Rng rng(mix64(seed, 1));
  lsys::SymbolString s = lsys::instantiate_axiom(preset.model, inst.constants);
  inst.days.reserve(static_cast<std::size_t>(preset.timeline_days));
  for (int d = 1; d <= preset.timeline_days; ++d) {
    s = lsys::derive_step(preset.model, s, inst.constants, rng);
    inst.topology.push_back(topology_of(s, d));
    inst.days.push_back(s);
  }
  return inst;
}

int simulate_branch_count(const PlantModelPreset& preset, std::uint64_t seed) {
  const auto constants = sample_constants(preset, seed, nullptr);
  Rng rng(mix64(seed, 1));
  lsys::SymbolString s = lsys::instantiate_axiom(preset.model, constants);
  for (int d = 1; d <= preset.timeline_days; ++d) s = lsys::derive_step(preset.model, s, constants, rng);
  return count_inflorescence_branches(s);
}

namespace {

// Runs fn(i) for i in [0, n) over up to `threads` workers; fn writes to its own slot.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

Histogram simulate_branch_histogram(const PlantModelPreset& preset, std::size_t n, std::uint64_t seed,
                                    unsigned threads) {
  std::vector<int> counts(n);
  parallel_for(n, threads, [&](std::size_t i) { counts[i] = simulate_branch_count(preset, mix64(seed, i)); });
  Histogram h;
  for (int c : counts) h[c] += 1.0;
  return h;
}

CalibrationResult calibrate_branch_distribution(const PlantModelPreset& preset, const Histogram& target,
                                                const CalibrationGrid& grid, std::size_t n_samples,
                                                std::uint64_t seed, unsigned threads) {
  double mass = 0.0;
  for (const auto& [k, v] : target) mass += v;
  if (target.empty() || !(mass > 0.0)) throw Error("target histogram is empty");
  if (grid.vigour_mean.empty() || grid.vigour_sd.empty() || grid.threshold.empty())
    throw Error("calibration grid is empty");
  if (n_samples < 30) throw Error("calibration needs at least 30 samples per grid point");
  if (!preset.param(kBranchVigour))
    throw Error("preset '" + preset.name + "' has no stochastic " + std::string(kBranchVigour));
  if (!preset.model.constant_index(kBranchThreshold))
    throw Error("preset '" + preset.name + "' has no " + std::string(kBranchThreshold) + " constant");

  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto means = sorted(grid.vigour_mean);
  const auto sds = sorted(grid.vigour_sd);
  const auto thresholds = sorted(grid.threshold);

  std::vector<GridEvaluation> evals;
  for (double m : means)
    for (double s : sds)
      for (double t : thresholds) evals.push_back(GridEvaluation{m, s, t, 0.0, {}});

  auto configure = [&](const GridEvaluation& g) {
    Overrides o{{std::string(kBranchVigour) + ".mean", g.vigour_mean},
                {std::string(kBranchVigour) + ".sd", g.vigour_sd},
                {std::string(kBranchThreshold), g.threshold}};
    return apply_overrides(preset, o);
  };

  parallel_for(evals.size(), threads, [&](std::size_t i) {
    const PlantModelPreset candidate = configure(evals[i]);
    evals[i].histogram = simulate_branch_histogram(candidate, n_samples, seed, 1);
    evals[i].distance = metrics::histogram_distance(evals[i].histogram, target);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < evals.size(); ++i)
    if (evals[i].distance < evals[best].distance) best = i;  // strict: first (smallest) point wins ties

  CalibrationResult r;
  r.preset = configure(evals[best]);
  r.best = evals[best];
  r.evaluated = std::move(evals);
  return r;
}

}  // namespace plantsim::models
