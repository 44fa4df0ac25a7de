#include "plantsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "plantsim/baseline.hpp"
#include "plantsim/csv.hpp"
#include "plantsim/dataset.hpp"
#include "plantsim/error.hpp"
#include "plantsim/evaluate.hpp"
#include "plantsim/metrics.hpp"
#include "plantsim/plant_models.hpp"
#include "plantsim/preprocess.hpp"
#include "plantsim/service.hpp"

namespace plantsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw Error("no such file: " + p.string());
}

Rgb parse_rgb(const std::string& text) {
  int r = 0, g = 0, b = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> r >> c1 >> g >> c2 >> b) || c1 != ',' || c2 != ',' || r < 0 || r > 255 || g < 0 || g > 255 ||
      b < 0 || b > 255)
    throw CLI::ValidationError("--background", "expected r,g,b with channels in 0..255, got '" + text + "'");
  return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

// "--set key=value" pairs plus an optional JSON patch file {"key": number}.
models::Overrides collect_overrides(const std::vector<std::string>& sets, const std::string& patch_file) {
  models::Overrides o;
  if (!patch_file.empty()) {
    require_file(patch_file);
    json j;
    try {
      j = json::parse(read_file(patch_file));
    } catch (const json::exception& e) {
      throw Error(patch_file + ": " + e.what());
    }
    const json& map = j.contains("overrides") ? j.at("overrides") : j;
    if (!map.is_object()) throw Error(patch_file + ": expected a JSON object of numbers");
    for (const auto& [k, v] : map.items()) {
      if (!v.is_number()) throw Error(patch_file + ": value of '" + k + "' is not a number");
      o[k] = v.get<double>();
    }
  }
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--set", "expected key=value, got '" + s + "'");
    const std::string value = s.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !std::isfinite(v))
      throw CLI::ValidationError("--set", "value of '" + s.substr(0, eq) + "' is not a number");
    o[s.substr(0, eq)] = v;
  }
  return o;
}

models::PlantModelPreset load_with_overrides(const std::string& name, const std::vector<std::string>& sets,
                                             const std::string& patch_file) {
  models::PlantModelPreset p = models::load_preset(name);
  const auto o = collect_overrides(sets, patch_file);
  return o.empty() ? p : models::apply_overrides(p, o);
}

// Several manifests searched in order; each record remembers where its
// manifest lives so image paths resolve.
struct ManifestSet {
  std::vector<std::pair<fs::path, dataset::DatasetManifest>> items;

  void add(const fs::path& p) {
    require_file(p);
    items.emplace_back(p, dataset::read_manifest(p));
  }
  std::pair<const dataset::Record*, fs::path> find(std::string_view id) const {
    for (const auto& [path, m] : items)
      if (const auto* r = m.find(id)) return {r, dataset::image_path(path, *r)};
    return {nullptr, {}};
  }
  dataset::DatasetManifest merged() const {
    dataset::DatasetManifest out;
    for (const auto& [path, m] : items) {
      for (auto r : m.records) {
        r.path = dataset::image_path(path, r).string();
        out.records.push_back(std::move(r));
      }
    }
    return out;
  }
};

struct BackgroundOptions {
  std::string color;
  std::string image;
  int tol = 10;
  int exg = 20;
  std::string gray = "mean";

  void add_to(CLI::App* app) {
    app->add_option("--background", color, "Flat background colour r,g,b for real images");
    app->add_option("--background-image", image, "Empty-chamber reference image for real images")
        ->check(CLI::ExistingFile);
    app->add_option("--tol", tol, "Background tolerance per channel")->capture_default_str()->check(CLI::Range(0, 255));
    app->add_option("--exg", exg, "Excess-green threshold")->capture_default_str();
    app->add_option("--gray", gray, "Grayscale conversion")
        ->capture_default_str()
        ->check(CLI::IsMember({"mean", "luma"}));
  }
  preprocess::SegmentOptions segment() const {
    preprocess::SegmentOptions o;
    o.background_tol = tol;
    o.exg_threshold = exg;
    o.gray = gray == "luma" ? preprocess::GrayMode::luma : preprocess::GrayMode::mean;
    return o;
  }
};

// Segmentation mask of a dataset image. Synthetic renders use the renderer's
// background; real images use the configured reference.
BinaryMask segment_record(const dataset::Record& r, const fs::path& image, const BackgroundOptions& bg,
                          const std::optional<RasterImage>& bg_image) {
  const RasterImage img = load_image(image);
  if (r.source == dataset::Source::synthetic) return preprocess::segment_plant(img, render::kDefaultBackground, bg.segment());
  if (bg_image) return preprocess::segment_plant(img, *bg_image, bg.segment());
  if (!bg.color.empty()) return preprocess::segment_plant(img, parse_rgb(bg.color), bg.segment());
  return preprocess::segment_plant(img, render::kDefaultBackground, bg.segment());
}

std::optional<RasterImage> load_background(const BackgroundOptions& bg) {
  if (bg.image.empty()) return std::nullopt;
  return load_image(bg.image);
}

baseline::FeatureVector record_features(const ManifestSet& set, const std::string& id, const BackgroundOptions& bg,
                                        const std::optional<RasterImage>& bg_image, const dataset::Record** rec) {
  const auto [r, path] = set.find(id);
  if (!r) throw Error("image id '" + id + "' is in the split but in none of the manifests");
  if (rec) *rec = r;
  return baseline::extract_features(segment_record(*r, path, bg, bg_image), r->day);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw CLI::ValidationError(flag, "expected comma-separated numbers, got '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError(flag, "empty list");
  return out;
}

// "1:4 2:10 3:18" or a CSV with columns bin,frequency.
models::Histogram parse_histogram(const std::string& text_or_file) {
  models::Histogram h;
  if (fs::is_regular_file(text_or_file)) {
    const csv::Table t = csv::parse(read_file(text_or_file));
    if (t.header.size() < 2) throw Error(text_or_file + ": expected columns bin,frequency");
    for (const auto& row : t.rows) h[std::stoll(row.at(0))] += std::stod(row.at(1));
    return h;
  }
  std::istringstream in(text_or_file);
  std::string item;
  while (in >> item) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--target", "expected bin:weight entries");
    h[std::stoll(item.substr(0, colon))] += std::stod(item.substr(colon + 1));
  }
  return h;
}

json histogram_json(const metrics::Histogram& h) {
  json j = json::object();
  for (const auto& [k, v] : h) j[std::to_string(k)] = v;
  return j;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

struct GenerateCmd {
  std::string preset;
  int plants = 1;
  std::uint64_t seed = 0;
  std::string out;
  int resolution = 256;
  int min_pixels = 0;
  int max_days = -1;
  unsigned threads = default_threads();
  bool id_buffers = false;
  std::vector<std::string> sets;
  std::string patch;

  void add(CLI::App& root, std::function<void()>& action, std::ostream& out_stream) {
    auto* c = root.add_subcommand("generate", "Simulate, render and annotate a synthetic dataset");
    c->add_option("--preset", preset, "Preset name (maize, canola1..canola5) or preset file")->required();
    c->add_option("--plants", plants, "Number of plants")->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--seed", seed, "Master seed")->capture_default_str();
    c->add_option("--out", out, "Output directory")->required();
    c->add_option("--resolution", resolution, "Image side in pixels")->check(CLI::Range(16, 4096))->capture_default_str();
    c->add_option("--min-pixels", min_pixels, "Visible-leaf pixel threshold (0: scale 25 px at 256x256)")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--max-days", max_days, "Per-plant day cap (default: 6 for canola, none for maize; 0: none)");
    c->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    c->add_flag("--id-buffers", id_buffers, "Also write organ id buffers under ids/");
    c->add_option("--set", sets, "Parameter override key=value (repeatable)");
    c->add_option("--overrides", patch, "JSON override patch file");
    action = [this, &out_stream] {
      const auto p = load_with_overrides(preset, sets, patch);
      dataset::GenerateOptions o;
      o.n_plants = plants;
      o.seed = seed;
      o.resolution = resolution;
      o.min_pixels = min_pixels;
      o.max_days_per_plant = max_days;
      o.threads = threads;
      o.write_id_buffers = id_buffers;
      const auto m = dataset::generate_dataset(p, o, out);
      out_stream << "records " << m.records.size() << "\n"
                 << "dropped " << m.dropped.size() << "\n"
                 << "manifest " << (fs::path(out) / "manifest.csv").string() << "\n"
                 << "hash " << dataset::manifest_hash(m) << "\n";
    };
  }
};

struct PreprocessCmd {
  std::string in_dir;
  std::string out_dir;
  std::string pairs;
  BackgroundOptions bg;

  void add(CLI::App& root, std::function<void()>& action, std::ostream& out_stream) {
    auto* c = root.add_subcommand("preprocess", "Segment real images and select the best view per plant");
    c->add_option("--in", in_dir, "Directory of PNG/JPEG images")->required()->check(CLI::ExistingDirectory);
    c->add_option("--out", out_dir, "Output directory for masks and tables")->required();
    c->add_option("--pairs", pairs, "CSV with columns id,view0,view1 (paths relative to --in)")
        ->check(CLI::ExistingFile);
    bg.add_to(c);
    action = [this, &out_stream] { run(out_stream); };
  }

  void run(std::ostream& out) {
    const auto bg_image = load_background(bg);
    const Rgb color = bg.color.empty() ? render::kDefaultBackground : parse_rgb(bg.color);
    auto segment = [&](const RasterImage& img) {
      return bg_image ? preprocess::segment_plant(img, *bg_image, bg.segment())
                      : preprocess::segment_plant(img, color, bg.segment());
    };

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(in_dir)) {
      if (!e.is_regular_file()) continue;
      std::string ext = e.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
      if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    fs::create_directories(fs::path(out_dir) / "masks");

    std::string table = csv::row({"image", "mask", "foreground_pixels", "hull_area", "bbox_height", "bbox_width"});
    for (const auto& f : files) {
      const BinaryMask mask = segment(load_image(f));
      const fs::path mask_rel = fs::path("masks") / (f.stem().string() + ".png");
      const auto bytes = encode_png_mask(mask);
      write_file(fs::path(out_dir) / mask_rel, std::string(bytes.begin(), bytes.end()));
      const std::size_t fg = mask.count();
      const auto box = preprocess::mask_bounds(mask);
      table += csv::row({f.filename().string(), mask_rel.string(), std::to_string(fg),
                         fmt(preprocess::convex_hull_area(mask)), std::to_string(box.height),
                         std::to_string(box.width)});
    }
    write_file(fs::path(out_dir) / "segmentation.csv", table);
    out << "images " << files.size() << "\n";

    if (pairs.empty()) return;
    const csv::Table t = csv::parse(read_file(pairs));
    const auto id_opt = t.column("id"), v0_opt = t.column("view0"), v1_opt = t.column("view1");
    if (!id_opt || !v0_opt || !v1_opt) throw Error(pairs + ": expected columns id,view0,view1");
    const std::size_t id_col = *id_opt, v0_col = *v0_opt, v1_col = *v1_opt;
    std::string best = csv::row({"id", "best_view", "view", "hull_area0", "hull_area1"});
    for (const auto& row : t.rows) {
      const RasterImage a = load_image(fs::path(in_dir) / row[v0_col]);
      const RasterImage b = load_image(fs::path(in_dir) / row[v1_col]);
      const double h0 = preprocess::convex_hull_area(segment(a));
      const double h1 = preprocess::convex_hull_area(segment(b));
      const int pick = h1 > h0 ? 1 : 0;
      best += csv::row({row[id_col], std::to_string(pick), pick == 0 ? row[v0_col] : row[v1_col], fmt(h0), fmt(h1)});
    }
    write_file(fs::path(out_dir) / "best_view.csv", best);
    out << "pairs " << t.rows.size() << "\n";
  }
};

struct SplitCmd {
  std::string real;
  std::string synthetic;
  int units = 0;
  std::string test = "fixed-100";
  std::string synthetic_policy = "none";
  int maize_test_plants = 5;
  std::size_t test_images = 100;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App& root, std::function<void()>& action, std::ostream& out_stream) {
    auto* c = root.add_subcommand("split", "Build a train/test split as JSON");
    c->add_option("--real", real, "Real annotation manifest")->required()->check(CLI::ExistingFile);
    c->add_option("--synthetic", synthetic, "Synthetic manifest")->check(CLI::ExistingFile);
    c->add_option("--units", units, "Number of real training units (plants or genotypes)")
        ->required()
        ->check(CLI::NonNegativeNumber);
    c->add_option("--test", test, "Test policy")->capture_default_str()->check(CLI::IsMember({"fixed-100", "all-remaining"}));
    c->add_option("--synthetic-policy", synthetic_policy, "Synthetic training images")
        ->capture_default_str()
        ->check(CLI::IsMember({"none", "all", "equal-count"}));
    c->add_option("--test-plants", maize_test_plants, "Held-out maize plants")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--test-images", test_images, "Size of the fixed test subset")->capture_default_str();
    c->add_option("--seed", seed, "Split seed")->capture_default_str();
    c->add_option("--out", out, "Output JSON path (stdout when omitted)");
    action = [this, &out_stream] {
      const auto r = dataset::read_manifest(real);
      dataset::DatasetManifest s;
      if (!synthetic.empty()) s = dataset::read_manifest(synthetic);
      if (synthetic_policy != "none" && synthetic.empty())
        throw CLI::ValidationError("--synthetic", "required when --synthetic-policy is not none");
      dataset::SplitPolicy p;
      p.test = dataset::parse_test_policy(test);
      p.synthetic = dataset::parse_augmentation(synthetic_policy);
      p.maize_test_plants = maize_test_plants;
      p.test_images = test_images;
      const auto split = dataset::split_experiment(r, s, units, p, seed);
      for (const auto& w : split.warnings) std::cerr << "warning: " << w << "\n";
      const std::string text = dataset::split_to_json(split);
      if (out.empty()) {
        out_stream << text;
      } else {
        write_file(out, text);
        out_stream << split.row_label() << "\n"
                   << "train " << split.train.size() << "\n"
                   << "test " << split.test.size() << "\n";
      }
    };
  }
};

struct TrainCmd {
  std::vector<std::string> manifests;
  std::string split;
  std::string out;
  BackgroundOptions bg;

  void add(CLI::App& root, std::function<void()>& action, std::ostream& out_stream) {
    auto* c = root.add_subcommand("train-baseline", "Fit the hull-feature linear count regressor");
    c->add_option("--manifest", manifests, "Manifest holding split images (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--split", split, "Split JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "Model JSON path")->required();
    bg.add_to(c);
    action = [this, &out_stream] {
      ManifestSet set;
      for (const auto& m : manifests) set.add(m);
      const auto s = dataset::split_from_json(read_file(split));
      const auto bg_image = load_background(bg);
      std::vector<baseline::FeatureVector> rows;
      std::vector<double> y;
      for (const auto& id : s.train) {
        const dataset::Record* r = nullptr;
        rows.push_back(record_features(set, id, bg, bg_image, &r));
        y.push_back(r->count);
      }
      const auto model = baseline::fit(rows, y);
      write_file(out, baseline::model_to_json(model));
      out_stream << "trained on " << rows.size() << " images" << (model.ridge_used ? " (ridge fallback)" : "") << "\n";
    };
  }
};

struct PredictCmd {
  std::string model;
  std::vector<std::string> manifests;
  std::string split;
  std::string out;
  BackgroundOptions bg;

  void add(CLI::App& root, std::function<void()>& action, std::ostream& out_stream) {
    auto* c = root.add_subcommand("predict-baseline", "Predict counts for the split's test images");
    c->add_option("--model", model, "Model JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--manifest", manifests, "Manifest holding split images (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--split", split, "Split JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out, "Prediction CSV path")->required();
    bg.add_to(c);
    action = [this, &out_stream] {
      ManifestSet set;
      for (const auto& m : manifests) set.add(m);
      const auto s = dataset::split_from_json(read_file(split));
      const auto lm = baseline::model_from_json(read_file(model));
      const auto bg_image = load_background(bg);
      std::vector<std::pair<std::string, double>> rows;
      for (const auto& id : s.test) {
        const auto f = record_features(set, id, bg, bg_image, nullptr);
        rows.emplace_back(id, baseline::predict(lm, f));
      }
      write_file(out, metrics::predictions_to_csv(rows));
      out_stream << "predicted " << rows.size() << " images\n";
    };
  }
};

struct EvaluateCmd {
  std::string pred;
  std::vector<std::string> manifests;
  std::string split;
  std::string json_out;
  std::string hist_out;

  void add(CLI::App& root, std::function<void()>& action, std::ostream& out_stream) {
    auto* c = root.add_subcommand("evaluate", "Score predictions against ground truth on the split's test set");
    c->add_option("--pred", pred, "Prediction CSV (image_id, predicted_count)")->required()->check(CLI::ExistingFile);
    c->add_option("--manifest", manifests, "Ground-truth manifest (repeatable)")->required()->check(CLI::ExistingFile);
    c->add_option("--split", split, "Split JSON")->required()->check(CLI::ExistingFile);
    c->add_option("--json", json_out, "Write the full report as JSON");
    c->add_option("--hist", hist_out, "Write the count-difference histogram as CSV");
    action = [this, &out_stream] {
      ManifestSet set;
      for (const auto& m : manifests) set.add(m);
      const auto report =
          metrics::evaluate(metrics::read_predictions(pred), set.merged(), dataset::split_from_json(read_file(split)));
      if (!json_out.empty()) write_file(json_out, metrics::report_to_json(report));
      if (!hist_out.empty()) write_file(hist_out, metrics::histogram_to_csv(report.count_difference));
      out_stream << report.table_cell() << "\n";
    };
  }
};

struct CompareCmd {
  std::string a, b;

  void add(CLI::App& root, std::function<void()>& action, std::ostream& out_stream) {
    auto* c = root.add_subcommand("compare-dist", "Total-variation distance between two count distributions");
    c->add_option("a", a, "First manifest")->required()->check(CLI::ExistingFile);
    c->add_option("b", b, "Second manifest")->required()->check(CLI::ExistingFile);
    action = [this, &out_stream] {
      auto hist = [](const std::string& p) {
        metrics::Histogram h;
        for (const auto& r : dataset::read_manifest(p).records) h[r.count] += 1.0;
        return h;
      };
      const auto ha = hist(a), hb = hist(b);
      const double d = metrics::histogram_distance(ha, hb);
      json j{{"a", histogram_json(ha)}, {"b", histogram_json(hb)}, {"distance", d}};
      out_stream << j.dump() << "\n";
    };
  }
};

struct CalibrateCmd {
  std::string preset;
  std::string target;
  std::string means = "0.8,1,1.2,1.4,1.6,1.8,2";
  std::string sds = "0.1,0.2,0.3,0.4,0.5";
  std::string thresholds;
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
  std::string out;
  std::vector<std::string> sets;
  std::string patch;

  void add(CLI::App& root, std::function<void()>& action, std::ostream& out_stream) {
    auto* c = root.add_subcommand("calibrate", "Grid-search branch vigour against a target branch-count histogram");
    c->add_option("--preset", preset, "Canola preset name or file")->required();
    c->add_option("--target", target, "Target histogram: 'bin:weight ...' or a bin,frequency CSV (default: preset target)");
    c->add_option("--vigour-mean", means, "Comma-separated grid of vigour means")->capture_default_str();
    c->add_option("--vigour-sd", sds, "Comma-separated grid of vigour standard deviations")->capture_default_str();
    c->add_option("--threshold", thresholds, "Comma-separated grid of thresholds (default: preset value)");
    c->add_option("--samples", samples, "Plants simulated per grid point")->capture_default_str();
    c->add_option("--seed", seed, "Seed")->capture_default_str();
    c->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    c->add_option("--out", out, "Write the best parameters as a JSON override patch");
    c->add_option("--set", sets, "Parameter override key=value applied before the search (repeatable)");
    c->add_option("--overrides", patch, "JSON override patch file applied before the search");
    action = [this, &out_stream] {
      const auto p = load_with_overrides(preset, sets, patch);
      const auto t = target.empty() ? p.target_histogram : parse_histogram(target);
      if (t.empty()) throw CLI::ValidationError("--target", "preset has no target histogram; pass --target");
      models::CalibrationGrid grid;
      grid.vigour_mean = parse_list("--vigour-mean", means);
      grid.vigour_sd = parse_list("--vigour-sd", sds);
      grid.threshold = thresholds.empty() ? std::vector<double>{p.model.constant(std::string(models::kBranchThreshold))}
                                          : parse_list("--threshold", thresholds);
      const auto r = models::calibrate_branch_distribution(p, t, grid, samples, seed, threads);
      json patch_json{{"branch_vigour.mean", r.best.vigour_mean},
                      {"branch_vigour.sd", r.best.vigour_sd},
                      {std::string(models::kBranchThreshold), r.best.threshold}};
      if (!out.empty()) write_file(out, patch_json.dump(2) + "\n");
      out_stream << "vigour_mean " << fmt(r.best.vigour_mean) << "\n"
                 << "vigour_sd " << fmt(r.best.vigour_sd) << "\n"
                 << "threshold " << fmt(r.best.threshold) << "\n"
                 << "distance " << fmt(r.best.distance) << "\n";
    };
  }
};

service::Service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

struct ServeCmd {
  int port = service::default_port();
  std::string host = "127.0.0.1";
  std::string ui;

  void add(CLI::App& root, std::function<void()>& action, std::ostream& out_stream) {
    auto* c = root.add_subcommand("serve", "Run the local HTTP service for the calibration UI");
    c->add_option("--port", port, "Port (default from PLANTSIM_PORT, else 8080; 0 picks a free port)")
        ->check(CLI::Range(0, 65535));
    c->add_option("--host", host, "Bind address")->capture_default_str();
    c->add_option("--ui", ui, "Directory with the UI bundle, served at /")->check(CLI::ExistingDirectory);
    action = [this, &out_stream] {
      service::Service svc(service::Options{host, port, ui});
      const int bound = svc.bind();
      out_stream << "listening on http://" << host << ":" << bound << std::endl;
      g_service = &svc;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      svc.run();
      g_service = nullptr;
    };
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic plant image generation, preprocessing and evaluation"};
  app.name("plantsim");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", dataset::tool_version());

  GenerateCmd generate;
  PreprocessCmd pre;
  SplitCmd split;
  TrainCmd train;
  PredictCmd predict;
  EvaluateCmd evaluate;
  CompareCmd compare;
  CalibrateCmd calibrate;
  ServeCmd serve;
  // each subcommand stores its action; the one CLI11 selects runs after parsing
  std::vector<std::function<void()>> actions(9);
  generate.add(app, actions[0], out);
  pre.add(app, actions[1], out);
  split.add(app, actions[2], out);
  train.add(app, actions[3], out);
  predict.add(app, actions[4], out);
  evaluate.add(app, actions[5], out);
  compare.add(app, actions[6], out);
  calibrate.add(app, actions[7], out);
  serve.add(app, actions[8], out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << dataset::tool_version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  const auto subs = app.get_subcommands();
  const auto all = app.get_subcommands([](CLI::App*) { return true; });
  std::size_t index = 0;
  for (; index < all.size(); ++index)
    if (all[index] == subs.front()) break;
  try {
    actions.at(index)();
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace plantsim::cli
