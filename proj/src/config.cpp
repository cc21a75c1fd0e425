#include "tilefuse/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "tilefuse/error.hpp"

namespace tilefuse {
namespace {

class Reader {
 public:
  Reader(const toml::table& table, std::string path) : table_(table), path_(std::move(path)) {}

  void allow_only(std::initializer_list<std::string_view> keys) const {
    std::set<std::string_view> allowed(keys);
    for (const auto& [key, value] : table_) {
      if (!allowed.contains(key.str())) fail(std::string(key.str()), "unknown key");
    }
  }

  bool has(std::string_view key) const { return table_.contains(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw UsageError(path_ + "." + key + ": " + why);
  }

  std::string string(std::string_view key) const {
    auto v = table_[key].value<std::string>();
    if (!v) fail(std::string(key), "expected a string");
    return *v;
  }

  double number(std::string_view key) const {
    const toml::node* n = table_.get(key);
    if (n && n->is_integer()) return double(n->as_integer()->get());
    if (n && n->is_floating_point()) return n->as_floating_point()->get();
    fail(std::string(key), "expected a number");
  }

  std::int64_t integer(std::string_view key) const {
    const toml::node* n = table_.get(key);
    if (n && n->is_integer()) return n->as_integer()->get();
    if (n && n->is_floating_point()) {
      double d = n->as_floating_point()->get();
      if (std::floor(d) == d) return static_cast<std::int64_t>(d);
    }
    fail(std::string(key), "expected an integer");
  }

  const toml::array& array(std::string_view key) const {
    const toml::array* a = table_[key].as_array();
    if (!a) fail(std::string(key), "expected an array");
    return *a;
  }

  ConfidenceRange range(std::string_view key) const {
    const auto& a = array(key);
    if (a.size() != 2) fail(std::string(key), "expected [lo, hi]");
    double v[2];
    for (std::size_t i = 0; i < 2; ++i) {
      const toml::node* n = a.get(i);
      if (n->is_integer()) v[i] = double(n->as_integer()->get());
      else if (n->is_floating_point()) v[i] = n->as_floating_point()->get();
      else fail(std::string(key), "expected numbers");
    }
    if (!(0.0 <= v[0] && v[0] <= v[1] && v[1] <= 1.0)) {
      fail(std::string(key), "must satisfy 0 <= lo <= hi <= 1");
    }
    return {v[0], v[1]};
  }

 private:
  const toml::table& table_;
  std::string path_;
};

struct PendingOverlap {
  std::size_t pipeline;
  double fraction;
};

PipelineConfig read_pipeline(const Reader& r, std::optional<double>& fraction) {
  r.allow_only({"name", "scale", "overlap_px", "overlap_fraction", "confidence_threshold",
                "backend", "size_groups"});
  PipelineConfig p;
  p.name = r.string("name");
  double scale = r.number("scale");
  if (!(scale > 0.0) || !std::isfinite(scale)) r.fail("scale", "must be > 0");
  p.scale = ScaleFactor(scale);

  if (r.has("overlap_px") && r.has("overlap_fraction")) {
    r.fail("overlap_px", "give either overlap_px or overlap_fraction, not both");
  }
  if (r.has("overlap_fraction")) {
    double f = r.number("overlap_fraction");
    if (!(f >= 0.0 && f < 1.0)) r.fail("overlap_fraction", "must be in [0, 1)");
    fraction = f;
  } else if (r.has("overlap_px")) {
    auto px = r.integer("overlap_px");
    if (px < 0) r.fail("overlap_px", "must be >= 0");
    p.overlap_px = static_cast<int>(px);
  }

  p.confidence_threshold = r.number("confidence_threshold");
  if (!(p.confidence_threshold >= 0.0 && p.confidence_threshold <= 1.0)) {
    r.fail("confidence_threshold", "must be in [0, 1]");
  }
  p.backend = r.string("backend");

  if (r.has("size_groups")) {
    p.size_groups.clear();
    for (const auto& node : r.array("size_groups")) {
      auto text = node.value<std::string>();
      auto g = text ? parse_size_group(*text) : std::nullopt;
      if (!g) r.fail("size_groups", "entries must be \"small\", \"medium\" or \"large\"");
      p.size_groups.insert(*g);
    }
    if (p.size_groups.empty()) r.fail("size_groups", "must not be empty");
  }
  return p;
}

void read_backend(const Reader& r, BackendSpec& b) {
  r.allow_only({"kind", "tile_sizes", "capacity", "jitter_px", "drop_rate", "fp_rate",
                "tp_confidence", "fp_confidence", "seed", "delay_ms", "command",
                "timeout_seconds"});
  if (r.has("kind")) {
    auto kind = r.string("kind");
    if (kind == "synthetic") b.kind = BackendKind::Synthetic;
    else if (kind == "external") b.kind = BackendKind::External;
    else r.fail("kind", "must be \"synthetic\" or \"external\"");
  }
  if (r.has("tile_sizes")) {
    b.tile_sizes.clear();
    for (const auto& node : r.array("tile_sizes")) {
      auto v = node.value<std::int64_t>();
      if (!v || *v <= 0) r.fail("tile_sizes", "entries must be positive integers");
      b.tile_sizes.push_back(static_cast<int>(*v));
    }
    if (b.tile_sizes.empty()) r.fail("tile_sizes", "must not be empty");
  }
  if (r.has("capacity")) {
    auto c = r.integer("capacity");
    if (c < 0) r.fail("capacity", "must be >= 0");
    b.capacity = static_cast<int>(c);
  }
  auto& s = b.synthetic;
  if (r.has("jitter_px")) {
    s.jitter_px = r.number("jitter_px");
    if (!(s.jitter_px >= 0.0)) r.fail("jitter_px", "must be >= 0");
  }
  if (r.has("drop_rate")) {
    s.drop_rate = r.number("drop_rate");
    if (!(s.drop_rate >= 0.0 && s.drop_rate <= 1.0)) r.fail("drop_rate", "must be in [0, 1]");
  }
  if (r.has("fp_rate")) {
    s.fp_rate = r.number("fp_rate");
    if (!(s.fp_rate >= 0.0)) r.fail("fp_rate", "must be >= 0");
  }
  if (r.has("tp_confidence")) s.true_positive = r.range("tp_confidence");
  if (r.has("fp_confidence")) s.false_positive = r.range("fp_confidence");
  if (r.has("seed")) s.seed = static_cast<std::uint64_t>(r.integer("seed"));
  if (r.has("delay_ms")) {
    s.delay_ms = r.number("delay_ms");
    if (!(s.delay_ms >= 0.0)) r.fail("delay_ms", "must be >= 0");
  }
  if (r.has("command")) b.command = r.string("command");
  if (r.has("timeout_seconds")) {
    b.timeout_seconds = r.number("timeout_seconds");
    if (!(b.timeout_seconds > 0.0)) r.fail("timeout_seconds", "must be > 0");
  }
  if (b.kind == BackendKind::External && b.command.empty()) {
    r.fail("command", "required for external backends");
  }
}

}  // namespace

EnsembleConfig parse_config(std::string_view toml_text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ": " << e.description() << " at " << e.source().begin;
    throw UsageError(os.str());
  }

  Reader top(root, std::string(source));
  top.allow_only({"pipeline", "fusion", "budget", "backend"});

  EnsembleConfig cfg;
  cfg.backends = builtin_backend_specs();

  if (root.contains("backend")) {
    const toml::table* backends = root["backend"].as_table();
    if (!backends) top.fail("backend", "expected a table of backend tables");
    for (const auto& [name, node] : *backends) {
      const toml::table* t = node.as_table();
      std::string path = std::string(source) + ".backend." + std::string(name.str());
      if (!t) throw UsageError(path + ": expected a table");
      BackendSpec* spec = nullptr;
      for (auto& b : cfg.backends) {
        if (b.name == name.str()) spec = &b;
      }
      if (!spec) {
        cfg.backends.push_back({});
        spec = &cfg.backends.back();
        spec->name = std::string(name.str());
      }
      read_backend(Reader(*t, path), *spec);
    }
  }

  const toml::array* pipelines = root["pipeline"].as_array();
  if (!pipelines || pipelines->empty()) top.fail("pipeline", "at least one [[pipeline]] is required");
  std::vector<PendingOverlap> fractions;
  std::set<std::string> names;
  for (std::size_t i = 0; i < pipelines->size(); ++i) {
    const toml::table* t = pipelines->get(i)->as_table();
    std::string path = std::string(source) + ".pipeline[" + std::to_string(i) + "]";
    if (!t) throw UsageError(path + ": expected a table");
    std::optional<double> fraction;
    cfg.pipelines.push_back(read_pipeline(Reader(*t, path), fraction));
    if (!names.insert(cfg.pipelines.back().name).second) {
      throw UsageError(path + ".name: duplicate pipeline name '" + cfg.pipelines.back().name + "'");
    }
    if (fraction) fractions.push_back({i, *fraction});
  }

  if (root.contains("fusion")) {
    const toml::table* t = root["fusion"].as_table();
    if (!t) top.fail("fusion", "expected a table");
    Reader r(*t, std::string(source) + ".fusion");
    r.allow_only({"sigma", "metric", "mode", "category_scope"});
    if (r.has("sigma")) {
      cfg.fusion.sigma = r.number("sigma");
      if (!(cfg.fusion.sigma > 0.0 && cfg.fusion.sigma < 1.0)) r.fail("sigma", "must be in (0, 1)");
    }
    if (r.has("metric")) {
      auto m = parse_metric(r.string("metric"));
      if (!m) r.fail("metric", "must be \"iou\" or \"intersection-score\"");
      cfg.fusion.metric = *m;
    }
    if (r.has("mode")) {
      auto m = parse_mode(r.string("mode"));
      if (!m) r.fail("mode", "must be \"select\" or \"merge\"");
      cfg.fusion.mode = *m;
    }
    if (r.has("category_scope")) {
      auto s = parse_scope(r.string("category_scope"));
      if (!s) r.fail("category_scope", "must be \"per-category\" or \"agnostic\"");
      cfg.fusion.scope = *s;
    }
  }

  if (root.contains("budget")) {
    const toml::table* t = root["budget"].as_table();
    if (!t) top.fail("budget", "expected a table");
    Reader r(*t, std::string(source) + ".budget");
    r.allow_only({"per_image_seconds", "total_seconds", "memory_bytes"});
    if (r.has("per_image_seconds")) {
      cfg.budget.per_image_seconds = r.number("per_image_seconds");
      if (!(cfg.budget.per_image_seconds > 0.0)) r.fail("per_image_seconds", "must be > 0");
    }
    if (r.has("total_seconds")) {
      cfg.budget.total_seconds = r.number("total_seconds");
      if (!(cfg.budget.total_seconds > 0.0)) r.fail("total_seconds", "must be > 0");
    }
    if (r.has("memory_bytes")) {
      auto m = r.integer("memory_bytes");
      if (m <= 0) r.fail("memory_bytes", "must be > 0");
      cfg.budget.memory_bytes = static_cast<std::uint64_t>(m);
    }
  }

  for (const auto& f : fractions) {
    auto& p = cfg.pipelines[f.pipeline];
    const BackendSpec* b = cfg.find_backend(p.backend);
    if (!b) {
      throw UsageError(std::string(source) + ".pipeline[" + std::to_string(f.pipeline) +
                       "].backend: unknown backend '" + p.backend + "'");
    }
    int min_tile = *std::min_element(b->tile_sizes.begin(), b->tile_sizes.end());
    p.overlap_px = static_cast<int>(std::lround(f.fraction * min_tile));
  }

  try {
    cfg.validate();
  } catch (const UsageError& e) {
    throw UsageError(std::string(source) + ": " + e.what());
  }
  return cfg;
}

EnsembleConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

EnsembleConfig default_config() { return parse_config(default_config_text(), "default.toml"); }

}  // namespace tilefuse
