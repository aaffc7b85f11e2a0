#include "monotone/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace monotone {

using nlohmann::json;

namespace {

std::string type_name(const json& j) { return j.type_name(); }

// Checked accessors over one JSON object; `prefix` builds the dotted key.
class Section {
 public:
  Section(const json& object, std::string prefix, std::set<std::string> allowed)
      : object_(object), prefix_(std::move(prefix)) {
    if (!object_.is_object()) {
      throw ConfigError(prefix_.empty() ? "config" : prefix_.substr(0, prefix_.size() - 1),
                        "expected an object, got " + type_name(object_));
    }
    for (const auto& item : object_.items()) {
      if (!allowed.contains(item.key())) {
        throw ConfigError(prefix_ + item.key(), "unknown key");
      }
    }
  }

  [[nodiscard]] bool has(const std::string& key) const {
    return object_.contains(key) && !object_.at(key).is_null();
  }
  [[nodiscard]] std::string key(const std::string& name) const { return prefix_ + name; }
  [[nodiscard]] const json& at(const std::string& name) const { return object_.at(name); }

  void number(const std::string& name, double& out) const {
    if (!has(name)) return;
    const json& v = at(name);
    if (!v.is_number()) throw mismatch(name, "a number", v);
    out = v.get<double>();
  }

  template <class Int>
  void integer(const std::string& name, Int& out) const {
    if (!has(name)) return;
    const json& v = at(name);
    if (!v.is_number_integer()) throw mismatch(name, "an integer", v);
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) {
        out = static_cast<Int>(v.get<std::uint64_t>());
        return;
      }
      const auto signed_value = v.get<std::int64_t>();
      if (signed_value < 0) throw ConfigError(key(name), "must be >= 0");
      out = static_cast<Int>(signed_value);
    } else {
      const auto value = v.get<std::int64_t>();
      if (value < std::numeric_limits<Int>::min() || value > std::numeric_limits<Int>::max()) {
        throw ConfigError(key(name), "out of range");
      }
      out = static_cast<Int>(value);
    }
  }

  void boolean(const std::string& name, bool& out) const {
    if (!has(name)) return;
    const json& v = at(name);
    if (!v.is_boolean()) throw mismatch(name, "a boolean", v);
    out = v.get<bool>();
  }

  void string(const std::string& name, std::string& out) const {
    if (!has(name)) return;
    const json& v = at(name);
    if (!v.is_string()) throw mismatch(name, "a string", v);
    out = v.get<std::string>();
  }

  [[nodiscard]] ConfigError mismatch(const std::string& name, const std::string& expected,
                                     const json& got) const {
    return ConfigError(key(name), "expected " + expected + ", got " + type_name(got));
  }

 private:
  const json& object_;
  std::string prefix_;
};

const std::set<std::string> kGeneratorKeys{
    "kind",   "d",      "delta",       "q",           "G",        "H",
    "noise_dims", "jitter", "images",   "labels",      "test_images", "test_labels",
    "features", "bandwidth", "seed"};
const std::set<std::string> kPlanKeys{"rounds", "train_per_round", "val_per_round", "sampling",
                                      "append_validation"};
const std::set<std::string> kTopKeys{"preset", "name",        "generator", "plan",
                                     "learners", "alpha",     "folds",     "lambda_grid",
                                     "base_lambda", "runs",   "test_size", "seed",
                                     "threads", "output_dir"};

template <class Fn>
auto rethrow_as_config(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

void fill_mnist_defaults(MnistParams& mnist) {
  const char* dir = std::getenv(kMnistDirEnv);
  if (dir == nullptr || *dir == '\0') {
    return;
  }
  const std::filesystem::path root(dir);
  auto fill = [&](std::string& field, const char* file) {
    if (field.empty()) field = (root / file).string();
  };
  fill(mnist.train_images, "train-images-idx3-ubyte");
  fill(mnist.train_labels, "train-labels-idx1-ubyte");
  fill(mnist.test_images, "t10k-images-idx3-ubyte");
  fill(mnist.test_labels, "t10k-labels-idx1-ubyte");
}

GeneratorSpec generator_from_json(const json& j, GeneratorSpec spec, const std::string& prefix) {
  const Section s(j, prefix, kGeneratorKeys);
  if (s.has("kind")) {
    std::string kind;
    s.string("kind", kind);
    spec.kind = rethrow_as_config(s.key("kind"), [&] { return parse_generator_kind(kind); });
  }
  s.integer("d", spec.d);
  s.number("delta", spec.peaking.delta);
  s.number("q", spec.dipping.majority);
  s.number("G", spec.dipping.outlier_magnitude);
  s.number("H", spec.dipping.outlier_height);
  s.integer("noise_dims", spec.dipping.noise_dims);
  s.number("jitter", spec.dipping.jitter);
  s.string("images", spec.mnist.train_images);
  s.string("labels", spec.mnist.train_labels);
  s.string("test_images", spec.mnist.test_images);
  s.string("test_labels", spec.mnist.test_labels);
  s.integer("features", spec.mnist.features);
  s.number("bandwidth", spec.mnist.bandwidth);
  s.integer("seed", spec.seed);
  // Dimensions that follow from other fields unless given explicitly.
  if (!s.has("d")) {
    if (spec.kind == GeneratorKind::dipping) spec.d = 2 + spec.dipping.noise_dims;
    if (spec.kind == GeneratorKind::mnist) spec.d = spec.mnist.features;
  }
  if (spec.kind == GeneratorKind::mnist) fill_mnist_defaults(spec.mnist);
  return spec;
}

json generator_to_json(const GeneratorSpec& g) {
  return json{{"kind", to_string(g.kind)},
              {"d", g.d},
              {"delta", g.peaking.delta},
              {"q", g.dipping.majority},
              {"G", g.dipping.outlier_magnitude},
              {"H", g.dipping.outlier_height},
              {"noise_dims", g.dipping.noise_dims},
              {"jitter", g.dipping.jitter},
              {"images", g.mnist.train_images},
              {"labels", g.mnist.train_labels},
              {"test_images", g.mnist.test_images},
              {"test_labels", g.mnist.test_labels},
              {"features", g.mnist.features},
              {"bandwidth", g.mnist.bandwidth},
              {"seed", g.seed}};
}

std::vector<LearnerKind> learners_from_json(const json& v) {
  std::vector<std::string> names;
  if (v.is_string()) {
    std::stringstream in(v.get<std::string>());
    for (std::string item; std::getline(in, item, ',');) {
      if (!item.empty()) names.push_back(item);
    }
  } else if (v.is_array()) {
    for (const auto& item : v) {
      if (!item.is_string()) {
        throw ConfigError("learners", "expected learner names, got " + type_name(item));
      }
      names.push_back(item.get<std::string>());
    }
  } else {
    throw ConfigError("learners", "expected a list of learner names, got " + type_name(v));
  }
  std::vector<LearnerKind> kinds;
  for (const auto& name : names) {
    const LearnerKind kind =
        rethrow_as_config("learners", [&] { return parse_learner_kind(name); });
    if (std::find(kinds.begin(), kinds.end(), kind) != kinds.end()) {
      throw ConfigError("learners", "duplicate learner " + name);
    }
    kinds.push_back(kind);
  }
  return kinds;
}

std::vector<double> lambda_grid_from_json(const json& v) {
  if (v.is_array()) {
    std::vector<double> grid;
    for (const auto& item : v) {
      if (!item.is_number()) {
        throw ConfigError("lambda_grid", "expected numbers, got " + type_name(item));
      }
      grid.push_back(item.get<double>());
    }
    return grid;
  }
  if (v.is_object()) {
    const Section s(v, "lambda_grid.", {"from", "to", "step"});
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
    for (const char* k : {"from", "to", "step"}) {
      if (!s.has(k)) throw ConfigError(s.key(k), "required");
    }
    s.number("from", from);
    s.number("to", to);
    s.number("step", step);
    return rethrow_as_config("lambda_grid", [&] { return log10_grid(from, to, step); });
  }
  throw ConfigError("lambda_grid",
                    "expected a list or {from, to, step} exponents, got " + type_name(v));
}

ExperimentConfig config_from_json(const json& doc) {
  const Section top(doc, "", kTopKeys);
  ExperimentConfig config;
  if (top.has("preset")) {
    std::string name;
    top.string("preset", name);
    config = preset(name);
  }
  top.string("name", config.name);
  if (top.has("generator")) {
    config.generator = generator_from_json(top.at("generator"), config.generator, "generator.");
  } else if (config.generator.kind == GeneratorKind::mnist) {
    fill_mnist_defaults(config.generator.mnist);
  }
  if (top.has("plan")) {
    const Section p(top.at("plan"), "plan.", kPlanKeys);
    p.integer("rounds", config.plan.rounds);
    p.integer("train_per_round", config.plan.train_per_round);
    p.integer("val_per_round", config.plan.val_per_round);
    if (p.has("sampling")) {
      std::string sampling;
      p.string("sampling", sampling);
      config.plan.sampling =
          rethrow_as_config("plan.sampling", [&] { return parse_sampling(sampling); });
    }
    p.boolean("append_validation", config.plan.append_validation);
  }
  if (top.has("learners")) config.learners = learners_from_json(top.at("learners"));
  if (top.has("alpha")) {
    double alpha = 0.0;
    top.number("alpha", alpha);
    config.alpha = alpha;
  } else if (doc.contains("alpha") && doc.at("alpha").is_null()) {
    config.alpha.reset();
  }
  top.integer("folds", config.folds);
  if (top.has("lambda_grid")) config.lambda_grid = lambda_grid_from_json(top.at("lambda_grid"));
  top.number("base_lambda", config.base_lambda);
  top.integer("runs", config.runs);
  top.integer("test_size", config.test_size);
  top.integer("seed", config.seed);
  top.integer("threads", config.threads);
  top.string("output_dir", config.output_dir);
  config.validate();
  return config;
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what, std::string("malformed JSON: ") + e.what());
  }
}

// Set doc[a][b]... = value for a dotted key, creating objects on the way.
void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must look like key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) {
    value = raw;
  }
  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    json& child = (*node)[path[i]];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ConfigError(key, "cannot descend into a non-object");
    node = &child;
  }
  (*node)[path.back()] = std::move(value);
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"first-experiment", "table1-peaking", "table1-dipping", "table1-mnist"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.runs = 25;
  c.test_size = 10000;
  c.seed = 20200101;
  c.folds = 5;
  if (name == "first-experiment") {
    c.generator.kind = GeneratorKind::peaking;
    c.generator.d = 200;
    c.plan.rounds = 150;
    c.plan.train_per_round = 4;
    c.plan.val_per_round = 16;
    c.plan.append_validation = false;
    c.learners = {LearnerKind::standard, LearnerKind::mt_simple, LearnerKind::mt_ht};
    c.alpha = 0.05;
    return c;
  }
  const std::vector<LearnerKind> all{LearnerKind::standard, LearnerKind::mt_simple,
                                     LearnerKind::mt_ht, LearnerKind::mt_cv,
                                     LearnerKind::lambda_select};
  if (name == "table1-peaking" || name == "table1-dipping") {
    if (name == "table1-peaking") {
      c.generator.kind = GeneratorKind::peaking;
      c.generator.d = 500;
    } else {
      c.generator.kind = GeneratorKind::dipping;
      c.generator.d = 2 + c.generator.dipping.noise_dims;
    }
    c.plan.rounds = 150;
    c.plan.train_per_round = 10;
    c.plan.val_per_round = 40;
    c.plan.append_validation = true;
    c.learners = all;
    c.alpha = 0.05;
    c.lambda_grid = log10_grid(-5.0, 5.0, 0.5);
    return c;
  }
  if (name == "table1-mnist") {
    c.generator.kind = GeneratorKind::mnist;
    c.generator.mnist.features = 500;
    c.generator.mnist.bandwidth = 5.0;
    c.generator.d = c.generator.mnist.features;
    fill_mnist_defaults(c.generator.mnist);
    c.plan.rounds = 40;
    c.plan.train_per_round = 5;
    c.plan.val_per_round = 20;
    c.plan.sampling = Sampling::random;
    c.plan.append_validation = true;
    c.learners = all;
    c.alpha = 0.05;
    c.lambda_grid = log10_grid(-3.0, 3.0, 1.0);
    return c;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
}

ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  json doc = parse_json(text, "config");
  if (!doc.is_object()) {
    throw ConfigError("config", "expected an object, got " + type_name(doc));
  }
  for (const auto& o : overrides) {
    apply_override(doc, o);
  }
  return config_from_json(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  return parse_config(read_text_file(path), overrides);
}

std::string config_to_json(const ExperimentConfig& c) {
  json learners = json::array();
  for (auto kind : c.learners) learners.push_back(to_string(kind));
  json doc{{"name", c.name},
           {"generator", generator_to_json(c.generator)},
           {"plan",
            {{"rounds", c.plan.rounds},
             {"train_per_round", c.plan.train_per_round},
             {"val_per_round", c.plan.val_per_round},
             {"sampling", to_string(c.plan.sampling)},
             {"append_validation", c.plan.append_validation}}},
           {"learners", learners},
           {"alpha", c.alpha ? json(*c.alpha) : json(nullptr)},
           {"folds", c.folds},
           {"lambda_grid", c.lambda_grid},
           {"base_lambda", c.base_lambda},
           {"runs", c.runs},
           {"test_size", c.test_size},
           {"seed", c.seed},
           {"threads", c.threads},
           {"output_dir", c.output_dir}};
  return doc.dump(2) + "\n";
}

GeneratorSpec parse_generator_spec(std::string_view text) {
  const json doc = parse_json(text, "generator");
  GeneratorSpec spec = generator_from_json(doc, GeneratorSpec{}, "generator.");
  rethrow_as_config("generator", [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

GeneratorSpec load_generator_spec(const std::filesystem::path& path) {
  return parse_generator_spec(read_text_file(path));
}

std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(key, "not a number: '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError(key, "empty list");
  return values;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace monotone
