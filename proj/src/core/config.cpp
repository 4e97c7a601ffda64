// Copyright 2026 The ombal Authors
// SPDX-License-Identifier: Apache-2.0

#include "ombal/core/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "ombal/core/toml.hpp"
#include "ombal/error.hpp"

namespace ombal {

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::quadratic: return "quadratic";
    case LossKind::logistic: return "logistic";
    case LossKind::trace: return "trace";
  }
  return "?";
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::random: return "random";
    case Strategy::round_robin: return "round_robin";
    case Strategy::accumulation: return "accumulation";
    case Strategy::dynamic: return "dynamic";
    case Strategy::uniform: return "uniform";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view name, const std::string& field) {
  for (auto k : {LossKind::quadratic, LossKind::logistic, LossKind::trace})
    if (to_string(k) == name) return k;
  throw ValidationError(field, "unknown loss kind '" + std::string(name) + "'");
}

Strategy parse_strategy(std::string_view name, const std::string& field) {
  for (auto s : {Strategy::random, Strategy::round_robin, Strategy::accumulation,
                 Strategy::dynamic, Strategy::uniform})
    if (to_string(s) == name) return s;
  throw ValidationError(field, "unknown strategy '" + std::string(name) + "'");
}

const TaskSpec* RunConfig::find_task(std::string_view id) const {
  for (const auto& t : tasks)
    if (t.id == id) return &t;
  return nullptr;
}

std::size_t RunConfig::task_index(std::string_view id) const {
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i].id == id) return i;
  throw ValidationError("task", "unknown task id '" + std::string(id) + "'");
}

namespace {

// Typed, consumption-tracking view over one table. finish() rejects every
// key that no getter asked for.
class Fields {
 public:
  Fields(const toml::Table& table, std::string prefix) : table_(table), prefix_(std::move(prefix)) {}

  std::string path(std::string_view key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
  }

  const toml::Value* find(std::string_view key) {
    auto it = table_.find(key);
    if (it == table_.end()) return nullptr;
    used_.insert(std::string(key));
    return &it->second;
  }

  const toml::Value& require(std::string_view key) {
    const auto* v = find(key);
    if (!v) throw ValidationError(path(key), "required key is missing");
    return *v;
  }

  void get(std::string_view key, double& out) {
    if (const auto* v = find(key)) out = as_double(*v, path(key));
  }
  void get(std::string_view key, std::optional<double>& out) {
    if (const auto* v = find(key)) out = as_double(*v, path(key));
  }
  void get(std::string_view key, std::uint64_t& out) {
    if (const auto* v = find(key)) out = as_count(*v, path(key));
  }
  void get(std::string_view key, std::optional<std::uint64_t>& out) {
    if (const auto* v = find(key)) out = as_count(*v, path(key));
  }
  void get(std::string_view key, std::string& out) {
    if (const auto* v = find(key)) out = as_string(*v, path(key));
  }
  void get(std::string_view key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_bool()) throw ValidationError(path(key), "expected a boolean");
      out = std::get<bool>(v->data);
    }
  }
  void get(std::string_view key, std::vector<double>& out) {
    if (const auto* v = find(key)) {
      out.clear();
      for (const auto& e : as_array(*v, path(key))) out.push_back(as_double(e, path(key)));
    }
  }
  void get(std::string_view key, std::vector<std::string>& out) {
    if (const auto* v = find(key)) {
      out.clear();
      for (const auto& e : as_array(*v, path(key))) out.push_back(as_string(e, path(key)));
    }
  }

  void finish() const {
    for (const auto& [k, v] : table_)
      if (!used_.contains(k)) throw ValidationError(path(k), "unknown key");
  }

  static double as_double(const toml::Value& v, const std::string& field) {
    if (v.is_float()) return std::get<double>(v.data);
    if (v.is_integer()) return static_cast<double>(std::get<std::int64_t>(v.data));
    throw ValidationError(field, std::string("expected a number, got ") + v.type_name());
  }
  static std::uint64_t as_count(const toml::Value& v, const std::string& field) {
    if (!v.is_integer()) throw ValidationError(field, std::string("expected an integer, got ") + v.type_name());
    auto i = std::get<std::int64_t>(v.data);
    if (i < 0) throw ValidationError(field, "must be non-negative");
    return static_cast<std::uint64_t>(i);
  }
  static const std::string& as_string(const toml::Value& v, const std::string& field) {
    if (!v.is_string()) throw ValidationError(field, std::string("expected a string, got ") + v.type_name());
    return std::get<std::string>(v.data);
  }
  static const toml::Array& as_array(const toml::Value& v, const std::string& field) {
    if (!v.is_array()) throw ValidationError(field, std::string("expected an array, got ") + v.type_name());
    return std::get<toml::Array>(v.data);
  }
  static const toml::Table& as_table(const toml::Value& v, const std::string& field) {
    if (!v.is_table()) throw ValidationError(field, std::string("expected a table, got ") + v.type_name());
    return std::get<toml::Table>(v.data);
  }

 private:
  const toml::Table& table_;
  std::string prefix_;
  std::set<std::string, std::less<>> used_;
};

TaskSpec read_task(const toml::Table& t, const std::string& prefix) {
  Fields f(t, prefix);
  TaskSpec task;
  task.id = Fields::as_string(f.require("id"), f.path("id"));
  if (Fields::as_count(f.require("volume"), f.path("volume")) == 0)
    throw ValidationError(f.path("volume"), "must be >= 1");
  task.volume = Fields::as_count(*f.find("volume"), f.path("volume"));
  task.train_batch = Fields::as_count(f.require("train_batch"), f.path("train_batch"));
  task.loss_kind = parse_loss_kind(Fields::as_string(f.require("loss_kind"), f.path("loss_kind")),
                                   f.path("loss_kind"));
  task.val_batch = task.train_batch;
  f.get("val_batch", task.val_batch);
  f.get("val_steps", task.val_steps);
  f.get("dim", task.dim);
  f.get("curvature", task.curvature);
  f.get("center", task.center);
  f.get("noise", task.noise);
  f.get("init", task.init);
  f.get("label_noise", task.label_noise);
  f.get("feature_scale", task.feature_scale);
  f.get("trace", task.trace);
  f.get("groups", task.groups);
  f.get("noise_seed", task.noise_seed);
  f.finish();
  return task;
}

WeightSetting read_weights(const toml::Value& v, const std::string& field) {
  WeightSetting w;
  if (v.is_string()) {
    const auto& s = std::get<std::string>(v.data);
    if (s == "uniform") w.mode = WeightMode::uniform;
    else if (s == "calibrated") w.mode = WeightMode::calibrated;
    else if (s == "auto") w.mode = WeightMode::automatic;
    else throw ValidationError(field, "expected \"auto\", \"uniform\", \"calibrated\" or a list");
    return w;
  }
  w.mode = WeightMode::fixed;
  for (const auto& e : Fields::as_array(v, field)) w.values.push_back(Fields::as_double(e, field));
  return w;
}

StageSpec read_stage(const toml::Table& t, std::int64_t id, const std::string& prefix) {
  Fields f(t, prefix);
  StageSpec s;
  s.id = id;
  f.get("trainable", s.trainable);
  f.get("tasks", s.tasks);
  f.get("lr", s.lr);
  f.get("lr_encoders", s.lr_encoders);
  f.get("epochs", s.epochs);
  f.get("max_steps", s.max_steps);
  if (const auto* v = f.find("strategy"))
    s.strategy = parse_strategy(Fields::as_string(*v, f.path("strategy")), f.path("strategy"));
  f.get("text_ratio", s.text_ratio);
  if (const auto* v = f.find("weights")) s.weights = read_weights(*v, f.path("weights"));
  f.finish();
  return s;
}

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void validate(const RunConfig& c) {
  check(!c.tasks.empty(), "tasks", "at least one task is required");
  check(finite(c.eta) && c.eta > 0, "eta", "must be > 0");
  check(finite(c.alpha_scale) && c.alpha_scale > 0, "alpha_scale", "must be > 0");
  check(c.ema_alpha >= 0 && c.ema_alpha < 1, "ema_alpha", "must be in [0, 1)");
  check(c.window_h >= 2, "window_h", "must be >= 2");
  check(finite(c.scale_f) && c.scale_f > 0, "scale_f", "must be > 0");
  check(finite(c.eps) && c.eps > 0, "eps", "must be > 0");
  check(c.val_interval >= 1, "val_interval", "must be >= 1");
  check(c.text_ratio >= 0 && c.text_ratio <= 1, "text_ratio", "must be in [0, 1]");
  check(finite(c.lambda_it) && c.lambda_it >= 0, "lambda_it", "must be >= 0");
  check(finite(c.dpo_beta) && c.dpo_beta > 0, "dpo_beta", "must be > 0");
  check(c.max_calib_steps >= 1, "max_calib_steps", "must be >= 1");
  check(c.subset_fraction > 0 && c.subset_fraction <= 1, "subset_fraction", "must be in (0, 1]");
  check(finite(c.calib_tol) && c.calib_tol > 0, "calib_tol", "must be > 0");
  check(c.calib_patience >= 1, "calib_patience", "must be >= 1");

  std::set<std::string, std::less<>> group_names;
  for (std::size_t g = 0; g < c.groups.size(); ++g) {
    const auto& grp = c.groups[g];
    const std::string p = "groups." + grp.name;
    check(!grp.name.empty(), "groups", "group names must be non-empty");
    check(group_names.insert(grp.name).second, p, "duplicate group");
    check(grp.dim >= 1, p + ".dim", "must be >= 1");
    check(finite(grp.init), p + ".init", "must be finite");
    check(finite(grp.lr_scale) && grp.lr_scale >= 0, p + ".lr_scale", "must be >= 0");
  }

  std::set<std::string, std::less<>> ids;
  for (std::size_t i = 0; i < c.tasks.size(); ++i) {
    const auto& t = c.tasks[i];
    const std::string p = "tasks[" + std::to_string(i) + "]";
    check(!t.id.empty(), p + ".id", "must be non-empty");
    check(ids.insert(t.id).second, p + ".id", "duplicate task id '" + t.id + "'");
    check(t.volume >= 1, p + ".volume", "must be >= 1");
    check(t.train_batch >= 1, p + ".train_batch", "must be >= 1");
    check(t.val_batch >= 1, p + ".val_batch", "must be >= 1");
    check(t.val_steps >= 1, p + ".val_steps", "must be >= 1");
    check(t.volume >= t.val_reservoir() + t.train_batch, p + ".volume",
          "must cover the validation reservoir (val_steps * val_batch) plus one training batch");
    check(t.dim >= 1, p + ".dim", "must be >= 1");
    check(finite(t.init), p + ".init", "must be finite");
    switch (t.loss_kind) {
      case LossKind::quadratic:
        check(finite(t.curvature) && t.curvature > 0, p + ".curvature", "must be > 0");
        check(finite(t.center), p + ".center", "must be finite");
        check(finite(t.noise) && t.noise >= 0, p + ".noise", "must be >= 0");
        break;
      case LossKind::logistic:
        check(t.label_noise >= 0 && t.label_noise <= 0.5, p + ".label_noise", "must be in [0, 0.5]");
        check(finite(t.feature_scale) && t.feature_scale > 0, p + ".feature_scale", "must be > 0");
        break;
      case LossKind::trace:
        check(!t.trace.empty(), p + ".trace", "trace tasks need a non-empty loss sequence");
        for (double v : t.trace) check(finite(v) && v >= 0, p + ".trace", "entries must be finite and >= 0");
        break;
    }
    if (c.groups.empty()) {
      check(t.groups.empty(), p + ".groups", "no [groups] are declared");
    } else {
      check(!t.groups.empty(), p + ".groups", "must name at least one group");
      for (const auto& g : t.groups) {
        auto it = std::find_if(c.groups.begin(), c.groups.end(), [&](auto& x) { return x.name == g; });
        check(it != c.groups.end(), p + ".groups", "unknown group '" + g + "'");
        check(it->dim == t.dim, p + ".dim", "must equal the dim of group '" + g + "'");
      }
    }
  }
  if (!c.text_task.empty())
    check(c.find_task(c.text_task) != nullptr, "text_task", "unknown task id '" + c.text_task + "'");

  std::set<std::int64_t> stage_ids;
  for (const auto& s : c.stages) {
    const std::string p = "stage." + std::to_string(s.id);
    check(stage_ids.insert(s.id).second, p, "duplicate stage");
    check(s.epochs.has_value() != s.max_steps.has_value(), p, "exactly one of epochs, max_steps must be set");
    if (s.lr) check(finite(*s.lr) && *s.lr > 0, p + ".lr", "must be > 0");
    if (s.lr_encoders) check(finite(*s.lr_encoders) && *s.lr_encoders >= 0, p + ".lr_encoders", "must be >= 0");
    if (s.text_ratio) check(*s.text_ratio >= 0 && *s.text_ratio <= 1, p + ".text_ratio", "must be in [0, 1]");
    for (const auto& g : s.trainable) {
      bool known = c.groups.empty() ? c.find_task(g) != nullptr : group_names.contains(g);
      check(known, p + ".trainable", "unknown group '" + g + "'");
    }
    std::size_t active = 0;
    for (const auto& id : s.tasks) check(c.find_task(id) != nullptr, p + ".tasks", "unknown task '" + id + "'");
    for (const auto& t : c.tasks) {
      bool in_stage = s.tasks.empty() || std::find(s.tasks.begin(), s.tasks.end(), t.id) != s.tasks.end();
      if (in_stage && t.id != c.text_task) ++active;
    }
    check(active >= 1, p + ".tasks", "needs at least one non-text task");
    if (s.weights.mode == WeightMode::fixed) {
      check(s.weights.values.size() == active, p + ".weights",
            "expected " + std::to_string(active) + " weights");
      for (double w : s.weights.values) check(finite(w) && w > 0, p + ".weights", "must be > 0");
    }
  }
}

RunConfig parse_config(std::string_view text) {
  const toml::Table root = toml::parse(text);
  Fields f(root, "");
  RunConfig c;

  const auto& tasks_value = f.require("tasks");
  for (std::size_t i = 0; const auto& tv : Fields::as_array(tasks_value, "tasks")) {
    const std::string p = "tasks[" + std::to_string(i++) + "]";
    c.tasks.push_back(read_task(Fields::as_table(tv, p), p));
  }
  if (const auto* v = f.find("seed")) {
    // Seeds above INT64_MAX are written as decimal strings.
    if (v->is_string()) {
      const auto& s = std::get<std::string>(v->data);
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), c.seed);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError("seed", "expected an unsigned integer");
    } else {
      c.seed = Fields::as_count(*v, "seed");
    }
  }
  f.get("eta", c.eta);
  f.get("alpha_scale", c.alpha_scale);
  f.get("ema_alpha", c.ema_alpha);
  f.get("window_h", c.window_h);
  f.get("scale_f", c.scale_f);
  f.get("eps", c.eps);
  f.get("val_interval", c.val_interval);
  f.get("text_ratio", c.text_ratio);
  f.get("lambda_it", c.lambda_it);
  f.get("dpo_beta", c.dpo_beta);
  if (const auto* v = f.find("strategy"))
    c.strategy = parse_strategy(Fields::as_string(*v, "strategy"));
  f.get("max_steps", c.max_steps);
  f.get("max_calib_steps", c.max_calib_steps);
  f.get("subset_fraction", c.subset_fraction);
  f.get("calib_tol", c.calib_tol);
  f.get("calib_patience", c.calib_patience);
  f.get("text_task", c.text_task);

  if (const auto* gv = f.find("groups")) {
    for (const auto& [name, body] : Fields::as_table(*gv, "groups")) {
      const std::string p = "groups." + name;
      Fields g(Fields::as_table(body, p), p);
      GroupSpec grp;
      grp.name = name;
      g.get("dim", grp.dim);
      g.get("init", grp.init);
      g.get("lr_scale", grp.lr_scale);
      g.get("encoder", grp.encoder);
      g.finish();
      c.groups.push_back(grp);
    }
  }
  if (const auto* sv = f.find("stage")) {
    for (const auto& [name, body] : Fields::as_table(*sv, "stage")) {
      const std::string p = "stage." + name;
      std::int64_t id = 0;
      auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), id);
      if (ec != std::errc() || ptr != name.data() + name.size())
        throw ValidationError(p, "stage tables must be named [stage.<integer>]");
      c.stages.push_back(read_stage(Fields::as_table(body, p), id, p));
    }
    std::sort(c.stages.begin(), c.stages.end(), [](auto& a, auto& b) { return a.id < b.id; });
  }
  f.finish();

  // Tasks bound to explicit groups take their dimension from them and read
  // every group unless they list a subset.
  if (!c.groups.empty()) {
    for (std::size_t i = 0; i < c.tasks.size(); ++i) {
      auto& t = c.tasks[i];
      const std::string p = "tasks[" + std::to_string(i) + "]";
      const toml::Table& raw = std::get<toml::Table>(std::get<toml::Array>(tasks_value.data)[i].data);
      if (raw.contains("init")) throw ValidationError(p + ".init", "set init on the groups instead");
      if (t.groups.empty())
        for (const auto& g : c.groups) t.groups.push_back(g.name);
      if (!raw.contains("dim")) {
        auto it = std::find_if(c.groups.begin(), c.groups.end(), [&](auto& g) { return g.name == t.groups.front(); });
        if (it != c.groups.end()) t.dim = it->dim;
      }
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

template <typename T, typename F>
std::string list(const std::vector<T>& v, F&& fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out + "]";
}

std::string strings(const std::vector<std::string>& v) {
  return list(v, [](const std::string& s) { return toml::quote(s); });
}
std::string floats(const std::vector<double>& v) { return list(v, toml::format_float); }

}  // namespace

std::string serialize(const RunConfig& c) {
  std::ostringstream o;
  auto f = toml::format_float;
  if (c.seed > static_cast<std::uint64_t>(INT64_MAX))
    o << "seed = \"" << c.seed << "\"\n";
  else
    o << "seed = " << c.seed << "\n";
  o
    << "eta = " << f(c.eta) << "\n"
    << "alpha_scale = " << f(c.alpha_scale) << "\n"
    << "ema_alpha = " << f(c.ema_alpha) << "\n"
    << "window_h = " << c.window_h << "\n"
    << "scale_f = " << f(c.scale_f) << "\n"
    << "eps = " << f(c.eps) << "\n"
    << "val_interval = " << c.val_interval << "\n"
    << "text_ratio = " << f(c.text_ratio) << "\n"
    << "lambda_it = " << f(c.lambda_it) << "\n"
    << "dpo_beta = " << f(c.dpo_beta) << "\n"
    << "strategy = " << toml::quote(to_string(c.strategy)) << "\n"
    << "max_steps = " << c.max_steps << "\n"
    << "max_calib_steps = " << c.max_calib_steps << "\n"
    << "subset_fraction = " << f(c.subset_fraction) << "\n"
    << "calib_tol = " << f(c.calib_tol) << "\n"
    << "calib_patience = " << c.calib_patience << "\n"
    << "text_task = " << toml::quote(c.text_task) << "\n";

  for (const auto& t : c.tasks) {
    o << "\n[[tasks]]\n"
      << "id = " << toml::quote(t.id) << "\n"
      << "volume = " << t.volume << "\n"
      << "train_batch = " << t.train_batch << "\n"
      << "val_batch = " << t.val_batch << "\n"
      << "val_steps = " << t.val_steps << "\n"
      << "loss_kind = " << toml::quote(to_string(t.loss_kind)) << "\n"
      << "dim = " << t.dim << "\n"
      << "curvature = " << f(t.curvature) << "\n"
      << "center = " << f(t.center) << "\n"
      << "noise = " << f(t.noise) << "\n";
    if (c.groups.empty()) o << "init = " << f(t.init) << "\n";
    o << "label_noise = " << f(t.label_noise) << "\n"
      << "feature_scale = " << f(t.feature_scale) << "\n";
    if (!t.trace.empty()) o << "trace = " << floats(t.trace) << "\n";
    if (!t.groups.empty()) o << "groups = " << strings(t.groups) << "\n";
    if (t.noise_seed) o << "noise_seed = " << *t.noise_seed << "\n";
  }
  for (const auto& g : c.groups) {
    o << "\n[groups." << g.name << "]\n"
      << "dim = " << g.dim << "\n"
      << "init = " << f(g.init) << "\n"
      << "lr_scale = " << f(g.lr_scale) << "\n"
      << "encoder = " << (g.encoder ? "true" : "false") << "\n";
  }
  for (const auto& s : c.stages) {
    o << "\n[stage." << s.id << "]\n";
    if (!s.trainable.empty()) o << "trainable = " << strings(s.trainable) << "\n";
    if (!s.tasks.empty()) o << "tasks = " << strings(s.tasks) << "\n";
    if (s.lr) o << "lr = " << f(*s.lr) << "\n";
    if (s.lr_encoders) o << "lr_encoders = " << f(*s.lr_encoders) << "\n";
    if (s.epochs) o << "epochs = " << *s.epochs << "\n";
    if (s.max_steps) o << "max_steps = " << *s.max_steps << "\n";
    if (s.strategy) o << "strategy = " << toml::quote(to_string(*s.strategy)) << "\n";
    if (s.text_ratio) o << "text_ratio = " << f(*s.text_ratio) << "\n";
    switch (s.weights.mode) {
      case WeightMode::automatic: break;
      case WeightMode::uniform: o << "weights = \"uniform\"\n"; break;
      case WeightMode::calibrated: o << "weights = \"calibrated\"\n"; break;
      case WeightMode::fixed: o << "weights = " << floats(s.weights.values) << "\n"; break;
    }
  }
  return o.str();
}

void apply_seed_override(RunConfig& config, std::optional<std::uint64_t> cli_seed) {
  if (cli_seed) {
    config.seed = *cli_seed;
    return;
  }
  if (const char* env = std::getenv("OMBAL_SEED")) {
    std::string_view s(env);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw ValidationError("OMBAL_SEED", "expected an unsigned integer, got '" + std::string(s) + "'");
    config.seed = v;
  }
}

}  // namespace ombal
