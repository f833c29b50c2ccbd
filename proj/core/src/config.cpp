#include "fwus/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include "fwus/csv.hpp"
#include "fwus/error.hpp"

namespace fwus {
namespace {

struct Field {
  std::function<void(ScenarioConfig&, const YAML::Node&)> read;
  std::function<void(const ScenarioConfig&, YAML::Emitter&)> write;
};

template <class T>
void emit(YAML::Emitter& e, const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    e << format_number(v);
  } else {
    e << v;
  }
}

template <class T, class Get>
Field scalar(Get get) {
  return {[get](ScenarioConfig& c, const YAML::Node& n) { get(c) = n.as<T>(); },
          [get](const ScenarioConfig& c, YAML::Emitter& e) { emit(e, get(const_cast<ScenarioConfig&>(c))); }};
}

#define FWUS_FIELD(T, path) scalar<T>([](ScenarioConfig& c) -> T& { return c.path; })

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> f;
    f["lambda_E"] = FWUS_FIELD(double, lambda_E);
    f["lambda_E_schedule"] = {
        [](ScenarioConfig& c, const YAML::Node& n) {
          c.lambda_E_schedule.clear();
          for (const auto& step : n) {
            if (!step.IsSequence() || step.size() != 2) throw YAML::Exception(n.Mark(), "expected [start_slot, lambda_E] pairs");
            c.lambda_E_schedule.push_back({step[0].as<std::int64_t>(), step[1].as<double>()});
          }
        },
        [](const ScenarioConfig& c, YAML::Emitter& e) {
          e << YAML::Flow << YAML::BeginSeq;
          for (const auto& s : c.lambda_E_schedule) e << YAML::BeginSeq << s.start_slot << format_number(s.lambda_E) << YAML::EndSeq;
          e << YAML::EndSeq;
        }};
    f["lambda_M"] = FWUS_FIELD(double, lambda_M);
    f["region_radius"] = FWUS_FIELD(double, region_radius);
    f["guard_margin"] = FWUS_FIELD(double, guard_margin);
    f["device_count"] = {
        [](ScenarioConfig& c, const YAML::Node& n) {
          if (n.IsNull()) c.device_count_override.reset();
          else c.device_count_override = n.as<int>();
        },
        [](const ScenarioConfig& c, YAML::Emitter& e) {
          if (c.device_count_override) e << *c.device_count_override;
          else e << YAML::Null;
        }};
    f["jacobian_form"] = FWUS_FIELD(bool, jacobian_form);
    f["q_range"] = {
        [](ScenarioConfig& c, const YAML::Node& n) {
          if (!n.IsSequence() || n.size() != 2) throw YAML::Exception(n.Mark(), "q_range must be [lo, hi]");
          c.q_lo = n[0].as<double>();
          c.q_hi = n[1].as<double>();
        },
        [](const ScenarioConfig& c, YAML::Emitter& e) {
          e << YAML::Flow << YAML::BeginSeq << format_number(c.q_lo) << format_number(c.q_hi) << YAML::EndSeq;
        }};
    f["q_cap"] = FWUS_FIELD(double, q_cap);
    f["rate_active"] = FWUS_FIELD(double, rate_active);
    f["rate_idle"] = FWUS_FIELD(double, rate_idle);
    f["horizon"] = FWUS_FIELD(std::int64_t, horizon);
    f["tti_ms"] = FWUS_FIELD(double, tti_ms);

    f["wakeup.t1"] = FWUS_FIELD(double, wakeup.t1);
    f["wakeup.t2"] = FWUS_FIELD(double, wakeup.t2);
    f["wakeup.t3"] = FWUS_FIELD(double, wakeup.t3);
    f["wakeup.t4"] = FWUS_FIELD(double, wakeup.t4);
    f["wakeup.t_u"] = FWUS_FIELD(double, wakeup.t_u);
    f["wakeup.t_pd"] = FWUS_FIELD(double, wakeup.t_pd);
    f["wakeup.pw1"] = FWUS_FIELD(double, wakeup.pw1);
    f["wakeup.pw2"] = FWUS_FIELD(double, wakeup.pw2);
    f["wakeup.pw3"] = FWUS_FIELD(double, wakeup.pw3);
    f["wakeup.pw4"] = FWUS_FIELD(double, wakeup.pw4);
    f["wakeup.p_md"] = FWUS_FIELD(double, wakeup.p_md);
    f["wakeup.p_f"] = FWUS_FIELD(double, wakeup.p_f);
    f["wakeup.t_mac"] = FWUS_FIELD(double, wakeup.t_mac);
    f["wakeup.t_on"] = FWUS_FIELD(double, wakeup.t_on);
    f["wakeup.delay_budget"] = FWUS_FIELD(double, wakeup.delay_budget);
    f["wakeup.t4_max"] = FWUS_FIELD(double, wakeup.t4_max);
    f["wakeup.delay_mean_residual"] = FWUS_FIELD(bool, wakeup.delay_mean_residual);

    f["train.hidden_size"] = FWUS_FIELD(int, train.hidden_size);
    f["train.learning_rate"] = FWUS_FIELD(double, train.learning_rate);
    f["train.max_epochs"] = FWUS_FIELD(int, train.max_epochs);
    f["train.patience"] = FWUS_FIELD(int, train.patience);
    f["train.train_fraction"] = FWUS_FIELD(double, train.train_fraction);
    f["train.validation_fraction"] = FWUS_FIELD(double, train.validation_fraction);
    f["train.test_fraction"] = FWUS_FIELD(double, train.test_fraction);
    f["train.window"] = FWUS_FIELD(int, train.window);
    f["train.batch_size"] = FWUS_FIELD(int, train.batch_size);
    f["train.beta1"] = FWUS_FIELD(double, train.beta1);
    f["train.beta2"] = FWUS_FIELD(double, train.beta2);
    f["train.epsilon"] = FWUS_FIELD(double, train.epsilon);
    f["train.seed"] = FWUS_FIELD(std::uint64_t, train.seed);

    f["train_packets"] = FWUS_FIELD(std::uint64_t, train_packets);
    f["train_horizon_max"] = FWUS_FIELD(std::int64_t, train_horizon_max);
    f["train_devices"] = FWUS_FIELD(int, train_devices);
    f["retrain_per_run"] = FWUS_FIELD(bool, retrain_per_run);
    f["power_window"] = FWUS_FIELD(std::int64_t, power_window);
    f["recalibration_period"] = FWUS_FIELD(std::int64_t, recalibration_period);
    f["recalibration_history"] = FWUS_FIELD(std::size_t, recalibration_history);
    f["finetune_epochs"] = FWUS_FIELD(int, finetune_epochs);
    f["runs"] = FWUS_FIELD(int, runs);
    f["workers"] = FWUS_FIELD(int, workers);
    f["master_seed"] = FWUS_FIELD(std::uint64_t, master_seed);
    f["output_dir"] = {[](ScenarioConfig& c, const YAML::Node& n) { c.output_dir = n.as<std::string>(); },
                       [](const ScenarioConfig& c, YAML::Emitter& e) { e << c.output_dir.string(); }};
    f["verbose"] = FWUS_FIELD(bool, verbose);
    return f;
  }();
  return table;
}

#undef FWUS_FIELD

[[noreturn]] void unknown_key(const std::string& key) {
  std::string msg = "unknown config key '" + key + "'; valid keys:";
  for (const auto& k : config_keys()) msg += " " + k;
  fail(ErrorCode::kConfig, msg);
}

void apply(ScenarioConfig& cfg, const std::string& key, const YAML::Node& value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) unknown_key(key);
  try {
    it->second.read(cfg, value);
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::kConfig, "bad value for '" + key + "': " + e.msg);
  }
}

void config_error(const std::string& what) { fail(ErrorCode::kConfig, "invalid config: " + what); }

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : fields()) keys.push_back(k);
  return keys;
}

void ScenarioConfig::validate() const {
  if (!(lambda_E >= 0.0)) config_error("lambda_E must be >= 0");
  if (!(lambda_M > 0.0)) config_error("lambda_M must be > 0");
  if (!(region_radius > 0.0)) config_error("region_radius must be > 0");
  if (!(guard_margin >= 0.0)) config_error("guard_margin must be >= 0");
  if (device_count_override && *device_count_override < 1) config_error("device_count must be >= 1");
  if (!(q_lo >= 0.0 && q_lo < 1.0 && q_hi <= 1.0 && q_lo <= q_hi)) {
    config_error("q_range must satisfy 0 <= lo <= hi <= 1 with lo < 1");
  }
  if (!(q_cap >= 0.0 && q_cap < 1.0)) config_error("q_cap must lie in [0, 1)");
  if (!(rate_active >= 0.0) || !(rate_idle >= 0.0)) config_error("packet rates must be >= 0");
  if (horizon < 1) config_error("horizon must be >= 1");
  if (!(tti_ms > 0.0)) config_error("tti_ms must be > 0");
  if (train_devices < 1) config_error("train_devices must be >= 1");
  if (train_horizon_max < 1) config_error("train_horizon_max must be >= 1");
  if (power_window < 1) config_error("power_window must be >= 1");
  if (recalibration_period < 1) config_error("recalibration_period must be >= 1");
  if (finetune_epochs < 0) config_error("finetune_epochs must be >= 0");
  if (runs < 1) config_error("runs must be >= 1");
  if (workers < 1) config_error("workers must be >= 1");
  for (std::size_t k = 1; k < lambda_E_schedule.size(); ++k) {
    if (lambda_E_schedule[k].start_slot <= lambda_E_schedule[k - 1].start_slot) {
      fail(ErrorCode::kUnsortedSchedule, "lambda_E_schedule start slots must be strictly increasing");
    }
  }
  try {
    wakeup.validate();
    train.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::kConfig, std::string("malformed config: ") + e.what());
  }
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  if (!root.IsMap()) fail(ErrorCode::kConfig, "config must be a key/value mapping");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if ((key == "wakeup" || key == "train") && kv.second.IsMap()) {
      for (const auto& inner : kv.second) apply(cfg, key + "." + inner.first.as<std::string>(), inner.second);
    } else {
      apply(cfg, key, kv.second);
    }
  }
  cfg.validate();
  if (cfg.wakeup.t3 != 1.0) spdlog::warn("inactivity timer t3 = {} TTI will be overridden to 1 TTI", cfg.wakeup.t3);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  std::string section;
  for (const auto& [key, field] : fields()) {
    const auto dot = key.find('.');
    const std::string sec = dot == std::string::npos ? std::string{} : key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) e << YAML::EndMap;
      if (!sec.empty()) e << YAML::Key << sec << YAML::Value << YAML::BeginMap;
      section = sec;
    }
    e << YAML::Key << (dot == std::string::npos ? key : key.substr(dot + 1)) << YAML::Value;
    field.write(cfg, e);
  }
  if (!section.empty()) e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace fwus
