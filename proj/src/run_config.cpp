#include "frrn/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "frrn/errors.hpp"
#include "frrn/metrics.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    return false;
  }
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

template <std::size_t N>
std::array<int, N> parse_ints(const std::string& key, const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    items.push_back(trim(item));
  }
  if (items.size() != N) {
    throw ConfigError("config key '" + key + "': expected " + std::to_string(N) +
                      " comma-separated integers, got '" + text + "'");
  }
  std::array<int, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = parse_number<int>(key, items[i]);
  }
  return out;
}

template <std::size_t N>
std::string join(const std::array<int, N>& v) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) {
    out += (i ? "," : "") + std::to_string(v[i]);
  }
  return out;
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string flag(bool v) { return v ? "true" : "false"; }

struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field int_field(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_number<T>(k, v);
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(double RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_number<double>(k, v);
          },
          [member](const RunConfig& c) { return num(c.*member); }};
}

Field string_field(std::string RunConfig::*member) {
  return {[member](RunConfig& c, const std::string&, const std::string& v) { c.*member = v; },
          [member](const RunConfig& c) { return c.*member; }};
}

Field bool_field(bool RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_bool(k, v);
          },
          [member](const RunConfig& c) { return flag(c.*member); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"resolution", int_field(&RunConfig::resolution)},
      {"blocks_per_dilation",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.network.blocks_per_dilation = parse_number<int>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.network.blocks_per_dilation); }}},
      {"num_dilation_modules",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.network.num_dilation_modules = parse_number<int>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.network.num_dilation_modules); }}},
      {"full_width",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.network.widths.full = parse_number<int>(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.network.widths.full); }}},
      {"low_widths",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.network.widths.low = parse_ints<3>(k, v);
        },
        [](const RunConfig& c) { return join(c.network.widths.low); }}},
      {"use_step_loss",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.network.use_step_loss = parse_bool(k, v);
        },
        [](const RunConfig& c) { return flag(c.network.use_step_loss); }}},
      {"full_res_enabled",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.network.full_res_enabled = parse_bool(k, v);
        },
        [](const RunConfig& c) { return flag(c.network.full_res_enabled); }}},
      {"fill_remaining_holes",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.network.fill_remaining_holes = parse_bool(k, v);
        },
        [](const RunConfig& c) { return flag(c.network.fill_remaining_holes); }}},
      {"disc_widths",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.discriminator.widths = parse_ints<5>(k, v);
        },
        [](const RunConfig& c) { return join(c.discriminator.widths); }}},
      {"style_widths",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.style_widths = parse_ints<4>(k, v);
        },
        [](const RunConfig& c) { return join(c.style_widths); }}},
      {"weight_rec",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.weights.rec = parse_number<double>(k, v);
        },
        [](const RunConfig& c) { return num(c.weights.rec); }}},
      {"weight_adv",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.weights.adv = parse_number<double>(k, v);
        },
        [](const RunConfig& c) { return num(c.weights.adv); }}},
      {"weight_style",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.weights.style = parse_number<double>(k, v);
        },
        [](const RunConfig& c) { return num(c.weights.style); }}},
      {"weight_step",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.weights.step = parse_number<double>(k, v);
        },
        [](const RunConfig& c) { return num(c.weights.step); }}},
      {"gen_lr", double_field(&RunConfig::gen_lr)},
      {"disc_lr", double_field(&RunConfig::disc_lr)},
      {"beta1", double_field(&RunConfig::beta1)},
      {"beta2", double_field(&RunConfig::beta2)},
      {"batch_size", int_field(&RunConfig::batch_size)},
      {"iterations", int_field(&RunConfig::iterations)},
      {"seed", int_field(&RunConfig::seed)},
      {"data_dir", string_field(&RunConfig::data_dir)},
      {"mask_dir", string_field(&RunConfig::mask_dir)},
      {"synthetic_images", int_field(&RunConfig::synthetic_images)},
      {"mask_bucket", string_field(&RunConfig::mask_bucket)},
      {"fixed_mask", bool_field(&RunConfig::fixed_mask)},
      {"checkpoint", string_field(&RunConfig::checkpoint)},
      {"log", string_field(&RunConfig::log)},
      {"checkpoint_every", int_field(&RunConfig::checkpoint_every)},
  };
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) {
      return f;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw ConfigError(what);
    }
  };
  require(resolution > 0 && resolution % 8 == 0,
          "resolution must be a positive multiple of 8, got " + std::to_string(resolution));
  // five stride-2 layers in the discriminator
  require(resolution % 32 == 0,
          "resolution must be a multiple of 32 for the patch discriminator, got " +
              std::to_string(resolution));
  try {
    network.validate();
    weights.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (int w : discriminator.widths) {
    require(w > 0, "disc_widths must be positive");
  }
  require(discriminator.widths[4] == 1, "the last disc_widths entry must be 1 (patch logits)");
  for (int w : style_widths) {
    require(w > 0, "style_widths must be positive");
  }
  require(gen_lr > 0, "gen_lr must be positive");
  require(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1, "betas must lie in [0, 1)");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(iterations >= 0, "iterations must be >= 0");
  require(synthetic_images >= 1, "synthetic_images must be >= 1");
  require(checkpoint_every >= 1, "checkpoint_every must be >= 1");
  if (mask_bucket != "random") {
    try {
      parse_bucket(mask_bucket);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("mask_bucket: ") + e.what());
    }
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& entry : fields()) {
      out.push_back(entry.first);
    }
    return out;
  }();
  return keys;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  field(key).set(config, key, trim(value));
}

std::string get_config_value(const RunConfig& config, const std::string& key) {
  return field(key).get(config);
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    out[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return out;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig config;
  for (const auto& [key, value] : parse_config_text(buf.str())) {
    set_config_value(config, key, value);
  }
  return config;
}

nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& key : config_keys()) {
    out[key] = get_config_value(config, key);
  }
  return out;
}

RunConfig config_from_json(const nlohmann::json& json) {
  RunConfig config;
  for (const auto& [key, value] : json.items()) {
    set_config_value(config, key, value.is_string() ? value.get<std::string>() : value.dump());
  }
  return config;
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
