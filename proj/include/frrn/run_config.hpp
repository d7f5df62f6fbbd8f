#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>
#include <json.hpp>

#include "frrn/discriminator.hpp"
#include "frrn/losses.hpp"
#include "frrn/network.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Everything a training or inference run needs. Each field has a config
/// key of the same name (see config_keys()).
struct RunConfig {
  int resolution = 64;
  FrrnConfig network;
  DiscriminatorConfig discriminator;
  std::array<int, 4> style_widths{16, 32, 64, 64};
  LossWeights weights;
  double gen_lr = 1e-4;
  /// Negative means gen_lr / 10.
  double disc_lr = -1;
  double beta1 = 0.0;
  double beta2 = 0.9;
  int batch_size = 1;
  int iterations = 1000;
  std::uint64_t seed = 1;
  std::string data_dir;   // empty: synthetic images
  std::string mask_dir;   // empty: generated masks
  int synthetic_images = 8;
  std::string mask_bucket = "random";  // or a bucket such as "20-30"
  bool fixed_mask = false;             // generate one mask per image, reuse it
  std::string checkpoint = "frrn.ckpt";
  std::string log = "train_log.jsonl";
  int checkpoint_every = 100;

  double effective_disc_lr() const { return disc_lr < 0 ? gen_lr / 10.0 : disc_lr; }
  void validate() const;
};

/// Names of all settable keys, in a stable order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value; throws ConfigError on an unknown key
/// or unparsable value.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Current value of a key in the same textual form set_config_value accepts.
std::string get_config_value(const RunConfig& config, const std::string& key);

/// Parses "key = value" lines; '#' starts a comment. Later lines win.
std::map<std::string, std::string> parse_config_text(const std::string& text);

RunConfig load_config_file(const std::string& path);

/// Config echo stored in checkpoints: key -> textual value.
nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& json);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
