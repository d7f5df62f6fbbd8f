#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>
#include <json.hpp>

#include "frrn/checkpoint.hpp"
#include "frrn/losses.hpp"
#include "frrn/metrics.hpp"
#include "frrn/run_config.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// One line of the training log. `step` is NaN when the step loss is off.
struct IterationRecord {
  int iteration = 0;
  double rec = 0;
  double adv_g = 0;
  double adv_d = 0;
  double style = 0;
  double step = 0;
  double total = 0;
};

nlohmann::json to_json(const IterationRecord& record);

/// Generator, discriminator, frozen style extractor and both optimizers.
class Trainer {
 public:
  explicit Trainer(RunConfig config);

  /// One alternating iteration on a batch: discriminator update on the
  /// detached restoration, then generator update on the total loss.
  /// Throws NumericalError naming the first non-finite loss term; in that
  /// case the generator is left untouched.
  IterationRecord step(const Tensor& truth, const BinaryMask& mask);

  /// Restoration without recording gradients.
  InpaintTrajectory restore(const Tensor& damaged, const BinaryMask& mask) const;

  const RunConfig& config() const { return config_; }
  int iteration() const { return iteration_; }
  const FrrnParams& generator() const { return gen_; }
  const Discriminator& discriminator() const { return disc_; }

  /// Generator weights, discriminator weights and power-iteration vectors.
  ParameterSet checkpoint_tensors() const;
  void save(const std::filesystem::path& path) const;
  /// Loads weights; the checkpoint must match this trainer's config.
  void load(const Checkpoint& checkpoint);

 private:
  RunConfig config_;
  FrrnParams gen_;
  Discriminator disc_;
  StyleFeatureExtractor style_;
  ParameterSet gen_params_;
  ParameterSet disc_params_;
  AdamState gen_adam_;
  AdamState disc_adam_;
  int iteration_ = 0;
};

/// Builds a trainer from a checkpoint's config echo and loads its weights.
Trainer load_trainer(const std::filesystem::path& checkpoint);

struct TrainSummary {
  int iterations = 0;
  std::optional<IterationRecord> first;
  std::optional<IterationRecord> last;
};

/// Full training run: data from config.data_dir (or synthetic images),
/// masks from config.mask_dir (or generated). Writes the JSON-lines log and
/// the checkpoint every `checkpoint_every` iterations and at the end.
/// `progress`, when given, receives one short line per logged iteration.
TrainSummary train(const RunConfig& config, std::ostream* progress = nullptr);

struct InferOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path image;
  std::filesystem::path mask;
  std::filesystem::path out_dir;
  bool dump_steps = false;
  /// Resize inputs to the checkpoint resolution instead of rejecting a
  /// mismatch.
  bool resize = false;
};

struct InferResult {
  Tensor input;  // image as loaded
  BinaryMask mask;
  InpaintTrajectory trajectory;
  std::vector<std::filesystem::path> written;
};

/// Writes out_dir/final.png and, with dump_steps, step_XX.png / mask_XX.png
/// per dilation module (1-based, zero padded).
InferResult infer(const InferOptions& options);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data_dir;
  std::filesystem::path mask_dir;
  /// Optional JSON-lines file with one record per sample.
  std::filesystem::path records;
};

struct EvalResult {
  std::vector<MetricReport> reports;
  std::vector<BucketRow> rows;
  std::string csv;
};

/// Images are paired with the mask of the same file stem, or by sorted
/// order when no stems match and the counts agree.
EvalResult eval(const EvalOptions& options);

struct MaskStats {
  std::size_t hole_pixels = 0;
  double hole_ratio = 0;
  std::optional<MaskBucket> bucket;
  int max_inradius = 0;
  int required_modules = 0;
};

MaskStats mask_stats(const BinaryMask& mask);
std::string format_mask_stats(const MaskStats& stats);

struct GenDataOptions {
  std::filesystem::path out_dir;
  int count = 8;
  int resolution = 64;
  std::uint64_t seed = 1;
};

/// Writes out_dir/images/NNNN.png (synthetic) and out_dir/masks/NNNN.png
/// (generated, buckets cycling 10-20 .. 40-50).
void gen_data(const GenDataOptions& options);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
