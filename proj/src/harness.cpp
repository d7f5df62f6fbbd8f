#include "frrn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include "frrn/errors.hpp"
#include "frrn/image_io.hpp"
#include "frrn/mask_gen.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace fs = std::filesystem;

namespace {

// Independent seeds for the model components.
std::uint64_t component_seed(std::uint64_t seed, std::uint64_t stream) {
  return Rng(seed).fork(stream).next_u64();
}

double checked(const Tensor& t, const char* term, int iteration) {
  const double v = t.item();
  if (!std::isfinite(v)) {
    throw NumericalError("non-finite " + std::string(term) + " loss (" + std::to_string(v) +
                         ") at iteration " + std::to_string(iteration));
  }
  return v;
}

nlohmann::json number_or_null(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%02zu.png", prefix, i);
  return buf;
}

}  // namespace

nlohmann::json to_json(const IterationRecord& r) {
  return {{"iteration", r.iteration}, {"rec", r.rec},          {"adv_g", r.adv_g},
          {"adv_d", r.adv_d},         {"style", r.style},      {"step", number_or_null(r.step)},
          {"total", r.total}};
}

Trainer::Trainer(RunConfig config)
    : config_(std::move(config)),
      gen_adam_(AdamOptions{config_.gen_lr, config_.beta1, config_.beta2, 1e-8}),
      disc_adam_(AdamOptions{config_.effective_disc_lr(), config_.beta1, config_.beta2, 1e-8}) {
  config_.validate();
  gen_ = FrrnParams::create(config_.network, component_seed(config_.seed, 0));
  disc_ = Discriminator::create(config_.discriminator, component_seed(config_.seed, 1));
  style_ = StyleFeatureExtractor::random(component_seed(config_.seed, 2), config_.style_widths);
  gen_params_ = gen_.parameters();
  disc_params_ = disc_.parameters();
}

IterationRecord Trainer::step(const Tensor& truth, const BinaryMask& mask) {
  const int it = iteration_ + 1;
  IterationRecord rec;
  rec.iteration = it;
  const Tensor damaged = damage(truth, mask);

  Tape gen_tape;
  TapeScope gen_scope(gen_tape);
  const InpaintTrajectory traj = frrn_forward(damaged, mask, gen_);
  const Tensor& restored = traj.final_image();

  disc_.spectral_norm_update();
  {
    Tape disc_tape;
    TapeScope disc_scope(disc_tape);
    const Tensor d_loss =
        discriminator_loss_from_logits(disc_.forward(truth), disc_.forward(restored.detach()));
    rec.adv_d = checked(d_loss, "adv_d", it);
    backward(d_loss, disc_tape);
    adam_step(disc_params_, disc_adam_);
  }

  LossBundle parts;
  parts.rec = rec_loss(restored, truth);
  parts.adv = generator_loss_from_logits(disc_.forward(restored));
  parts.style = style_loss(restored, truth, style_);
  if (config_.network.use_step_loss) {
    parts.step = step_loss(traj, truth);
  }
  const Tensor total = total_loss(parts, config_.weights);
  rec.rec = checked(parts.rec, "rec", it);
  rec.adv_g = checked(parts.adv, "adv_g", it);
  rec.style = checked(parts.style, "style", it);
  rec.step = parts.step.defined() ? checked(parts.step, "step", it)
                                  : std::numeric_limits<double>::quiet_NaN();
  rec.total = checked(total, "total", it);

  backward(total, gen_tape);
  adam_step(gen_params_, gen_adam_);
  // the generator loss also reached the discriminator weights
  clear_grads(disc_params_);
  iteration_ = it;
  return rec;
}

InpaintTrajectory Trainer::restore(const Tensor& damaged, const BinaryMask& mask) const {
  TapeScope no_grad(nullptr);
  return frrn_forward(damaged, mask, gen_);
}

ParameterSet Trainer::checkpoint_tensors() const {
  ParameterSet out = gen_params_;
  out.insert(out.end(), disc_params_.begin(), disc_params_.end());
  const ParameterSet buffers = disc_.buffers();
  out.insert(out.end(), buffers.begin(), buffers.end());
  return out;
}

void Trainer::save(const fs::path& path) const {
  nlohmann::json echo = config_to_json(config_);
  echo["iteration"] = iteration_;
  save_checkpoint(path, checkpoint_tensors(), echo);
}

void Trainer::load(const Checkpoint& checkpoint) {
  load_into(checkpoint, checkpoint_tensors());
  iteration_ = checkpoint.config.value("iteration", 0);
}

Trainer load_trainer(const fs::path& path) {
  const Checkpoint ck = read_checkpoint(path);
  nlohmann::json echo = ck.config;
  echo.erase("iteration");
  RunConfig config;
  try {
    config = config_from_json(echo);
  } catch (const ConfigError& e) {
    throw DataError("checkpoint '" + path.string() + "' has an unusable config: " + e.what());
  }
  Trainer trainer(config);
  trainer.load(ck);
  return trainer;
}

TrainSummary train(const RunConfig& config, std::ostream* progress) {
  Trainer trainer(config);
  const int res = config.resolution;
  Rng rng(component_seed(config.seed, 3));

  std::vector<Tensor> images;
  if (!config.data_dir.empty()) {
    for (const auto& p : list_images(config.data_dir)) {
      images.push_back(load_image(p, res, res));
    }
    if (images.empty()) {
      throw DataError("no images in '" + config.data_dir + "'");
    }
  } else {
    for (int i = 0; i < config.synthetic_images; ++i) {
      images.push_back(synthetic_image(res, res, component_seed(config.seed, 100 + i)));
    }
  }
  std::vector<BinaryMask> masks;
  if (!config.mask_dir.empty()) {
    for (const auto& p : list_images(config.mask_dir)) {
      masks.push_back(load_mask(p, res, res));
    }
    if (masks.empty()) {
      throw DataError("no masks in '" + config.mask_dir + "'");
    }
  }
  const bool random_bucket = config.mask_bucket == "random";
  const MaskBucket fixed_bucket =
      random_bucket ? kAllBuckets[0] : parse_bucket(config.mask_bucket);
  auto generated_mask = [&](std::uint64_t seed) {
    const MaskBucket bucket =
        random_bucket ? kAllBuckets[static_cast<std::size_t>(rng.uniform_int(0, 3))] : fixed_bucket;
    return gen_irregular_mask(res, res, bucket, seed);
  };
  std::map<std::size_t, BinaryMask> per_image_masks;

  std::ofstream log(config.log, std::ios::trunc);
  if (!log) {
    throw DataError("cannot write loss log '" + config.log + "'");
  }
  TrainSummary summary;
  trainer.save(config.checkpoint);
  for (int i = 0; i < config.iterations; ++i) {
    std::vector<Tensor> batch;
    std::vector<BinaryMask> batch_masks;
    for (int b = 0; b < config.batch_size; ++b) {
      const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(images.size()) - 1));
      batch.push_back(images[idx]);
      if (!masks.empty()) {
        batch_masks.push_back(
            masks[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(masks.size()) - 1))]);
      } else if (config.fixed_mask) {
        auto it = per_image_masks.find(idx);
        if (it == per_image_masks.end()) {
          it = per_image_masks.emplace(idx, generated_mask(component_seed(config.seed, 1000 + idx)))
                   .first;
        }
        batch_masks.push_back(it->second);
      } else {
        batch_masks.push_back(generated_mask(rng.next_u64()));
      }
    }
    const IterationRecord rec = trainer.step(stack_images(batch), stack_masks(batch_masks));
    log << to_json(rec).dump() << '\n';
    log.flush();
    if (!summary.first) {
      summary.first = rec;
    }
    summary.last = rec;
    summary.iterations = rec.iteration;
    if (progress) {
      *progress << "iter " << rec.iteration << " total " << rec.total << " rec " << rec.rec
                << '\n';
    }
    if (rec.iteration % config.checkpoint_every == 0) {
      trainer.save(config.checkpoint);
    }
  }
  trainer.save(config.checkpoint);
  return summary;
}

InferResult infer(const InferOptions& options) {
  const Trainer trainer = load_trainer(options.checkpoint);
  const int res = trainer.config().resolution;
  InferResult out;
  out.input = options.resize ? load_image(options.image, res, res) : load_image(options.image);
  out.mask = options.resize ? load_mask(options.mask, res, res) : load_mask(options.mask);
  const int h = out.input.dim(2);
  const int w = out.input.dim(3);
  if (h != res || w != res) {
    throw DataError("image '" + options.image.string() + "' is " + std::to_string(h) + "x" +
                    std::to_string(w) + " but the checkpoint was trained at " +
                    std::to_string(res) + "x" + std::to_string(res) + " (pass --resize)");
  }
  if (out.mask.height() != h || out.mask.width() != w) {
    throw DataError("mask '" + options.mask.string() + "' does not match the image size");
  }
  out.trajectory = trainer.restore(damage(out.input, out.mask), out.mask);

  fs::create_directories(options.out_dir);
  const fs::path final_path = options.out_dir / "final.png";
  save_image(out.trajectory.final_image(), final_path);
  out.written.push_back(final_path);
  if (options.dump_steps) {
    for (std::size_t i = 0; i < out.trajectory.steps.size(); ++i) {
      const auto& s = out.trajectory.steps[i];
      out.written.push_back(options.out_dir / numbered("step", i + 1));
      save_image(s.image, out.written.back());
      out.written.push_back(options.out_dir / numbered("mask", i + 1));
      save_mask(s.mask, out.written.back());
    }
  }
  return out;
}

EvalResult eval(const EvalOptions& options) {
  const Trainer trainer = load_trainer(options.checkpoint);
  const int res = trainer.config().resolution;
  const auto images = list_images(options.data_dir);
  const auto masks = list_images(options.mask_dir);
  if (images.empty()) {
    throw DataError("no images in '" + options.data_dir.string() + "'");
  }
  std::map<std::string, fs::path> by_stem;
  for (const auto& m : masks) {
    by_stem[m.stem().string()] = m;
  }
  std::vector<std::pair<fs::path, fs::path>> pairs;
  bool all_stems = true;
  for (const auto& img : images) {
    auto it = by_stem.find(img.stem().string());
    if (it == by_stem.end()) {
      all_stems = false;
      break;
    }
    pairs.emplace_back(img, it->second);
  }
  if (!all_stems) {
    if (masks.size() != images.size()) {
      throw DataError("cannot pair " + std::to_string(images.size()) + " images with " +
                      std::to_string(masks.size()) + " masks");
    }
    pairs.clear();
    for (std::size_t i = 0; i < images.size(); ++i) {
      pairs.emplace_back(images[i], masks[i]);
    }
  }

  std::ofstream records;
  if (!options.records.empty()) {
    records.open(options.records, std::ios::trunc);
    if (!records) {
      throw DataError("cannot write '" + options.records.string() + "'");
    }
  }
  EvalResult out;
  for (const auto& [img_path, mask_path] : pairs) {
    const Tensor truth = load_image(img_path, res, res);
    const BinaryMask mask = load_mask(mask_path, res, res);
    const InpaintTrajectory traj = trainer.restore(damage(truth, mask), mask);
    // Scored as displayed: the same [0,1] clamp that save_image applies.
    Tensor restored = traj.final_image().detach();
    for (auto& v : restored.values()) {
      v = std::clamp(v, Real(0), Real(1));
    }
    MetricReport r = evaluate_sample(restored, truth, mask);
    r.name = img_path.filename().string();
    if (records.is_open()) {
      records << format_report_record(r) << '\n';
    }
    out.reports.push_back(std::move(r));
  }
  out.rows = aggregate_by_bucket(out.reports);
  out.csv = format_bucket_csv(out.rows);
  return out;
}

MaskStats mask_stats(const BinaryMask& mask) {
  const HoleGeometry g = hole_geometry(mask);
  MaskStats s;
  s.hole_pixels = g.hole_pixel_count;
  s.hole_ratio = hole_ratio(mask);
  s.bucket = bucket_for_ratio(s.hole_ratio);
  s.max_inradius = g.max_inradius;
  s.required_modules = required_modules(mask);
  return s;
}

std::string format_mask_stats(const MaskStats& s) {
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.6f", s.hole_ratio);
  std::string out;
  out += "hole_pixels: " + std::to_string(s.hole_pixels) + "\n";
  out += "hole_ratio: " + std::string(ratio) + "\n";
  out += "bucket: " + (s.bucket ? std::string(bucket_label(*s.bucket)) : std::string("none")) + "\n";
  out += "max_inradius: " + std::to_string(s.max_inradius) + "\n";
  out += "required_modules: " + std::to_string(s.required_modules) + "\n";
  return out;
}

void gen_data(const GenDataOptions& options) {
  if (options.count < 1) {
    throw std::invalid_argument("gen_data: count must be >= 1");
  }
  const fs::path image_dir = options.out_dir / "images";
  const fs::path mask_dir = options.out_dir / "masks";
  fs::create_directories(image_dir);
  fs::create_directories(mask_dir);
  for (int i = 0; i < options.count; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%04d.png", i);
    const auto k = static_cast<std::uint64_t>(i);
    save_image(synthetic_image(options.resolution, options.resolution,
                               component_seed(options.seed, 2 * k)),
               image_dir / name);
    save_mask(gen_irregular_mask(options.resolution, options.resolution,
                                 kAllBuckets[static_cast<std::size_t>(i) % kAllBuckets.size()],
                                 component_seed(options.seed, 2 * k + 1)),
              mask_dir / name);
  }
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
