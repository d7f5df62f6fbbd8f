// Command-line entry point: train, infer, eval, mask-stats, gen-data.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error,
// 3 numerical failure during training.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "frrn/errors.hpp"
#include "frrn/harness.hpp"
#include "frrn/image_io.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

int run(int argc, char** argv) {
  CLI::App app{"Progressive image inpainting with full-resolution residual blocks"};
  app.require_subcommand(1);

  // train: every config key doubles as a flag
  auto* train_cmd = app.add_subcommand("train", "train a network and write a checkpoint");
  std::string config_path;
  bool verbose = false;
  train_cmd->add_option("--config", config_path, "key = value config file");
  train_cmd->add_flag("-v,--verbose", verbose, "print one line per iteration");
  std::map<std::string, std::string> overrides;
  for (const auto& key : frrn::config_keys()) {
    train_cmd->add_option("--" + key, overrides[key], "override config key '" + key + "'");
  }

  auto* infer_cmd = app.add_subcommand("infer", "restore one image");
  frrn::InferOptions infer_opts;
  infer_cmd->add_option("--checkpoint", infer_opts.checkpoint)->required();
  infer_cmd->add_option("--image", infer_opts.image)->required();
  infer_cmd->add_option("--mask", infer_opts.mask, "255 = valid, 0 = hole")->required();
  infer_cmd->add_option("--out", infer_opts.out_dir, "output directory")->required();
  infer_cmd->add_flag("--dump-steps", infer_opts.dump_steps,
                      "also write step_XX.png and mask_XX.png per dilation module");
  infer_cmd->add_flag("--resize", infer_opts.resize, "resize inputs to the checkpoint resolution");

  auto* eval_cmd = app.add_subcommand("eval", "per-bucket PSNR / SSIM / L1 table");
  frrn::EvalOptions eval_opts;
  std::string eval_out;
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint)->required();
  eval_cmd->add_option("--data", eval_opts.data_dir, "directory of ground-truth images")
      ->required();
  eval_cmd->add_option("--masks", eval_opts.mask_dir, "directory of masks")->required();
  eval_cmd->add_option("--out", eval_out, "write the CSV here instead of stdout");
  eval_cmd->add_option("--records", eval_opts.records, "per-sample JSON lines");

  auto* stats_cmd = app.add_subcommand("mask-stats", "hole ratio, bucket and modules needed");
  std::string stats_mask;
  stats_cmd->add_option("mask", stats_mask)->required();

  auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic image/mask dataset");
  frrn::GenDataOptions gen_opts;
  gen_cmd->add_option("--out", gen_opts.out_dir)->required();
  gen_cmd->add_option("--count", gen_opts.count)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--resolution", gen_opts.resolution)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_opts.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (train_cmd->parsed()) {
    frrn::RunConfig config = config_path.empty() ? frrn::RunConfig{}
                                                 : frrn::load_config_file(config_path);
    for (const auto& key : frrn::config_keys()) {
      if (train_cmd->count("--" + key) > 0) {
        frrn::set_config_value(config, key, overrides[key]);
      }
    }
    config.validate();
    const auto summary = frrn::train(config, verbose ? &std::cerr : nullptr);
    std::cout << "trained " << summary.iterations << " iterations; checkpoint "
              << config.checkpoint << ", log " << config.log << '\n';
    if (summary.last) {
      std::cout << "final total loss " << summary.last->total << '\n';
    }
  } else if (infer_cmd->parsed()) {
    const auto result = frrn::infer(infer_opts);
    for (const auto& p : result.written) {
      std::cout << p.string() << '\n';
    }
    if (result.trajectory.unfilled_pixels > 0) {
      std::cerr << "warning: " << result.trajectory.unfilled_pixels
                << " hole pixels are deeper than the network reaches; filled from the last"
                   " residual\n";
    }
  } else if (eval_cmd->parsed()) {
    const auto result = frrn::eval(eval_opts);
    if (eval_out.empty()) {
      std::cout << result.csv;
    } else {
      std::ofstream out(eval_out);
      out << result.csv;
      if (!out) {
        throw frrn::DataError("cannot write '" + eval_out + "'");
      }
    }
  } else if (stats_cmd->parsed()) {
    std::cout << frrn::format_mask_stats(frrn::mask_stats(frrn::load_mask(stats_mask)));
  } else if (gen_cmd->parsed()) {
    frrn::gen_data(gen_opts);
    std::cout << "wrote " << gen_opts.count << " samples to " << gen_opts.out_dir.string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const frrn::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const frrn::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const frrn::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
}
