#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "frrn/errors.hpp"
#include "frrn/harness.hpp"
#include "frrn/image_io.hpp"
#include "frrn/mask_gen.hpp"
#include "oracles.hpp"

using namespace frrn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "frrn_test_harness" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig tiny_config(const fs::path& dir) {
  RunConfig c;
  c.resolution = 32;
  c.network.num_dilation_modules = 1;
  c.network.widths.full = 3;
  c.network.widths.low = {3, 4, 5};
  c.discriminator.widths = {4, 4, 4, 4, 1};
  c.style_widths = {2, 2, 2, 2};
  c.iterations = 2;
  c.synthetic_images = 2;
  c.checkpoint = (dir / "model.ckpt").string();
  c.log = (dir / "log.jsonl").string();
  return c;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(FRRN_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto kv = parse_config_text("# comment\nresolution = 128\n\n  gen_lr=0.001 # trailing\n");
  CHECK(kv.at("resolution") == "128");
  CHECK(kv.at("gen_lr") == "0.001");
  CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
}

TEST_CASE("config keys round-trip through text and json") {
  RunConfig c;
  set_config_value(c, "low_widths", "8, 16, 24");
  set_config_value(c, "use_step_loss", "false");
  set_config_value(c, "gen_lr", "0.0003");
  set_config_value(c, "seed", "123");
  CHECK(c.network.widths.low == std::array<int, 3>{8, 16, 24});
  CHECK_FALSE(c.network.use_step_loss);
  CHECK(c.effective_disc_lr() == doctest::Approx(0.00003));
  const RunConfig back = config_from_json(config_to_json(c));
  for (const auto& key : config_keys()) CHECK(get_config_value(back, key) == get_config_value(c, key));
  CHECK_THROWS_AS(set_config_value(c, "nope", "1"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "resolution", "abc"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "low_widths", "1,2"), ConfigError);
}

TEST_CASE("config validation") {
  RunConfig c;
  c.validate();
  CHECK(c.beta1 == 0.0);
  CHECK(c.beta2 == 0.9);
  CHECK(c.effective_disc_lr() == doctest::Approx(c.gen_lr / 10));
  c.resolution = 60;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.resolution = 64;
  c.mask_bucket = "60-70";
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("both optimizers use the configured betas") {
  const fs::path dir = scratch("betas");
  RunConfig c = tiny_config(dir);
  c.beta2 = 0.5;
  const Trainer t(c);
  // a checkpoint round-trip keeps the config that set them
  t.save(c.checkpoint);
  CHECK(load_trainer(c.checkpoint).config().beta2 == 0.5);
}

TEST_CASE("zero iterations leave the initialization in the checkpoint") {
  const fs::path dir = scratch("zero");
  RunConfig c = tiny_config(dir);
  c.iterations = 0;
  train(c);
  const Trainer fresh(c);
  const Checkpoint ck = read_checkpoint(c.checkpoint);
  const ParameterSet expect = fresh.checkpoint_tensors();
  REQUIRE(ck.tensors.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(ck.tensors[i].first == expect[i].first);
    CHECK(std::equal(expect[i].second.values().begin(), expect[i].second.values().end(),
                     ck.tensors[i].second.values().begin()));
  }
}

TEST_CASE("training writes one log record per iteration") {
  const fs::path dir = scratch("log");
  RunConfig c = tiny_config(dir);
  c.iterations = 3;
  c.network.use_step_loss = false;
  const TrainSummary s = train(c);
  CHECK(s.iterations == 3);
  std::ifstream in(c.log);
  int lines = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("iteration") == lines + 1);
    CHECK(j.at("step").is_null());
    for (const char* k : {"rec", "adv_g", "adv_d", "style", "total"}) CHECK(j.at(k).is_number());
  }
  CHECK(lines == 3);
  CHECK(load_trainer(c.checkpoint).iteration() == 3);
}

TEST_CASE("non-finite losses abort with the term named") {
  const fs::path dir = scratch("nan");
  const RunConfig c = tiny_config(dir);
  Trainer t(c);
  Tensor truth = synthetic_image(32, 32, 1);
  truth.at(0, 0, 0, 0) = std::numeric_limits<Real>::quiet_NaN();
  const BinaryMask m = gen_irregular_mask(32, 32, MaskBucket::k10_20, 1);
  try {
    t.step(truth, m);
    FAIL("expected throw");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("adv_d") != std::string::npos);
  }
  CHECK(t.iteration() == 0);
}

TEST_CASE("inference on a hole-free input returns the input") {
  const fs::path dir = scratch("infer_clean");
  RunConfig c = tiny_config(dir);
  Trainer(c).save(c.checkpoint);
  save_image(synthetic_image(32, 32, 5), dir / "in.png");
  save_mask(BinaryMask(1, 32, 32, true), dir / "mask.png");
  const InferResult r = infer({c.checkpoint, dir / "in.png", dir / "mask.png", dir / "out", false, false});
  CHECK(read_all(dir / "out" / "final.png") == read_all(dir / "in.png"));
  CHECK(r.written.size() == 1);
}

TEST_CASE("step dumps: one image and one mask per module, masks growing") {
  const fs::path dir = scratch("infer_steps");
  RunConfig c = tiny_config(dir);
  c.network.num_dilation_modules = 8;
  c.network.blocks_per_dilation = 1;
  Trainer(c).save(c.checkpoint);
  save_image(synthetic_image(32, 32, 6), dir / "in.png");
  save_mask(gen_irregular_mask(32, 32, MaskBucket::k40_50, 3), dir / "mask.png");
  infer({c.checkpoint, dir / "in.png", dir / "mask.png", dir / "out", true, false});
  int steps = 0, masks = 0;
  for (const auto& e : fs::directory_iterator(dir / "out")) {
    const std::string n = e.path().filename().string();
    steps += n.rfind("step_", 0) == 0;
    masks += n.rfind("mask_", 0) == 0;
  }
  CHECK(steps == 8);
  CHECK(masks == 8);
  std::size_t prev = load_mask(dir / "mask.png").valid_count();
  for (int i = 1; i <= 8; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "mask_%02d.png", i);
    const std::size_t now = load_mask(dir / "out" / name).valid_count();
    CHECK(now >= prev);
    prev = now;
  }
  // clean pixels of the result equal the input
  const Tensor in = load_image(dir / "in.png");
  const Tensor out = load_image(dir / "out" / "final.png");
  const BinaryMask m = load_mask(dir / "mask.png");
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      if (m.valid(0, y, x)) CHECK(out.at(0, 1, y, x) == in.at(0, 1, y, x));
}

TEST_CASE("inference rejects a resolution mismatch unless resizing") {
  const fs::path dir = scratch("infer_res");
  RunConfig c = tiny_config(dir);
  Trainer(c).save(c.checkpoint);
  save_image(synthetic_image(64, 64, 5), dir / "in.png");
  save_mask(BinaryMask(1, 64, 64, true), dir / "mask.png");
  CHECK_THROWS_AS(infer({c.checkpoint, dir / "in.png", dir / "mask.png", dir / "out", false, false}),
                  DataError);
  CHECK(infer({c.checkpoint, dir / "in.png", dir / "mask.png", dir / "out", false, true})
            .input.dim(2) == 32);
}

TEST_CASE("eval produces one row per bucket") {
  const fs::path dir = scratch("eval");
  RunConfig c = tiny_config(dir);
  Trainer(c).save(c.checkpoint);
  gen_data({dir / "data", 8, 32, 4});
  const EvalResult r = eval({c.checkpoint, dir / "data" / "images", dir / "data" / "masks", dir / "rec.jsonl"});
  CHECK(r.reports.size() == 8);
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) CHECK(row.count == 2);
  std::ifstream in(dir / "rec.jsonl");
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  CHECK(n == 8);
}

TEST_CASE("mask stats") {
  const MaskStats clean = mask_stats(BinaryMask(1, 64, 64, true));
  CHECK(clean.required_modules == 0);
  CHECK_FALSE(clean.bucket.has_value());
  const MaskStats s = mask_stats(oracle::disc_hole(128, 128, 36));
  CHECK(s.required_modules == 3);
  CHECK(format_mask_stats(s).find("required_modules: 3") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(run_cli("") == 1);
  CHECK(run_cli("train --no-such-flag 1") == 1);
  CHECK(run_cli("train --resolution 30 --iterations 0") == 1);
  CHECK(run_cli("mask-stats " + (dir / "missing.png").string()) == 2);
  CHECK(run_cli("gen-data --out " + (dir / "d").string() + " --count 2 --resolution 32") == 0);
  CHECK(run_cli("mask-stats " + (dir / "d" / "masks" / "0000.png").string()) == 0);
  std::ofstream(dir / "run.cfg") << "resolution = 32\nnum_dilation_modules = 1\nfull_width = 2\n"
                                    "low_widths = 2,2,2\ndisc_widths = 2,2,2,2,1\niterations = 1\n"
                                    "checkpoint = " << (dir / "m.ckpt").string() << "\nlog = "
                                 << (dir / "l.jsonl").string() << "\n";
  CHECK(run_cli("train --config " + (dir / "run.cfg").string() + " --seed 5") == 0);
  CHECK(load_trainer(dir / "m.ckpt").config().seed == 5);
}
