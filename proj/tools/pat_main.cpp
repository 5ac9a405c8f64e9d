// pat: synthesize, attack, train, detect, evaluate and benchmark.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "cli/commands.hpp"
#include "pat/error.hpp"

namespace {

using namespace pat;
using namespace pat::cli;

std::pair<std::uint32_t, std::uint32_t> parse_size(const std::string& text) {
  unsigned h = 0, w = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%ux%u%c", &h, &w, &tail) != 2) {
    throw ConfigError("--size must look like HxW, got '" + text + "'");
  }
  return {h, w};
}

std::pair<double, double> parse_range(const std::string& text) {
  double lo = 0, hi = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf%c", &lo, &hi, &tail) != 2) {
    throw ConfigError("expected LO:HI, got '" + text + "'");
  }
  return {lo, hi};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transition-frame adversarial video detector"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic moving-object videos");
  SynthOptions so;
  std::string size = "64x64", velocity = "1:3", background = "uniform";
  synth->add_option("--out", so.out, "Output directory")->required();
  synth->add_option("--videos", so.config.video_count, "Number of videos")->capture_default_str();
  synth->add_option("--frames", so.config.frames_per_video, "Frames per video")->capture_default_str();
  synth->add_option("--size", size, "Frame size HxW")->capture_default_str();
  synth->add_option("--channels", so.config.channels, "1 or 3")->capture_default_str();
  synth->add_option("--objects", so.config.object_count, "Objects per video")->capture_default_str();
  synth->add_option("--velocity", velocity, "Speed range LO:HI in pixels/frame")->capture_default_str();
  synth->add_option("--background", background, "uniform or gradient")->capture_default_str();
  synth->add_option("--seed", so.config.seed.value, "Random seed")->capture_default_str();

  // attack
  auto* attack = app.add_subcommand("attack", "Apply a surrogate attack to a corpus");
  AttackOptions ao;
  std::string mode = "sparse";
  bool no_shift = false;
  attack->add_option("--in", ao.in, "Clean corpus directory")->required();
  attack->add_option("--out", ao.out, "Output directory")->required();
  attack->add_option("--mode", mode, "sparse or dense")->capture_default_str();
  attack->add_option("--rho", ao.rho, "Fraction of frames perturbed (sparse)")->capture_default_str();
  attack->add_option("--sigma", ao.sigma, "Noise std (sparse)")->capture_default_str();
  attack->add_option("--eps", ao.eps, "Pattern amplitude (dense)")->capture_default_str();
  attack->add_flag("--no-shift", no_shift, "Dense: same pattern on every frame");
  attack->add_option("--seed", ao.seed.value, "Random seed")->capture_default_str();

  // train
  auto* trn = app.add_subcommand("train", "Train a detector on clean videos");
  TrainOptions to;
  std::string sigma_mode = "varying:0.0001:0.05", input_mode = "transition";
  trn->add_option("--clean", to.clean, "Clean corpus directory")->required();
  trn->add_option("--out", to.out, "Model file (.patm)")->required();
  trn->add_option("--epochs", to.config.epochs)->capture_default_str();
  trn->add_option("--batch-size", to.config.batch_size)->capture_default_str();
  trn->add_option("--lr", to.config.learning_rate)->capture_default_str();
  trn->add_option("--momentum", to.config.momentum)->capture_default_str();
  trn->add_option("--sigma-mode", sigma_mode, "varying:LO:HI or fixed:V")->capture_default_str();
  trn->add_option("--input-mode", input_mode, "transition or original")->capture_default_str();
  trn->add_option("--seed", to.config.seed.value)->capture_default_str();
  trn->add_flag("-v,--verbose", to.verbose, "Print per-epoch loss");

  // detect
  auto* det = app.add_subcommand("detect", "Score the frames of one video");
  DetectOptions dopts;
  bool as_json = false;
  det->add_option("--model", dopts.model)->required();
  det->add_option("--video", dopts.video, ".vseq file or image directory")->required();
  det->add_option("--threshold", dopts.threshold, "Flagged frames for an adversarial verdict")
      ->capture_default_str();
  det->add_flag("--json", as_json, "Print the full JSON report");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a model on clean and attacked corpora");
  EvalOptions eo;
  ev->add_option("--model", eo.model)->required();
  ev->add_option("--clean", eo.clean, "Clean corpus directory");
  ev->add_option("--adv", eo.adv, "Attacked corpus directory");
  ev->add_option("--labels", eo.labels, "Label directory (default: --adv)");
  ev->add_option("--threshold", eo.threshold)->capture_default_str();
  ev->add_option("--report", eo.report, "Write the JSON report here");

  // bench
  auto* bench = app.add_subcommand("bench", "Measure transition and detection speed");
  BenchOptions bo;
  std::string bench_size = "112x112";
  bench->add_option("--size", bench_size)->capture_default_str();
  bench->add_option("--frames", bo.frames)->capture_default_str();
  bench->add_option("--videos", bo.videos)->capture_default_str();
  bench->add_option("--model", bo.model, "Model to time (default: untrained)");
  bench->add_option("--seed", bo.seed.value)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*synth) {
      std::tie(so.config.height, so.config.width) = parse_size(size);
      so.config.velocity_range = parse_range(velocity);
      so.config.background_mode = parse_background_mode(background);
      const auto ids = cmd_synth(so);
      std::printf("wrote %zu videos to %s\n", ids.size(), so.out.c_str());
    } else if (*attack) {
      ao.mode = parse_attack_mode(mode);
      ao.circular_shift = !no_shift;
      const auto n = cmd_attack(ao);
      std::printf("wrote %s, %zu adversarial frames\n", ao.out.c_str(), n);
    } else if (*trn) {
      to.config.sigma_mode = SigmaMode::parse(sigma_mode);
      to.config.input_mode = parse_input_mode(input_mode);
      const auto history = cmd_train(to);
      std::printf("final loss %.5f accuracy %.4f; wrote %s\n", history.back().mean_loss,
                  history.back().accuracy, to.out.c_str());
    } else if (*det) {
      const auto r = cmd_detect(dopts);
      if (as_json) {
        std::cout << to_json(r.report, r.video_id).dump(2) << "\n";
      } else {
        std::printf("%s: %s (%zu/%zu frames flagged, %.4f s)\n", r.video_id.c_str(),
                    to_string(r.report.video_verdict()), r.report.adversarial_count(),
                    r.report.per_frame_scores().size(), r.report.elapsed_seconds());
      }
    } else if (*ev) {
      const auto r = cmd_eval(eo);
      std::printf("FDR %.4f  VDR %.4f  AUC %.4f  (%zu videos, %.4f s/video)\n", r.fdr, r.vdr,
                  r.auc, r.per_video.size(), r.mean_detection_seconds);
    } else if (*bench) {
      std::tie(bo.height, bo.width) = parse_size(bench_size);
      std::cout << to_json(cmd_bench(bo)).dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pat: %s\n", e.what());
    return exit_code_for(e);
  }
  return kExitOk;
}
