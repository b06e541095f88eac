// hood: simulate -> preprocess -> train -> calibrate -> evaluate -> detect.

#include <omp.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <deque>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hood/detect/detector.hpp"
#include "hood/error.hpp"
#include "hood/io/binary.hpp"
#include "hood/io/checkpoint.hpp"
#include "hood/io/dataset.hpp"
#include "hood/io/stream.hpp"
#include "hood/io/text_formats.hpp"
#include "hood/metrics/evaluate.hpp"
#include "hood/model/trainer.hpp"
#include "hood/radar/simulator.hpp"

namespace {

using namespace hood;
using nlohmann::json;

// ------------------------------------------------------------ run config

struct RunConfig {
  radar::RadarConfig radar;
  dsp::DspConfig dsp;
  model::TrainConfig train;
  std::size_t latent_dim = 64;
  double quantile = 0.90;
  bool deterministic = false;
};

/// Defaults file: {"radar": {...}, "dsp": {...}, "train": {...}, "latent_dim", "quantile"}.
void apply_config_file(const std::string& path, RunConfig& rc) {
  const auto text = io::read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw SchemaError("config " + path + ": expected a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "radar") {
        rc.radar = io::radar_config_from_json(value.dump(), rc.radar);
      } else if (key == "dsp") {
        for (const auto& [k, v] : value.items()) {
          if (k == "mti") {
            const auto m = v.get<std::string>();
            if (m != "frame_difference" && m != "exponential") throw SchemaError("config: unknown mti '" + m + "'");
            rc.dsp.mti = m == "exponential" ? dsp::MtiMode::exponential : dsp::MtiMode::frame_difference;
          } else if (k == "mti_alpha") {
            rc.dsp.mti_alpha = v.get<double>();
          } else if (k == "micro_stack") {
            rc.dsp.micro_stack = v.get<std::size_t>();
          } else if (k == "micro_doppler_bins") {
            rc.dsp.micro_doppler_bins = v.get<std::size_t>();
          } else if (k == "sinc_cutoff") {
            rc.dsp.sinc_cutoff = v.get<double>();
          } else if (k == "sinc_taps") {
            rc.dsp.sinc_taps = v.get<std::size_t>();
          } else if (k == "log_magnitude") {
            rc.dsp.log_magnitude = v.get<bool>();
          } else if (k == "erespd_window") {
            rc.dsp.erespd_window = v.get<std::size_t>();
          } else {
            throw SchemaError("config: unknown dsp key '" + k + "'");
          }
        }
      } else if (key == "train") {
        for (const auto& [k, v] : value.items()) {
          if (k == "epochs") {
            rc.train.epochs = v.get<std::size_t>();
          } else if (k == "batch_size") {
            rc.train.batch_size = v.get<std::size_t>();
          } else if (k == "learning_rate") {
            rc.train.learning_rate = v.get<double>();
          } else if (k == "seed") {
            rc.train.seed = v.get<std::uint64_t>();
          } else if (k == "patience") {
            rc.train.patience = v.get<std::size_t>();
          } else if (k == "augment") {
            rc.train.augment.enabled = v.get<bool>();
          } else if (k == "shuffle") {
            rc.train.shuffle = v.get<bool>();
          } else {
            throw SchemaError("config: unknown train key '" + k + "'");
          }
        }
      } else if (key == "latent_dim") {
        rc.latent_dim = value.get<std::size_t>();
      } else if (key == "quantile") {
        rc.quantile = value.get<double>();
      } else {
        throw SchemaError("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError("config " + path + ": " + e.what());
  }
}

std::string hex_crc(std::uint32_t crc) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", crc);
  return buf;
}

std::string file_id(const std::string& path) { return hex_crc(io::crc32(io::read_file(path))); }

std::vector<model::TrainingSample> load_samples(const std::vector<std::string>& paths) {
  std::vector<io::Dataset> parts;
  for (const auto& p : paths) parts.push_back(io::read_dataset(p));
  return io::samples_of(io::concat(parts));
}

void require_image_size(const model::HoodModel<float>& m, const std::vector<model::TrainingSample>& samples) {
  const std::size_t side = m.config().image_size;
  for (const auto& s : samples) {
    if (s.macro.n_doppler != side || s.macro.n_range != side) {
      throw ShapeError("dataset images are " + std::to_string(s.macro.n_doppler) + "x" +
                       std::to_string(s.macro.n_range) + ", checkpoint expects " + std::to_string(side) + "x" +
                       std::to_string(side));
    }
  }
}

// ------------------------------------------------------------- commands

struct SimulateArgs {
  std::string preset;
  std::string scene_file;
  std::optional<double> duration;
  std::optional<double> noise;
  std::uint64_t seed = 0;
  std::optional<std::uint32_t> scene_id;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, const RunConfig& rc) {
  radar::Scene scene;
  if (!a.scene_file.empty()) {
    scene = io::read_scene(a.scene_file);
    if (a.seed) scene.seed = a.seed;
  } else {
    const auto p = radar::parse_preset(a.preset);
    if (!p) throw UsageError("unknown preset '" + a.preset + "'");
    scene = radar::preset_scene(*p, a.seed);
  }
  if (a.duration) scene.duration = *a.duration;
  if (a.noise) scene.noise_std = *a.noise;
  scene.validate();
  rc.radar.validate();
  const auto frames = radar::simulate_recording(rc.radar, scene);
  const auto id = a.scene_id.value_or(static_cast<std::uint32_t>(a.seed));
  io::write_dataset(a.out, io::raw_dataset(frames, id, scene.category));
  std::cerr << "simulate: " << frames.size() << " frames -> " << a.out << "\n";
  return 0;
}

struct PreprocessArgs {
  std::vector<std::string> in;
  std::string out;
  std::size_t stride = 1;
};

int cmd_preprocess(const PreprocessArgs& a, const RunConfig& rc) {
  rc.dsp.validate();
  std::vector<io::Dataset> parts;
  for (const auto& path : a.in) parts.push_back(io::preprocess_dataset(io::read_dataset(path), rc.dsp, a.stride));
  const auto out = io::concat(parts);
  io::write_dataset(a.out, out);
  std::cerr << "preprocess: " << out.samples() << " paired samples -> " << a.out << "\n";
  return 0;
}

struct TrainArgs {
  std::vector<std::string> data;
  std::string out;
  std::string resume;
  std::string log;
  std::size_t stride = 1;
  bool no_optimizer_state = false;
};

int cmd_train(const TrainArgs& a, const RunConfig& rc) {
  auto samples = load_samples(a.data);
  if (a.stride > 1) {
    std::vector<model::TrainingSample> kept;
    for (std::size_t i = 0; i < samples.size(); i += a.stride) kept.push_back(std::move(samples[i]));
    samples = std::move(kept);
  }
  for (const auto& s : samples) model::activity_of(s.category);

  std::optional<io::Checkpoint> resume;
  model::HoodModel<float> m = [&] {
    if (!a.resume.empty()) {
      resume = io::read_checkpoint(a.resume);
      return io::load_model(*resume);
    }
    model::ModelConfig mc;
    mc.image_size = samples.empty() ? 64 : samples.front().macro.n_doppler;
    mc.latent_dim = rc.latent_dim;
    return model::build_model<float>(mc, rc.train.seed);
  }();
  require_image_size(m, samples);

  model::Trainer<float> trainer(m, rc.train);
  if (resume) io::load_optimizer(*resume, m, trainer.optimizer());

  std::ofstream log;
  if (!a.log.empty()) {
    log.open(a.log, std::ios::trunc);
    if (!log) throw IoError("cannot open " + a.log);
    log << (rc.deterministic ? "epoch,loss\n" : "epoch,loss,wall_s\n");
  }
  const auto result = trainer.fit(samples, [&](const model::EpochRecord& r) {
    char line[128];
    std::snprintf(line, sizeof line, "%zu,%.9g,%.3f\n", r.epoch, r.loss, r.seconds);
    std::cerr << "train: epoch " << line;
    if (!log.is_open()) return;
    if (rc.deterministic) std::snprintf(line, sizeof line, "%zu,%.9g\n", r.epoch, r.loss);
    log << line << std::flush;
  });
  io::write_checkpoint(a.out, m, a.no_optimizer_state ? nullptr : &trainer.optimizer());
  std::cerr << "train: " << result.epochs_run << " epochs" << (result.stopped_early ? " (early stop)" : "")
            << ", final loss " << (result.loss_curve.empty() ? 0.0 : result.loss_curve.back()) << " -> " << a.out
            << "\n";
  return 0;
}

struct CalibrateArgs {
  std::string checkpoint;
  std::vector<std::string> data;
  std::string out;
};

int cmd_calibrate(const CalibrateArgs& a, const RunConfig& rc) {
  const auto m = io::load_model(io::read_checkpoint(a.checkpoint));
  const auto samples = load_samples(a.data);
  require_image_size(m, samples);
  auto t = detect::calibrate(m, std::span<const model::TrainingSample>(samples), rc.quantile);
  t.model_id = file_id(a.checkpoint);
  std::string ids;
  for (const auto& d : a.data) ids += (ids.empty() ? "" : "+") + file_id(d);
  t.dataset_id = ids;
  io::write_thresholds(a.out, t);
  std::cerr << "calibrate: threshold_s " << t.threshold_s << ", threshold_vs " << t.threshold_vs << " -> " << a.out
            << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string checkpoint;
  std::string thresholds;
  std::vector<std::string> data;
  std::string out;
  std::string csv;
};

int cmd_evaluate(const EvaluateArgs& a, const RunConfig& rc) {
  const auto m = io::load_model(io::read_checkpoint(a.checkpoint));
  const auto t = io::read_thresholds(a.thresholds);
  const auto samples = load_samples(a.data);
  require_image_size(m, samples);
  auto report = metrics::evaluate(m, t, std::span<const model::TrainingSample>(samples));
  if (rc.deterministic) {
    std::cerr << "evaluate: test time " << *report.test_seconds << " s (omitted from outputs)\n";
    report.test_seconds.reset();
  }
  const auto text = io::report_to_json(report);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    io::write_file_atomic(a.out, text);
  }
  const auto csv = metrics::csv_header() + "\n" + metrics::csv_row(report) + "\n";
  if (!a.csv.empty()) {
    io::write_file_atomic(a.csv, csv);
  } else {
    std::cerr << csv;
  }
  return 0;
}

struct DetectArgs {
  std::string checkpoint;
  std::string thresholds;
  std::string in;
  bool realtime = false;
  std::size_t queue = 8;
  std::size_t smooth = 0;
  double pace = 0.0;
};

/// Bounded frame queue; a full queue drops its oldest frame.
class FrameQueue {
 public:
  explicit FrameQueue(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

  void push(radar::FrameCube f) {
    std::lock_guard lock(mu_);
    if (frames_.size() == capacity_) {
      frames_.pop_front();
      ++dropped_;
    }
    frames_.push_back(std::move(f));
    cv_.notify_one();
  }
  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }
  std::optional<radar::FrameCube> pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_ || !frames_.empty(); });
    if (frames_.empty()) return std::nullopt;
    auto f = std::move(frames_.front());
    frames_.pop_front();
    return f;
  }
  std::size_t dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
  }

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<radar::FrameCube> frames_;
  bool closed_ = false;
  std::size_t dropped_ = 0;
};

int cmd_detect(const DetectArgs& a, const RunConfig& rc) {
  const auto m = io::load_model(io::read_checkpoint(a.checkpoint));
  const auto t = io::read_thresholds(a.thresholds);
  detect::DetectorOptions options;
  options.dsp = rc.dsp;
  options.smoothing_window = a.smooth;
  detect::PresenceDetector<float> detector(m, t, options);

  auto emit = [](const detect::DetectionResult& r) {
    std::printf("%zu,%.9g,%.9g,%s\n", r.frame_index, r.err_s, r.err_vs, std::string(detect::to_string(r.verdict)).c_str());
  };

  // Source: a raw_frames dataset file, or the framed live stream on stdin ("-").
  std::function<std::optional<radar::FrameCube>()> next;
  std::vector<radar::FrameCube> frames;
  std::size_t cursor = 0;
  std::optional<io::StreamHeader> header;
  if (a.in == "-") {
    header = io::read_stream_header(std::cin);
    next = [&]() { return io::read_stream_frame(std::cin, *header, cursor++, rc.radar.frame_period); };
  } else {
    frames = io::frames_of(io::read_dataset(a.in), rc.radar.frame_period);
    next = [&]() -> std::optional<radar::FrameCube> {
      if (cursor == frames.size()) return std::nullopt;
      return frames[cursor++];
    };
  }

  std::size_t verdicts = 0;
  if (!a.realtime) {
    while (auto f = next()) {
      if (auto r = detector.push(*f)) {
        emit(*r);
        ++verdicts;
      }
    }
  } else {
    FrameQueue queue(a.queue);
    std::exception_ptr producer_error;
    std::thread producer([&] {
      try {
        auto period = std::chrono::duration<double>(a.pace);
        auto due = std::chrono::steady_clock::now();
        while (auto f = next()) {
          if (a.pace > 0) {
            due += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
            std::this_thread::sleep_until(due);
          }
          queue.push(std::move(*f));
        }
      } catch (...) {
        producer_error = std::current_exception();
      }
      queue.close();
    });
    while (auto f = queue.pop()) {
      if (auto r = detector.push(*f)) {
        emit(*r);
        ++verdicts;
      }
    }
    producer.join();
    std::cerr << "detect: dropped " << queue.dropped() << " frames\n";
    if (producer_error) std::rethrow_exception(producer_error);
  }
  std::fflush(stdout);
  std::cerr << "detect: " << verdicts << " verdicts\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar human-presence and out-of-distribution detector"};
  app.require_subcommand(1);
  RunConfig rc;
  std::string config_path;
  if (const char* env = std::getenv("HOOD_CONFIG")) config_path = env;
  app.add_option("--config", config_path, "JSON defaults file (also HOOD_CONFIG)");
  app.add_flag("--deterministic", rc.deterministic, "Single thread, no wall times in output files");
  std::optional<std::size_t> threads;
  app.add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a raw_frames recording");
  auto* preset_opt = c_sim->add_option("--preset", sim.preset, "Preset scene name");
  c_sim->add_option("--scene", sim.scene_file, "Scene JSON file")->excludes(preset_opt);
  c_sim->add_option("--duration", sim.duration, "Seconds")->check(CLI::PositiveNumber);
  c_sim->add_option("--noise", sim.noise, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  c_sim->add_option("--seed", sim.seed, "Scene seed");
  c_sim->add_option("--scene-id", sim.scene_id, "Scene id label (default: seed)");
  c_sim->add_option("--out", sim.out, "Output dataset")->required();

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Raw frames to paired macro/micro RDIs");
  c_pre->add_option("--in", pre.in, "raw_frames datasets")->required();
  c_pre->add_option("--out", pre.out, "Output paired_rdi dataset")->required();
  c_pre->add_option("--stride", pre.stride, "Keep every n-th sample per recording")->check(CLI::PositiveNumber);

  TrainArgs tr;
  std::optional<std::size_t> epochs, batch, patience, latent;
  std::optional<double> lr;
  std::optional<std::uint64_t> train_seed;
  bool no_augment = false, no_shuffle = false;
  auto* c_train = app.add_subcommand("train", "Train the reconstruction model");
  c_train->add_option("--data", tr.data, "paired_rdi datasets (ID only)")->required();
  c_train->add_option("--out", tr.out, "Output checkpoint")->required();
  c_train->add_option("--resume", tr.resume, "Checkpoint with optimizer state to continue from");
  c_train->add_option("--log", tr.log, "Per-epoch log file");
  c_train->add_option("--stride", tr.stride, "Use every n-th sample")->check(CLI::PositiveNumber);
  c_train->add_option("--epochs", epochs);
  c_train->add_option("--batch-size", batch);
  c_train->add_option("--lr", lr);
  c_train->add_option("--seed", train_seed);
  c_train->add_option("--patience", patience);
  c_train->add_option("--latent-dim", latent);
  c_train->add_flag("--no-augment", no_augment);
  c_train->add_flag("--no-shuffle", no_shuffle);
  c_train->add_flag("--no-optimizer-state", tr.no_optimizer_state, "Write an inference-only checkpoint");

  CalibrateArgs cal;
  std::optional<double> quantile;
  auto* c_cal = app.add_subcommand("calibrate", "Per-activity thresholds from ID data");
  c_cal->add_option("--checkpoint", cal.checkpoint)->required();
  c_cal->add_option("--data", cal.data, "paired_rdi ID datasets")->required();
  c_cal->add_option("--quantile", quantile);
  c_cal->add_option("--out", cal.out, "Output thresholds JSON")->required();

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "OOD metrics on a labeled test set");
  c_ev->add_option("--checkpoint", ev.checkpoint)->required();
  c_ev->add_option("--thresholds", ev.thresholds)->required();
  c_ev->add_option("--data", ev.data, "paired_rdi datasets")->required();
  c_ev->add_option("--out", ev.out, "Report JSON (default: stdout)");
  c_ev->add_option("--csv", ev.csv, "Report CSV (default: stderr)");

  DetectArgs det;
  auto* c_det = app.add_subcommand("detect", "Per-frame presence verdicts");
  c_det->add_option("--checkpoint", det.checkpoint)->required();
  c_det->add_option("--thresholds", det.thresholds)->required();
  c_det->add_option("--in", det.in, "raw_frames dataset, or - for the framed stream on stdin")->required();
  c_det->add_flag("--realtime", det.realtime, "Acquisition thread with a bounded drop-oldest queue");
  c_det->add_option("--queue", det.queue, "Realtime queue capacity")->check(CLI::PositiveNumber);
  c_det->add_option("--pace", det.pace, "Realtime: seconds between frames read from a file");
  c_det->add_option("--smooth", det.smooth, "Majority vote over this many verdicts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  try {
    if (!config_path.empty()) apply_config_file(config_path, rc);
    if (epochs) rc.train.epochs = *epochs;
    if (batch) rc.train.batch_size = *batch;
    if (patience) rc.train.patience = *patience;
    if (latent) rc.latent_dim = *latent;
    if (lr) rc.train.learning_rate = *lr;
    if (train_seed) rc.train.seed = *train_seed;
    if (no_augment) rc.train.augment.enabled = false;
    if (no_shuffle) rc.train.shuffle = false;
    if (quantile) rc.quantile = *quantile;
    if (rc.deterministic) {
      omp_set_num_threads(1);
    } else if (threads) {
      omp_set_num_threads(static_cast<int>(*threads));
    }
    rc.radar.validate();
    rc.dsp.validate();
    rc.train.validate();

    if (*c_sim) {
      if (sim.preset.empty() && sim.scene_file.empty()) throw UsageError("simulate needs --preset or --scene");
      return cmd_simulate(sim, rc);
    }
    if (*c_pre) return cmd_preprocess(pre, rc);
    if (*c_train) return cmd_train(tr, rc);
    if (*c_cal) return cmd_calibrate(cal, rc);
    if (*c_ev) return cmd_evaluate(ev, rc);
    if (*c_det) return cmd_detect(det, rc);
  } catch (const hood::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
