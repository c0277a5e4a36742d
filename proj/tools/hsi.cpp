// hsi: command-line driver for the localization simulator, reward tables,
// clip annotation, and episode-start sampling.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hsi/hsi.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitError = 2;

struct Globals {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string config;
};

/// Flag beats environment beats default.
void apply_env(Globals& g, const CLI::Option* seed_opt, const CLI::Option* out_opt) {
  if (seed_opt->count() == 0) {
    if (const char* s = std::getenv("HSI_SEED")) {
      try {
        g.seed = std::stoull(s);
      } catch (const std::exception&) {
        throw hsi::InvalidArgument(std::string("HSI_SEED is not an unsigned integer: ") + s);
      }
    }
  }
  if (out_opt->count() == 0) {
    if (const char* d = std::getenv("HSI_OUT_DIR")) g.out_dir = d;
  }
}

fs::path out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hsi::FormatError("cannot write " + path.string());
  out << text;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += (c == '\n') ? ' ' : c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------

int cmd_localize(const Globals& g, std::optional<int> trials, unsigned threads) {
  using namespace hsi::experiment;
  ScenarioConfig cfg = g.config.empty() ? ScenarioConfig{} : read_config(g.config);
  if (trials) cfg.trials = *trials;
  cfg.validate();

  const auto records = run_localization(cfg, g.seed, threads);
  const Summary summary = summarize(records);
  const auto checks = internal_checks(cfg, summary);

  std::ostringstream csv;
  write_records_csv(csv, records);
  const auto records_path = out_path(g, "localization_records.csv");
  const auto summary_path = out_path(g, "localization_summary.json");
  write_text(records_path, csv.str());
  write_text(summary_path, summary_to_json(summary, g.seed, checks).dump(2) + "\n");

  std::cout << "trials " << summary.trials.size() << ", rows " << summary.rows << '\n'
            << "coarse mean error  " << format_double(summary.coarse_mean) << " m\n"
            << "fine mean error    " << format_double(summary.fine_mean) << " m\n"
            << "transition dist    mean " << format_double(summary.transition_mean) << "  min "
            << format_double(summary.transition_min) << "  max " << format_double(summary.transition_max) << " m\n"
            << "max error          " << format_double(summary.max_error) << " m\n";
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << "check " << c.name << ": " << (c.pass ? "pass" : "FAIL") << '\n';
    ok = ok && c.pass;
  }
  std::cout << "wrote " << records_path.string() << ", " << summary_path.string() << '\n';
  return ok ? 0 : kExitChecksFailed;
}

int cmd_reward_check(const Globals& g, const std::string& task_name, const std::string& cases_path) {
  using namespace hsi::rewardcheck;
  const auto cases = read_cases(cases_path);
  std::optional<hsi::task::Task> task;
  if (task_name != "all") task = hsi::task::parse_task(task_name);
  const auto results = run_cases(cases, task);
  if (results.empty()) throw hsi::InvalidArgument("reward-check: no cases for task '" + task_name + "'");

  std::ostringstream csv;
  csv << "name,term,expected,actual,tol,status\n";
  std::size_t failures = 0;
  for (const auto& r : results) {
    csv << r.name << ',' << r.term << ',' << hsi::experiment::format_double(r.expected) << ','
        << hsi::experiment::format_double(r.actual) << ',' << hsi::experiment::format_double(r.tol) << ','
        << (r.pass ? "pass" : "FAIL") << '\n';
    std::cout << (r.pass ? "pass  " : "FAIL  ") << r.name << "  expected " << hsi::experiment::format_double(r.expected)
              << "  actual " << hsi::experiment::format_double(r.actual) << '\n';
    failures += r.pass ? 0 : 1;
  }
  write_text(out_path(g, "reward_check.csv"), csv.str());
  std::cout << results.size() - failures << "/" << results.size() << " cases pass\n";
  return failures == 0 ? 0 : kExitChecksFailed;
}

int cmd_annotate(const Globals& g, const std::string& input, const std::string& clip_id, std::size_t pickup,
                 std::size_t place, int window, const std::string& output) {
  using namespace hsi;
  const auto dataset = motion::read_dataset(input);
  if (dataset.clips.empty()) throw InvalidArgument("annotate: dataset has no clips");
  const motion::MotionClip* clip = &dataset.clips.front();
  if (!clip_id.empty()) {
    clip = nullptr;
    for (const auto& c : dataset.clips)
      if (c.id == clip_id) clip = &c;
    if (!clip) throw InvalidArgument("annotate: no clip with id '" + clip_id + "'");
  }

  annotation::ContactAnnotation ann;
  ann.pickup_frame = pickup;
  ann.place_frame = place;
  const auto smoothed = annotation::smooth_motion(*clip, window);
  const auto annotated = annotation::annotate_object(smoothed, ann);
  const double jump = annotation::contact_discontinuity(annotated.clip, annotated.annotation);

  motion::MotionDataset out;
  out.clips.push_back(annotated.clip);
  for (auto& sub : annotation::split_subsets(annotated.clip, annotated.annotation)) out.clips.push_back(std::move(sub));

  const fs::path out_file = output.empty() ? out_path(g, "annotated.json") : fs::path(output);
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  motion::write_dataset(out_file.string(), out);
  fs::path sidecar = out_file;
  sidecar.replace_extension(".annotation.json");
  write_text(sidecar, annotation::sidecar_to_json(clip->id, annotated.annotation).dump(2) + "\n");

  const bool continuous = jump == 0.0;
  std::cout << "clip " << clip->id << ": " << clip->size() << " frames, pickup " << pickup << ", place " << place
            << ", window " << window << '\n'
            << "continuity at contact frames: max jump " << experiment::format_double(jump) << " m, "
            << (continuous ? "pass" : "FAIL") << '\n'
            << "wrote " << out_file.string() << ", " << sidecar.string() << '\n';
  return continuous ? 0 : kExitChecksFailed;
}

int cmd_rsi_sample(const Globals& g, const std::string& dataset_path, const std::string& task_name, double fraction,
                   std::size_t n) {
  using namespace hsi;
  const auto dataset = motion::read_dataset(dataset_path);
  const task::Task task = task::parse_task(task_name);
  const auto ranges = init::SceneRanges::defaults();
  const init::RsiConfig cfg{fraction, g.seed};
  cfg.validate();
  const init::DomainRanges domain;
  Rng rng(derive_seed(g.seed, hash_name("rsi")));

  std::ostringstream csv;
  csv << "index,mode,clip_id,phase,frame";
  const auto& keys = ranges.for_task(task);
  for (const auto& [name, _] : keys) csv << ',' << name;
  csv << ",delay_steps,kp_factor,kd_factor,payload_mass\n";

  std::size_t defaults = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto init = init::sample_init(dataset, task, ranges, cfg, domain, rng);
    defaults += init.mode == init::InitMode::DefaultPose ? 1 : 0;
    const auto scene = init.effective_scene();
    csv << i << ',' << init::to_string(init.mode) << ',' << init.clip_id << ','
        << experiment::format_double(init.phase) << ',' << init.frame_index;
    for (const auto& [name, _] : keys) csv << ',' << experiment::format_double(scene.at(name));
    const auto& r = init.randomization;
    csv << ',' << r.delay_steps << ',' << experiment::format_double(r.kp_factor) << ','
        << experiment::format_double(r.kd_factor) << ',' << experiment::format_double(r.payload_mass) << '\n';
  }
  const auto path = out_path(g, "rsi_samples.csv");
  write_text(path, csv.str());
  const double share = n ? static_cast<double>(defaults) / static_cast<double>(n) : 0.0;
  std::cout << n << " samples, default-pose share " << experiment::format_double(share) << " (configured "
            << experiment::format_double(fraction) << ")\nwrote " << path.string() << '\n';
  return 0;
}

int cmd_synth_clip(const Globals& g, std::size_t clips, std::size_t frames, const std::string& output) {
  using namespace hsi;
  Rng rng(derive_seed(g.seed, hash_name("synth")));
  motion::MotionDataset d;
  synthetic::ClipSpec spec;
  spec.frames = frames;
  for (std::size_t i = 0; i < clips; ++i) d.clips.push_back(synthetic::walking_clip("synth_" + std::to_string(i), spec, rng));
  const fs::path out_file = output.empty() ? out_path(g, "synthetic_clips.json") : fs::path(output);
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  motion::write_dataset(out_file.string(), d);
  std::cout << "wrote " << clips << " clips of " << frames << " frames to " << out_file.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Humanoid-scene interaction toolkit: localization simulation, reward tables, annotation, RSI."};
  app.require_subcommand(1);
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed (env HSI_SEED)");
  auto* out_opt = app.add_option("--out-dir", g.out_dir, "Output directory (env HSI_OUT_DIR)");
  app.add_option("--config", g.config, "Scenario config JSON for localize-sim")->check(CLI::ExistingFile);

  auto* loc = app.add_subcommand("localize-sim", "Run simulated coarse-to-fine localization trials");
  std::optional<int> trials;
  unsigned threads = 0;
  loc->add_option("--trials", trials, "Override the trial count from the config");
  loc->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  auto* rc = app.add_subcommand("reward-check", "Evaluate reward kernels against a case table");
  std::string task_name = "all";
  std::string cases_path;
  rc->add_option("--task", task_name, "carry, sit, lie, standup, style_loco, or all");
  rc->add_option("--cases", cases_path, "Case table JSON")->required();

  auto* an = app.add_subcommand("annotate", "Smooth a clip, synthesize its object trajectory, split subsets");
  std::string input, clip_id, output;
  std::size_t pickup = 0, place = 0;
  int window = hsi::annotation::kDefaultSmoothingWindow;
  an->add_option("--input", input, "Motion dataset JSON")->required();
  an->add_option("--clip", clip_id, "Clip id (default: first clip)");
  an->add_option("--pickup", pickup, "Pickup frame")->required();
  an->add_option("--place", place, "Place frame")->required();
  an->add_option("--window", window, "Smoothing window (odd)");
  an->add_option("--output", output, "Output dataset path (default: <out-dir>/annotated.json)");

  auto* rsi = app.add_subcommand("rsi-sample", "Draw hybrid reference-state episode starts");
  std::string dataset_path, rsi_task;
  double fraction = 0.0;
  std::size_t n = 1000;
  rsi->add_option("--dataset", dataset_path, "Motion dataset JSON")->required();
  rsi->add_option("--task", rsi_task, "carry, sit, lie, standup, style_loco")->required();
  rsi->add_option("--fraction", fraction, "Default-pose start fraction in [0, 1]")->required();
  rsi->add_option("-n,--count", n, "Number of samples");

  auto* syn = app.add_subcommand("synth-clip", "Write procedural demo clips in the dataset format");
  std::size_t clips = 1, frames = 120;
  std::string syn_out;
  syn->add_option("--clips", clips, "Number of clips");
  syn->add_option("--frames", frames, "Frames per clip");
  syn->add_option("--output", syn_out, "Output path (default: <out-dir>/synthetic_clips.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << "hsi-error type=usage message=" << quote(e.what()) << '\n';
    return code == 0 ? 0 : kExitError;
  }

  try {
    apply_env(g, seed_opt, out_opt);
    if (*loc) return cmd_localize(g, trials, threads == 0 ? std::thread::hardware_concurrency() : threads);
    if (*rc) return cmd_reward_check(g, task_name, cases_path);
    if (*an) return cmd_annotate(g, input, clip_id, pickup, place, window, output);
    if (*rsi) return cmd_rsi_sample(g, dataset_path, rsi_task, fraction, n);
    if (*syn) return cmd_synth_clip(g, clips, frames, syn_out);
  } catch (const hsi::FormatError& e) {
    std::cerr << "hsi-error type=format message=" << quote(e.what()) << '\n';
    return kExitError;
  } catch (const hsi::Error& e) {
    std::cerr << "hsi-error type=invalid message=" << quote(e.what()) << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "hsi-error type=internal message=" << quote(e.what()) << '\n';
    return kExitError;
  }
  return kExitError;
}
