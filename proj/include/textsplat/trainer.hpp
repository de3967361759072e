#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "textsplat/bundle.hpp"
#include "textsplat/density_control.hpp"
#include "textsplat/losses.hpp"
#include "textsplat/ocr.hpp"
#include "textsplat/schedule.hpp"
#include "textsplat/splats.hpp"

namespace textsplat {

// strings          two-phase pipeline: text-only refinement, then joint tuning
// vanilla          single-phase baseline over the full point cloud
// strings_no_densify   strings without the one-time visibility densification
// strings_free_pos     strings with positions left free during the text phase
enum class TrainMode { Strings, Vanilla, StringsNoDensify, StringsFreePos };

TrainMode parse_train_mode(const std::string& name);
std::string train_mode_name(TrainMode mode);

// Everything a training run depends on besides the data. Sentinels marked
// "< 0" are resolved against t1/t2 so shortened runs keep the reference
// curve's shape without hand-tuning every knob.
struct RunConfig {
    TrainMode mode = TrainMode::Strings;

    // Position LR plan. beta/gamma < 0: derived by rescaling the reference
    // ramp (beta 5e-4, gamma 15000 over phases 3000/30000) onto [t1, t2].
    double alpha = 0.5;
    double beta = -1;
    double gamma = -1;
    int t1 = 3000;  // text-only steps; joint phase is (t1, t2]
    int t2 = 30000;
    double base_lr_init = 1.6e-4;
    double base_lr_final = 1.6e-6;
    int max_steps = -1;  // base-decay horizon; < 0 means t2 - t1

    // Adaptive density control. stop < 0 resolves to t2 / 2.
    int densify_interval = 100;
    int densify_start = 500;
    int densify_stop = -1;
    double grad_threshold = 2e-4;
    double opacity_prune = 0.005;
    int opacity_reset_interval = 3000;
    double percent_dense = 0.01;

    // Text pipeline.
    int n_max = 25;                  // visibility-densification ceiling
    int tau = 2;                     // views in-mask needed to call a point text
    double dilation_fraction = 0.02; // mask dilation diameter / image width

    // Run control.
    double loss_lambda = kSsimLambda;
    int eval_interval = 100;      // metrics cadence (plus phase ends)
    int checkpoint_interval = 0;  // extra snapshots; 0 = phase ends only
    uint64_t seed = 1;

    void validate() const;
    // Schedule with sentinels resolved; validates as a side effect.
    ScheduleConfig resolved_schedule(double scene_extent) const;
    DensityControlConfig resolved_density() const;
};

// Plain-text "key = value" config support ('#' comments). Unknown keys and
// unparseable values throw.
void apply_run_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);
std::map<std::string, std::string> read_config_file(const std::string& path);

// One metrics.csv row. loss is the training loss at that step (for the
// iteration-0 row, the loss the first step is about to see); psnr/ssim/cer
// are means over held-out views; wall_clock_s is stamped by the sink.
struct MetricRow {
    int64_t iteration = 0;
    int phase = 0;  // 0 single-phase baseline, 1 text-only, 2 joint
    double loss = 0;
    double psnr = 0;
    double ssim = 0;
    double cer = 0;  // NaN when no held-out view carries ground truth
    int64_t gaussian_count = 0;
    double wall_clock_s = 0;
};

inline constexpr char kMetricsHeader[] =
    "iteration,phase,loss,psnr,ssim,cer,gaussian_count,wall_clock_s";

struct TrainHooks {
    std::function<void(const MetricRow&)> metrics;  // every eval_interval + phase ends
    std::function<void(int64_t, const SplatScene&)> checkpoint;  // checkpoint_interval
};

// Turns an in-memory render into recognized words (the builtin reader, or a
// wrapper that shells out to an external command).
using Recognizer = std::function<std::vector<TextItem>(const Image3&)>;

// Held-out quality of one scene snapshot: mean PSNR/SSIM over eval views
// plus the word-recognition report (views with ground truth only).
struct SceneEval {
    double psnr = 0;
    double ssim = 0;
    CerReport report;
};

SceneEval evaluate_scene(const SplatScene& scene, const SceneBundle& bundle, int sh_degree,
                         const Recognizer& recognizer);

// Text-only refinement: classifies points through the dilated masks, seeds
// Gaussians for the text subset, duplicates rarely-seen ones, then runs t1
// steps of the masked L1 loss with positions locked (free in the
// strings_free_pos ablation), sampling only training views whose mask is
// non-empty. A scene without text returns empty (with a warning) and the
// pipeline degrades to the baseline.
SplatScene run_phase1(const SceneBundle& bundle, const RunConfig& cfg,
                      const TrainHooks* hooks = nullptr);

// Joint tuning: merges the refined text Gaussians with freshly seeded
// non-text ones and optimizes everything for steps t1+1..t2 with the full
// loss; position LRs follow the region-modulated ramp. t2 == t1 returns the
// merged scene untouched.
SplatScene run_phase2(const SceneBundle& bundle, const SplatScene& refined_text,
                      const RunConfig& cfg, const TrainHooks* hooks = nullptr);

// Single-phase baseline: all points, full loss, unmodulated position decay
// over t2 steps. The A/B control arm.
SplatScene run_vanilla(const SceneBundle& bundle, const RunConfig& cfg,
                       const TrainHooks* hooks = nullptr);

struct TrainResult {
    SplatScene final_scene;
    std::string final_checkpoint;
    std::string phase1_checkpoint;  // empty in vanilla mode
};

// Full driver: creates run_dir, snapshots the config (with seed and
// version) to config.txt, streams metrics.csv, writes interval checkpoints
// plus checkpoints/phase1_final.ply and checkpoints/final.ply.
// bundle_note is recorded as the dataset path for later `eval` runs.
TrainResult train_run(const SceneBundle& bundle, const RunConfig& cfg,
                      const std::string& run_dir, const std::string& bundle_note = {});

}  // namespace textsplat
