#include "textsplat/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "textsplat/adam.hpp"
#include "textsplat/common.hpp"
#include "textsplat/densify.hpp"
#include "textsplat/metrics.hpp"
#include "textsplat/ply_io.hpp"
#include "textsplat/render.hpp"
#include "textsplat/rng.hpp"
#include "textsplat/text_seg3d.hpp"

namespace textsplat {

namespace {

namespace fs = std::filesystem;

// Higher spherical-harmonic bands unlock one degree per kShUnlockInterval
// steps, identically in every mode so A/B comparisons stay fair.
constexpr int64_t kShUnlockInterval = 1000;

// Independent RNG streams per pipeline stage. Keying them off the seed
// (rather than sharing one stream) keeps each phase reproducible in
// isolation: run_phase2 draws the same numbers whether or not run_phase1
// executed in the same process.
constexpr uint64_t kForkPhase1 = 1;
constexpr uint64_t kForkPhase2 = 2;
constexpr uint64_t kForkTextDensify = 3;
constexpr uint64_t kForkDensityControl = 4;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

int sh_degree_at(int64_t t) { return int(std::min<int64_t>(3, t / kShUnlockInterval)); }

// The reference ramp the sentinels rescale from (its own defaults).
ScheduleConfig reference_schedule() { return ScheduleConfig{}; }

void sort_by_id(SplatScene& scene) {
    std::sort(scene.gaussians.begin(), scene.gaussians.end(),
              [](const Gaussian& a, const Gaussian& b) { return a.id < b.id; });
}

bool mask_nonempty(const MaskGrid& m) {
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(y, x)) return true;
    return false;
}

Recognizer builtin_recognizer() {
    return [](const Image3& img) { return recognize_builtin(img); };
}

// Per-view dilated masks, the text/non-text point split, and the full
// initial scene (id-ordered so training order never depends on file order).
struct Prepared {
    std::vector<MaskGrid> dilated;  // parallel to bundle.views
    PointPartition partition;
    SplatScene full;
};

Prepared prepare(const SceneBundle& bundle, const RunConfig& cfg) {
    Prepared p;
    p.dilated.reserve(bundle.views.size());
    std::map<int32_t, MaskGrid> mask_map;
    std::vector<CameraPose> poses;
    poses.reserve(bundle.views.size());
    for (const auto& view : bundle.views) {
        p.dilated.push_back(dilate_mask(view.mask, cfg.dilation_fraction));
        mask_map[view.pose.image_id] = p.dilated.back();
        poses.push_back(view.pose);
    }
    p.partition = classify_points(bundle.points, bundle.intrinsics, poses, mask_map, cfg.tau);
    p.full = init_gaussians(bundle.points, p.partition, bundle.extent);
    sort_by_id(p.full);
    return p;
}

struct LoopPlan {
    int64_t t_begin = 0;  // steps run over (t_begin, t_end]
    int64_t t_end = 0;
    int phase_label = 0;
    std::vector<size_t> pool;  // bundle view indices to sample from
    bool masked = false;
    const std::vector<MaskGrid>* masks = nullptr;  // required when masked
    enum class PosPolicy { Zero, Base, Region } pos = PosPolicy::Region;
    ScheduleConfig sched;
    DensityControlConfig dcfg;
    double lambda = kSsimLambda;
    int eval_interval = 100;
    int checkpoint_interval = 0;
};

MetricRow measure_row(const SplatScene& scene, const SceneBundle& bundle, int64_t t, int phase,
                      double loss) {
    SceneEval ev = evaluate_scene(scene, bundle, sh_degree_at(t), builtin_recognizer());
    MetricRow row;
    row.iteration = t;
    row.phase = phase;
    row.loss = loss;
    row.psnr = ev.psnr;
    row.ssim = ev.ssim;
    row.cer = ev.report.scene_cer ? *ev.report.scene_cer : quiet_nan();
    row.gaussian_count = int64_t(scene.size());
    return row;
}

std::pair<double, double> position_lrs(const LoopPlan& plan, int64_t t) {
    switch (plan.pos) {
        case LoopPlan::PosPolicy::Zero:
            return {0.0, 0.0};
        case LoopPlan::PosPolicy::Base: {
            double lr = base_position_lr(double(t), plan.sched);
            return {lr, lr};
        }
        case LoopPlan::PosPolicy::Region:
            return {effective_position_lr(double(t), Region::Text, plan.sched),
                    effective_position_lr(double(t), Region::NonText, plan.sched)};
    }
    return {0.0, 0.0};
}

void train_loop(SplatScene& scene, const SceneBundle& bundle, const LoopPlan& plan, Rng rng,
                const TrainHooks* hooks) {
    if (plan.t_end <= plan.t_begin) return;
    if (plan.pool.empty())
        throw InvalidArgument("trainer: no training views available for this phase");
    if (plan.masked && plan.masks == nullptr)
        throw InvalidArgument("trainer: masked loss needs per-view masks");

    OptimizerState state;
    state.init(scene.size());
    DensityStats stats;
    stats.init(scene.size());
    Rng density_rng = rng.fork(kForkDensityControl);

    std::vector<size_t> order;
    size_t cursor = 0;
    auto refill = [&] {
        order = plan.pool;
        rng.shuffle(order);
        cursor = 0;
    };
    refill();

    RenderOptions opts;  // black background

    auto loss_at = [&](const ViewRecord& view, size_t view_index, const Image3& rendered) {
        return plan.masked ? masked_l1_loss(rendered, view.image, &(*plan.masks)[view_index])
                           : full_loss(rendered, view.image, plan.lambda);
    };

    if (plan.t_begin == 0 && hooks && hooks->metrics) {
        // Baseline row: the loss the first step is about to see, no update.
        const size_t vi = order[0];
        const ViewRecord& view = bundle.views[vi];
        opts.sh_degree = sh_degree_at(0);
        Image3 rendered = render(scene, view.intr, view.pose, opts);
        LossResult l = loss_at(view, vi, rendered);
        hooks->metrics(measure_row(scene, bundle, 0, plan.phase_label, l.loss));
    }

    for (int64_t t = plan.t_begin + 1; t <= plan.t_end; ++t) {
        if (cursor == order.size()) refill();
        const size_t vi = order[cursor++];
        const ViewRecord& view = bundle.views[vi];

        opts.sh_degree = sh_degree_at(t);
        RenderContext ctx;
        Image3 rendered = render_forward(scene, view.intr, view.pose, opts, ctx);
        LossResult l = loss_at(view, vi, rendered);
        ParamGrads grads = render_backward_ctx(scene, view.intr, view.pose, opts, l.grad, ctx);
        stats.accumulate(grads);

        auto [lr_text, lr_nontext] = position_lrs(plan, t);
        adam_step(scene, state, grads, lr_text, lr_nontext);

        bool in_window = t >= plan.dcfg.start && t < plan.dcfg.stop;
        if (in_window && t % plan.dcfg.interval == 0) {
            density_control_step(scene, state, stats, plan.dcfg, density_rng);
            stats.init(scene.size());
        }
        if (in_window && t % plan.dcfg.opacity_reset_interval == 0) reset_opacity(scene, state);

        if (hooks) {
            if (hooks->metrics && (t % plan.eval_interval == 0 || t == plan.t_end))
                hooks->metrics(measure_row(scene, bundle, t, plan.phase_label, l.loss));
            if (hooks->checkpoint && plan.checkpoint_interval > 0 &&
                t % plan.checkpoint_interval == 0 && t != plan.t_end)
                hooks->checkpoint(t, scene);
        }
    }
}

// Baseline: t1 collapsed to zero, decay over the whole run, ramp disabled.
// gamma/beta are still resolved so the config validates, but PosPolicy::Base
// never reads them.
ScheduleConfig vanilla_schedule(const RunConfig& cfg, double scene_extent) {
    ScheduleConfig s = scaled_schedule(reference_schedule(), 0, cfg.t2);
    s.base_lr_init = cfg.base_lr_init;
    s.base_lr_final = cfg.base_lr_final;
    s.max_steps = cfg.t2;
    s.scene_extent = scene_extent;
    s.validate();
    return s;
}

DensityControlConfig phase1_density(const RunConfig& cfg) {
    DensityControlConfig d = cfg.resolved_density();
    if (cfg.t2 > 0) {
        double s = double(cfg.t1) / double(cfg.t2);
        d.start = int(std::llround(d.start * s));
        d.stop = int(std::llround(d.stop * s));
    }
    return d;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim_copy(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        double v = std::stod(value, &used);
        if (trim_copy(value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument(cat("config: key '", key, "' needs a number, got '", value, "'"));
}

int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        int64_t v = std::stoll(value, &used);
        if (trim_copy(value.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument(cat("config: key '", key, "' needs an integer, got '", value, "'"));
}

}  // namespace

TrainMode parse_train_mode(const std::string& name) {
    if (name == "strings") return TrainMode::Strings;
    if (name == "vanilla") return TrainMode::Vanilla;
    if (name == "strings_no_densify") return TrainMode::StringsNoDensify;
    if (name == "strings_free_pos") return TrainMode::StringsFreePos;
    throw InvalidArgument(cat("unknown training mode '", name,
                              "' (expected strings, vanilla, strings_no_densify, "
                              "or strings_free_pos)"));
}

std::string train_mode_name(TrainMode mode) {
    switch (mode) {
        case TrainMode::Strings: return "strings";
        case TrainMode::Vanilla: return "vanilla";
        case TrainMode::StringsNoDensify: return "strings_no_densify";
        case TrainMode::StringsFreePos: return "strings_free_pos";
    }
    return "strings";
}

void RunConfig::validate() const {
    if (t1 < 0) throw InvalidArgument(cat("config: t1 must be >= 0, got ", t1));
    if (t2 < t1) throw InvalidArgument(cat("config: t2 (", t2, ") must be >= t1 (", t1, ")"));
    if (n_max < 1) throw InvalidArgument(cat("config: n_max must be >= 1, got ", n_max));
    if (tau < 1) throw InvalidArgument(cat("config: tau must be >= 1, got ", tau));
    if (!(dilation_fraction >= 0 && dilation_fraction <= 1))
        throw InvalidArgument(
            cat("config: dilation_fraction must lie in [0, 1], got ", dilation_fraction));
    if (!(loss_lambda >= 0 && loss_lambda <= 1))
        throw InvalidArgument(cat("config: loss_lambda must lie in [0, 1], got ", loss_lambda));
    if (eval_interval < 1)
        throw InvalidArgument(cat("config: eval_interval must be >= 1, got ", eval_interval));
    if (checkpoint_interval < 0)
        throw InvalidArgument(
            cat("config: checkpoint_interval must be >= 0, got ", checkpoint_interval));
    if (densify_start < 0)
        throw InvalidArgument(cat("config: densify_start must be >= 0, got ", densify_start));
    resolved_schedule(1.0);  // validates schedule numbers, sentinels included
    resolved_density().validate();
}

ScheduleConfig RunConfig::resolved_schedule(double scene_extent) const {
    ScheduleConfig s = scaled_schedule(reference_schedule(), t1, t2);
    s.alpha = alpha;
    if (beta >= 0) s.beta = beta;
    if (gamma >= 0) s.gamma = gamma;
    s.base_lr_init = base_lr_init;
    s.base_lr_final = base_lr_final;
    s.max_steps = max_steps;
    s.scene_extent = scene_extent;
    s.validate();
    return s;
}

DensityControlConfig RunConfig::resolved_density() const {
    DensityControlConfig d;
    d.interval = densify_interval;
    d.start = densify_start;
    d.stop = densify_stop >= 0 ? densify_stop : t2 / 2;
    d.grad_threshold = grad_threshold;
    d.opacity_prune = opacity_prune;
    d.opacity_reset_interval = opacity_reset_interval;
    d.percent_dense = percent_dense;
    d.validate();
    return d;
}

void apply_run_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "version" || key == "bundle") return;  // snapshot metadata
    if (key == "mode") {
        cfg.mode = parse_train_mode(trim_copy(value));
        return;
    }
    if (key == "seed") {
        cfg.seed = uint64_t(parse_int(key, value));
        return;
    }
    struct DoubleKey {
        const char* name;
        double RunConfig::* field;
    };
    static constexpr DoubleKey kDoubles[] = {
        {"alpha", &RunConfig::alpha},
        {"beta", &RunConfig::beta},
        {"gamma", &RunConfig::gamma},
        {"base_lr_init", &RunConfig::base_lr_init},
        {"base_lr_final", &RunConfig::base_lr_final},
        {"grad_threshold", &RunConfig::grad_threshold},
        {"opacity_prune", &RunConfig::opacity_prune},
        {"percent_dense", &RunConfig::percent_dense},
        {"dilation_fraction", &RunConfig::dilation_fraction},
        {"loss_lambda", &RunConfig::loss_lambda},
    };
    struct IntKey {
        const char* name;
        int RunConfig::* field;
    };
    static constexpr IntKey kInts[] = {
        {"t1", &RunConfig::t1},
        {"t2", &RunConfig::t2},
        {"max_steps", &RunConfig::max_steps},
        {"densify_interval", &RunConfig::densify_interval},
        {"densify_start", &RunConfig::densify_start},
        {"densify_stop", &RunConfig::densify_stop},
        {"opacity_reset_interval", &RunConfig::opacity_reset_interval},
        {"n_max", &RunConfig::n_max},
        {"tau", &RunConfig::tau},
        {"eval_interval", &RunConfig::eval_interval},
        {"checkpoint_interval", &RunConfig::checkpoint_interval},
    };
    for (const auto& e : kDoubles)
        if (key == e.name) {
            cfg.*(e.field) = parse_double(key, value);
            return;
        }
    for (const auto& e : kInts)
        if (key == e.name) {
            cfg.*(e.field) = int(parse_int(key, value));
            return;
        }
    throw InvalidArgument(cat("config: unknown key '", key, "'"));
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(cat("config: cannot open ", path));
    std::map<std::string, std::string> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string text = trim_copy(line);
        if (text.empty()) continue;
        size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ParseError(cat("config: ", path, ":", lineno, ": expected 'key = value'"));
        std::string key = trim_copy(text.substr(0, eq));
        std::string value = trim_copy(text.substr(eq + 1));
        if (key.empty())
            throw ParseError(cat("config: ", path, ":", lineno, ": empty key"));
        entries[key] = value;
    }
    return entries;
}

SceneEval evaluate_scene(const SplatScene& scene, const SceneBundle& bundle, int sh_degree,
                         const Recognizer& recognizer) {
    SceneEval out;
    auto evals = bundle.eval_indices();
    if (evals.empty()) {
        out.psnr = quiet_nan();
        out.ssim = quiet_nan();
        return out;
    }
    RenderOptions opts;
    opts.sh_degree = sh_degree;
    double psnr_sum = 0, ssim_sum = 0;
    std::vector<ViewScore> scores;
    for (size_t i : evals) {
        const ViewRecord& view = bundle.views[i];
        Image3 img = render(scene, view.intr, view.pose, opts);
        psnr_sum += psnr(img, view.image);
        ssim_sum += ssim(img, view.image);
        if (!view.gt_words.empty()) {
            std::vector<TextItem> gt;
            gt.reserve(view.gt_words.size());
            for (const auto& w : view.gt_words) gt.emplace_back(w);
            scores.push_back(score_view(gt, recognizer(img), view.pose.name));
        }
    }
    out.psnr = psnr_sum / double(evals.size());
    out.ssim = ssim_sum / double(evals.size());
    out.report = aggregate(scores);
    return out;
}

SplatScene run_phase1(const SceneBundle& bundle, const RunConfig& cfg, const TrainHooks* hooks) {
    cfg.validate();
    Prepared p = prepare(bundle, cfg);

    SplatScene text;
    text.scene_extent = p.full.scene_extent;
    text.next_id = p.full.next_id;
    for (const auto& g : p.full.gaussians)
        if (g.region == Region::Text) text.gaussians.push_back(g);
    if (text.gaussians.empty()) {
        std::fprintf(stderr,
                     "trainer: warning: no text points found; text phase skipped "
                     "(training degrades to the single-phase baseline)\n");
        return text;
    }

    if (cfg.mode != TrainMode::StringsNoDensify && cfg.n_max > 1) {
        std::map<int64_t, int> track_len;
        for (const auto& pt : bundle.points) track_len[pt.point_id] = int(pt.track.size());
        std::vector<int> visibility;
        visibility.reserve(text.gaussians.size());
        for (const auto& g : text.gaussians) visibility.push_back(track_len.at(g.id));
        DensifyPlan plan = densify_counts(visibility, cfg.n_max);
        text = densify_text(text, plan, Rng(cfg.seed).fork(kForkTextDensify));
    }

    if (cfg.t1 == 0) return text;

    LoopPlan plan;
    plan.t_begin = 0;
    plan.t_end = cfg.t1;
    plan.phase_label = 1;
    for (size_t i : bundle.train_indices())
        if (mask_nonempty(bundle.views[i].mask)) plan.pool.push_back(i);
    if (plan.pool.empty())
        throw InvalidArgument("trainer: text phase needs a training view with a non-empty mask");
    plan.masked = true;
    plan.masks = &p.dilated;
    plan.pos = cfg.mode == TrainMode::StringsFreePos ? LoopPlan::PosPolicy::Base
                                                     : LoopPlan::PosPolicy::Zero;
    plan.sched = cfg.mode == TrainMode::StringsFreePos ? vanilla_schedule(cfg, bundle.extent)
                                                       : cfg.resolved_schedule(bundle.extent);
    plan.dcfg = phase1_density(cfg);
    plan.lambda = cfg.loss_lambda;
    plan.eval_interval = cfg.eval_interval;
    plan.checkpoint_interval = cfg.checkpoint_interval;
    train_loop(text, bundle, plan, Rng(cfg.seed).fork(kForkPhase1), hooks);
    return text;
}

SplatScene run_phase2(const SceneBundle& bundle, const SplatScene& refined_text,
                      const RunConfig& cfg, const TrainHooks* hooks) {
    cfg.validate();
    Prepared p = prepare(bundle, cfg);

    SplatScene scene;
    scene.scene_extent = p.full.scene_extent;
    scene.next_id = std::max(p.full.next_id, refined_text.next_id);
    for (const auto& g : p.full.gaussians)
        if (g.region == Region::NonText) scene.gaussians.push_back(g);
    scene.gaussians.insert(scene.gaussians.end(), refined_text.gaussians.begin(),
                           refined_text.gaussians.end());
    sort_by_id(scene);

    LoopPlan plan;
    plan.t_begin = cfg.t1;
    plan.t_end = cfg.t2;
    plan.phase_label = 2;
    plan.pool = bundle.train_indices();
    plan.masked = false;
    plan.pos = LoopPlan::PosPolicy::Region;
    plan.sched = cfg.resolved_schedule(bundle.extent);
    plan.dcfg = cfg.resolved_density();
    plan.lambda = cfg.loss_lambda;
    plan.eval_interval = cfg.eval_interval;
    plan.checkpoint_interval = cfg.checkpoint_interval;
    train_loop(scene, bundle, plan, Rng(cfg.seed).fork(kForkPhase2), hooks);
    return scene;
}

SplatScene run_vanilla(const SceneBundle& bundle, const RunConfig& cfg, const TrainHooks* hooks) {
    cfg.validate();
    PointPartition partition;
    for (const auto& pt : bundle.points) partition.nontext_ids.insert(pt.point_id);
    SplatScene scene = init_gaussians(bundle.points, partition, bundle.extent);
    sort_by_id(scene);

    LoopPlan plan;
    plan.t_begin = 0;
    plan.t_end = cfg.t2;
    plan.phase_label = 0;
    plan.pool = bundle.train_indices();
    plan.masked = false;
    plan.pos = LoopPlan::PosPolicy::Base;
    plan.sched = vanilla_schedule(cfg, bundle.extent);
    plan.dcfg = cfg.resolved_density();
    plan.lambda = cfg.loss_lambda;
    plan.eval_interval = cfg.eval_interval;
    plan.checkpoint_interval = cfg.checkpoint_interval;
    train_loop(scene, bundle, plan, Rng(cfg.seed).fork(kForkPhase2), hooks);
    return scene;
}

TrainResult train_run(const SceneBundle& bundle, const RunConfig& cfg, const std::string& run_dir,
                      const std::string& bundle_note) {
    cfg.validate();
    fs::path root(run_dir);
    fs::create_directories(root / "checkpoints");

    {
        std::ofstream snap(root / "config.txt");
        if (!snap) throw IoError(cat("trainer: cannot write config snapshot in ", run_dir));
        snap << "# training run configuration\n";
        snap << "version = " << kVersion << "\n";
        if (!bundle_note.empty()) snap << "bundle = " << bundle_note << "\n";
        snap << "mode = " << train_mode_name(cfg.mode) << "\n";
        snap << "seed = " << cfg.seed << "\n";
        snap << "alpha = " << format_double(cfg.alpha) << "\n";
        snap << "beta = " << format_double(cfg.beta) << "\n";
        snap << "gamma = " << format_double(cfg.gamma) << "\n";
        snap << "t1 = " << cfg.t1 << "\n";
        snap << "t2 = " << cfg.t2 << "\n";
        snap << "base_lr_init = " << format_double(cfg.base_lr_init) << "\n";
        snap << "base_lr_final = " << format_double(cfg.base_lr_final) << "\n";
        snap << "max_steps = " << cfg.max_steps << "\n";
        snap << "densify_interval = " << cfg.densify_interval << "\n";
        snap << "densify_start = " << cfg.densify_start << "\n";
        snap << "densify_stop = " << cfg.densify_stop << "\n";
        snap << "grad_threshold = " << format_double(cfg.grad_threshold) << "\n";
        snap << "opacity_prune = " << format_double(cfg.opacity_prune) << "\n";
        snap << "opacity_reset_interval = " << cfg.opacity_reset_interval << "\n";
        snap << "percent_dense = " << format_double(cfg.percent_dense) << "\n";
        snap << "n_max = " << cfg.n_max << "\n";
        snap << "tau = " << cfg.tau << "\n";
        snap << "dilation_fraction = " << format_double(cfg.dilation_fraction) << "\n";
        snap << "loss_lambda = " << format_double(cfg.loss_lambda) << "\n";
        snap << "eval_interval = " << cfg.eval_interval << "\n";
        snap << "checkpoint_interval = " << cfg.checkpoint_interval << "\n";
        ScheduleConfig sched = cfg.resolved_schedule(bundle.extent);
        snap << "# resolved: beta = " << format_double(sched.beta)
             << ", gamma = " << format_double(sched.gamma)
             << ", densify_stop = " << cfg.resolved_density().stop
             << ", scene_extent = " << format_double(bundle.extent) << "\n";
    }

    std::ofstream csv(root / "metrics.csv");
    if (!csv) throw IoError(cat("trainer: cannot write metrics.csv in ", run_dir));
    csv << kMetricsHeader << "\n";

    auto start = std::chrono::steady_clock::now();
    TrainHooks hooks;
    hooks.metrics = [&](const MetricRow& r) {
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char buf[352];
        std::snprintf(buf, sizeof buf, "%lld,%d,%.17g,%.17g,%.17g,%.17g,%lld,%.3f\n",
                      static_cast<long long>(r.iteration), r.phase, r.loss, r.psnr, r.ssim, r.cer,
                      static_cast<long long>(r.gaussian_count), elapsed);
        csv << buf;
        csv.flush();
    };
    hooks.checkpoint = [&](int64_t t, const SplatScene& scene) {
        char name[48];
        std::snprintf(name, sizeof name, "iter_%06lld.ply", static_cast<long long>(t));
        write_ply_gaussians(scene, (root / "checkpoints" / name).string());
    };

    TrainResult result;
    if (cfg.mode == TrainMode::Vanilla) {
        result.final_scene = run_vanilla(bundle, cfg, &hooks);
    } else {
        SplatScene refined = run_phase1(bundle, cfg, &hooks);
        result.phase1_checkpoint = (root / "checkpoints" / "phase1_final.ply").string();
        write_ply_gaussians(refined, result.phase1_checkpoint);
        result.final_scene = run_phase2(bundle, refined, cfg, &hooks);
    }
    result.final_checkpoint = (root / "checkpoints" / "final.ply").string();
    write_ply_gaussians(result.final_scene, result.final_checkpoint);
    return result;
}

}  // namespace textsplat
