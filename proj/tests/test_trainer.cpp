// Tests for the training pipelines: run configuration parsing/validation,
// the text-only refinement phase, the joint phase, the single-phase
// baseline, held-out evaluation, metrics cadence, run artifacts, and
// reproducibility. All scenes come from the synthetic generator.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "textsplat/bundle.hpp"
#include "textsplat/common.hpp"
#include "textsplat/densify.hpp"
#include "textsplat/schedule.hpp"
#include "textsplat/splats.hpp"
#include "textsplat/synthbench.hpp"
#include "textsplat/trainer.hpp"

using namespace textsplat;

namespace {

// One small synthetic scene shared by every training test. Built once; all
// pipelines copy what they need.
const SceneBundle& synth_bundle() {
    static const SceneBundle bundle = [] {
        testutil::TempDir dir("trainer_fixture");
        SynthSpec spec;
        spec.words = {"AB"};
        spec.n_cameras = 6;
        spec.image_size = 48;
        spec.glyph_px = 21;
        spec.n_points = 150;
        spec.ink_fraction = 0.3;
        spec.noise = 0.002;
        spec.seed = 5;
        generate_scene(spec, dir.str());
        return load_bundle(dir.str());
    }();
    return bundle;
}

// Same scene with every mask wiped: no point can classify as text.
SceneBundle maskless_bundle() {
    SceneBundle b = synth_bundle();
    for (ViewRecord& v : b.views) v.mask = MaskGrid(v.mask.height, v.mask.width, 0);
    return b;
}

// Short-run defaults: metrics/checkpoints off, density control dormant.
RunConfig quick_cfg() {
    RunConfig cfg;
    cfg.t1 = 10;
    cfg.t2 = 20;
    cfg.n_max = 1;
    cfg.eval_interval = 100000;
    cfg.checkpoint_interval = 0;
    return cfg;
}

bool gaussian_equal(const Gaussian& a, const Gaussian& b) {
    return a.id == b.id && a.region == b.region && testutil::veq(a.position, b.position) &&
           testutil::veq(a.log_scale, b.log_scale) && testutil::qeq(a.rotation, b.rotation) &&
           a.opacity_logit == b.opacity_logit && a.sh == b.sh;
}

bool scenes_equal(const SplatScene& a, const SplatScene& b) {
    if (a.size() != b.size() || a.next_id != b.next_id || a.scene_extent != b.scene_extent)
        return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!gaussian_equal(a.gaussians[i], b.gaussians[i])) return false;
    return true;
}

std::map<int64_t, Vec3> point_positions(const SceneBundle& bundle) {
    std::map<int64_t, Vec3> out;
    for (const SparsePoint& p : bundle.points) out[p.point_id] = p.position;
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// metrics.csv minus the wall-clock column (the only nondeterministic field).
std::vector<std::string> strip_wall_clock(const std::vector<std::string>& lines) {
    std::vector<std::string> out;
    for (const std::string& line : lines) {
        size_t cut = line.rfind(',');
        out.push_back(cut == std::string::npos ? line : line.substr(0, cut));
    }
    return out;
}

Recognizer fixed_recognizer(std::vector<std::string> words) {
    return [words](const Image3&) {
        std::vector<TextItem> items;
        for (const std::string& w : words) items.emplace_back(w);
        return items;
    };
}

}  // namespace

TEST_CASE("training mode names round trip and reject unknowns") {
    for (TrainMode m : {TrainMode::Strings, TrainMode::Vanilla, TrainMode::StringsNoDensify,
                        TrainMode::StringsFreePos})
        CHECK(parse_train_mode(train_mode_name(m)) == m);
    CHECK(train_mode_name(TrainMode::Strings) == "strings");
    CHECK(train_mode_name(TrainMode::Vanilla) == "vanilla");
    CHECK_THROWS_AS(parse_train_mode("banana"), InvalidArgument);
    CHECK_THROWS_AS(parse_train_mode(""), InvalidArgument);
}

TEST_CASE("run config validation rejects bad values") {
    CHECK_NOTHROW(RunConfig{}.validate());
    CHECK_NOTHROW(quick_cfg().validate());

    auto broken = [](auto&& mutate) {
        RunConfig cfg = quick_cfg();
        mutate(cfg);
        return cfg;
    };
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.t1 = -1; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.t2 = c.t1 - 1; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.n_max = 0; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.tau = 0; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.dilation_fraction = 1.5; }).validate(),
                    InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.loss_lambda = -0.1; }).validate(),
                    InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.eval_interval = 0; }).validate(),
                    InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.checkpoint_interval = -1; }).validate(),
                    InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.densify_start = -1; }).validate(),
                    InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.densify_interval = 0; }).validate(),
                    InvalidArgument);
    // Schedule invariants surface through validation too.
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.alpha = 0.0; }).validate(), InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.base_lr_final = 0.0; }).validate(),
                    InvalidArgument);
    CHECK_THROWS_AS(broken([](RunConfig& c) { c.gamma = 50; }).validate(),  // outside (t1, t2)
                    InvalidArgument);
}

TEST_CASE("run config sentinels resolve against the step budget") {
    RunConfig cfg = quick_cfg();
    cfg.t1 = 300;
    cfg.t2 = 3000;
    cfg.alpha = 0.7;

    // beta/gamma < 0: the reference ramp (5e-4, 15000 over 3000/30000) is
    // compressed tenfold onto [300, 3000].
    ScheduleConfig s = cfg.resolved_schedule(2.0);
    CHECK(s.alpha == 0.7);
    CHECK(s.beta == doctest::Approx(5e-3).epsilon(1e-12));
    CHECK(s.gamma == doctest::Approx(1500.0).epsilon(1e-12));
    CHECK(s.t1 == 300);
    CHECK(s.t2 == 3000);
    CHECK(s.scene_extent == 2.0);
    CHECK(s.max_steps == -1);
    CHECK(s.decay_steps() == 2700);

    cfg.beta = 7e-4;
    cfg.gamma = 800;
    cfg.max_steps = 77;
    ScheduleConfig e = cfg.resolved_schedule(1.0);
    CHECK(e.beta == 7e-4);
    CHECK(e.gamma == 800.0);
    CHECK(e.decay_steps() == 77);

    CHECK(cfg.resolved_density().stop == 1500);  // densify_stop < 0 -> t2 / 2
    cfg.densify_stop = 123;
    CHECK(cfg.resolved_density().stop == 123);
}

TEST_CASE("config entries parse into typed fields") {
    RunConfig cfg;
    apply_run_config_entry(cfg, "mode", "strings_free_pos");
    apply_run_config_entry(cfg, "seed", "42");
    apply_run_config_entry(cfg, "t1", "120");
    apply_run_config_entry(cfg, "t2", "480");
    apply_run_config_entry(cfg, "alpha", "0.25");
    apply_run_config_entry(cfg, "loss_lambda", "0.3");
    apply_run_config_entry(cfg, "n_max", "7");
    apply_run_config_entry(cfg, "dilation_fraction", "0.05");
    CHECK(cfg.mode == TrainMode::StringsFreePos);
    CHECK(cfg.seed == 42);
    CHECK(cfg.t1 == 120);
    CHECK(cfg.t2 == 480);
    CHECK(cfg.alpha == 0.25);
    CHECK(cfg.loss_lambda == 0.3);
    CHECK(cfg.n_max == 7);
    CHECK(cfg.dilation_fraction == 0.05);

    // Snapshot bookkeeping keys pass through silently.
    RunConfig before = cfg;
    CHECK_NOTHROW(apply_run_config_entry(cfg, "version", "9.9.9"));
    CHECK_NOTHROW(apply_run_config_entry(cfg, "bundle", "/some/path"));
    CHECK(cfg.t1 == before.t1);
    CHECK(cfg.mode == before.mode);

    CHECK_THROWS_AS(apply_run_config_entry(cfg, "warp_factor", "9"), InvalidArgument);
    CHECK_THROWS_AS(apply_run_config_entry(cfg, "t1", "12x"), InvalidArgument);
    CHECK_THROWS_AS(apply_run_config_entry(cfg, "t1", "3.5"), InvalidArgument);
    CHECK_THROWS_AS(apply_run_config_entry(cfg, "alpha", "fast"), InvalidArgument);
    CHECK_THROWS_AS(apply_run_config_entry(cfg, "mode", "banana"), InvalidArgument);
}

TEST_CASE("config files read as key-value maps") {
    testutil::TempDir dir("train_config");
    {
        std::ofstream out(dir.path() / "run.cfg");
        out << "# comment line\n";
        out << "\n";
        out << "mode = vanilla\n";
        out << "  t2=250  \n";
        out << "alpha = 0.5   # trailing comment\n";
    }
    // Comments and blanks are skipped; keys and values are trimmed.
    auto entries = read_config_file((dir.path() / "run.cfg").string());
    CHECK(entries.at("mode") == "vanilla");
    CHECK(entries.at("t2") == "250");
    CHECK(entries.at("alpha") == "0.5");

    {
        std::ofstream out(dir.path() / "bad1.cfg");
        out << "mode vanilla\n";
    }
    CHECK_THROWS_AS(read_config_file((dir.path() / "bad1.cfg").string()), ParseError);
    {
        std::ofstream out(dir.path() / "bad2.cfg");
        out << "= 5\n";
    }
    CHECK_THROWS_AS(read_config_file((dir.path() / "bad2.cfg").string()), ParseError);
}

TEST_CASE("text phase trains only text gaussians and locks their positions") {
    const SceneBundle& bundle = synth_bundle();
    auto points = point_positions(bundle);

    RunConfig cfg = quick_cfg();
    cfg.mode = TrainMode::StringsNoDensify;
    cfg.t1 = 30;
    cfg.t2 = 60;

    SplatScene text = run_phase1(bundle, cfg);
    REQUIRE(text.size() > 0);
    CHECK(text.size() < bundle.points.size());

    bool any_opacity_moved = false;
    for (const Gaussian& g : text.gaussians) {
        CHECK(g.region == Region::Text);
        // Ids come from the sparse points and positions never move in the
        // locked text phase.
        REQUIRE(points.count(g.id) == 1);
        CHECK(testutil::veq(g.position, points.at(g.id)));
        if (g.opacity_logit != logit(0.1)) any_opacity_moved = true;
    }
    CHECK(any_opacity_moved);  // the optimizer did run

    // The free-position ablation uses the same seed but lets positions move.
    RunConfig free_cfg = cfg;
    free_cfg.mode = TrainMode::StringsFreePos;
    SplatScene moved = run_phase1(bundle, free_cfg);
    REQUIRE(moved.size() == text.size());
    bool any_position_moved = false;
    for (const Gaussian& g : moved.gaussians)
        if (!testutil::veq(g.position, points.at(g.id))) any_position_moved = true;
    CHECK(any_position_moved);
}

TEST_CASE("one-time densification replicates rarely seen text points") {
    const SceneBundle& bundle = synth_bundle();

    RunConfig cfg = quick_cfg();
    cfg.t1 = 0;  // isolate seeding + densification
    cfg.t2 = 10;

    cfg.n_max = 1;
    SplatScene base = run_phase1(bundle, cfg);
    REQUIRE(base.size() > 0);

    // strings_no_densify keeps the seeded set even with a big ceiling.
    RunConfig off = cfg;
    off.mode = TrainMode::StringsNoDensify;
    off.n_max = 9;
    CHECK(run_phase1(bundle, off).size() == base.size());

    // The duplicate counts follow the visibility plan over the text subset.
    std::map<int64_t, int> track_len;
    for (const SparsePoint& p : bundle.points) track_len[p.point_id] = int(p.track.size());
    std::vector<int> visibility;
    for (const Gaussian& g : base.gaussians) visibility.push_back(track_len.at(g.id));
    DensifyPlan plan = densify_counts(visibility, 9);
    size_t expected = 0;
    for (int c : plan.counts) expected += size_t(c);

    cfg.n_max = 9;
    SplatScene dense = run_phase1(bundle, cfg);
    CHECK(dense.size() == expected);
    CHECK(dense.size() >= base.size());
    CHECK(dense.next_id >= base.next_id);
}

TEST_CASE("text phase skips maskless scenes and rejects maskless train pools") {
    // No masks anywhere: no text points, empty result, baseline takes over.
    SceneBundle maskless = maskless_bundle();
    RunConfig cfg = quick_cfg();
    CHECK(run_phase1(maskless, cfg).size() == 0);

    // Masks only on the held-out view: points classify as text but no
    // training view can drive the masked loss.
    SceneBundle eval_only = synth_bundle();
    for (size_t i : eval_only.train_indices())
        eval_only.views[i].mask =
            MaskGrid(eval_only.views[i].mask.height, eval_only.views[i].mask.width, 0);
    RunConfig tight = quick_cfg();
    tight.tau = 1;
    CHECK_THROWS_WITH_AS(run_phase1(eval_only, tight),
                         doctest::Contains("non-empty mask"), InvalidArgument);
}

TEST_CASE("joint phase merges refined text with a fresh background") {
    const SceneBundle& bundle = synth_bundle();
    auto points = point_positions(bundle);

    RunConfig cfg = quick_cfg();
    cfg.t1 = 8;
    cfg.t2 = 8;  // empty joint phase: the merge comes back untouched

    SplatScene text = run_phase1(bundle, cfg);
    REQUIRE(text.size() > 0);
    SplatScene merged = run_phase2(bundle, text, cfg);

    CHECK(merged.size() == bundle.points.size());
    std::map<int64_t, const Gaussian*> by_id;
    for (const Gaussian& g : merged.gaussians) by_id[g.id] = &g;
    CHECK(by_id.size() == merged.size());  // unique ids

    // Sorted by id.
    for (size_t i = 1; i < merged.size(); ++i)
        CHECK(merged.gaussians[i - 1].id < merged.gaussians[i].id);

    // Refined text rides in bit-exact; background is freshly seeded.
    for (const Gaussian& g : text.gaussians) {
        REQUIRE(by_id.count(g.id) == 1);
        CHECK(gaussian_equal(*by_id.at(g.id), g));
    }
    size_t fresh = 0;
    for (const Gaussian& g : merged.gaussians) {
        if (g.region == Region::NonText) {
            CHECK(testutil::veq(g.position, points.at(g.id)));
            CHECK(g.opacity_logit == logit(0.1));
            ++fresh;
        }
    }
    CHECK(fresh == merged.size() - text.size());
}

TEST_CASE("a maskless text phase reduces the pipeline to the baseline bit for bit") {
    SceneBundle maskless = maskless_bundle();

    RunConfig cfg = quick_cfg();
    cfg.mode = TrainMode::Strings;
    cfg.alpha = 1.0;  // no region attenuation
    cfg.t1 = 0;       // no text-only steps
    cfg.t2 = 25;
    cfg.densify_interval = 5;  // let density control fire inside the window
    cfg.densify_start = 5;
    cfg.densify_stop = 20;
    cfg.seed = 11;

    SplatScene refined = run_phase1(maskless, cfg);
    REQUIRE(refined.size() == 0);

    SplatScene pipeline = run_phase2(maskless, refined, cfg);
    SplatScene baseline = run_vanilla(maskless, cfg);
    CHECK(scenes_equal(pipeline, baseline));
    CHECK(pipeline.size() > 0);
}

TEST_CASE("metrics rows follow the evaluation cadence") {
    const SceneBundle& bundle = synth_bundle();

    RunConfig cfg = quick_cfg();
    cfg.t1 = 6;
    cfg.t2 = 14;
    cfg.eval_interval = 4;

    std::vector<MetricRow> rows;
    TrainHooks hooks;
    hooks.metrics = [&](const MetricRow& r) { rows.push_back(r); };

    SplatScene text = run_phase1(bundle, cfg, &hooks);
    REQUIRE(rows.size() == 3);  // 0 (baseline), 4 (interval), 6 (phase end)
    CHECK(rows[0].iteration == 0);
    CHECK(rows[1].iteration == 4);
    CHECK(rows[2].iteration == 6);
    for (const MetricRow& r : rows) {
        CHECK(r.phase == 1);
        CHECK(std::isfinite(r.loss));
        CHECK(r.loss >= 0);
        CHECK(r.gaussian_count == int64_t(text.size()));
    }

    rows.clear();
    run_phase2(bundle, text, cfg, &hooks);
    REQUIRE(rows.size() == 3);  // 8, 12 (intervals), 14 (phase end); no row at t1
    CHECK(rows[0].iteration == 8);
    CHECK(rows[1].iteration == 12);
    CHECK(rows[2].iteration == 14);
    for (const MetricRow& r : rows) {
        CHECK(r.phase == 2);
        CHECK(std::isfinite(r.psnr));
        CHECK(r.gaussian_count > 0);
    }

    rows.clear();
    RunConfig van = quick_cfg();
    van.t1 = 0;
    van.t2 = 8;
    van.eval_interval = 3;
    run_vanilla(bundle, van, &hooks);
    REQUIRE(rows.size() == 4);  // 0, 3, 6, 8
    CHECK(rows[0].iteration == 0);
    CHECK(rows[1].iteration == 3);
    CHECK(rows[2].iteration == 6);
    CHECK(rows[3].iteration == 8);
    for (const MetricRow& r : rows) CHECK(r.phase == 0);
}

TEST_CASE("held-out evaluation aggregates psnr ssim and recognition") {
    const SceneBundle& bundle = synth_bundle();
    RunConfig cfg = quick_cfg();
    cfg.t1 = 0;
    cfg.t2 = 15;
    SplatScene scene = run_vanilla(bundle, cfg);

    // A recognizer that always reads the right word: zero character error.
    SceneEval good = evaluate_scene(scene, bundle, 0, fixed_recognizer({"AB"}));
    CHECK(std::isfinite(good.psnr));
    CHECK(good.psnr > 0);
    CHECK(good.ssim <= 1.0);
    CHECK(good.report.counted_views == 1);  // one held-out view carries words
    REQUIRE(good.report.scene_cer.has_value());
    CHECK(*good.report.scene_cer == 0.0);

    // A recognizer that reads nothing: every word is missing.
    SceneEval blind = evaluate_scene(scene, bundle, 0, fixed_recognizer({}));
    CHECK(blind.report.counted_views == 1);
    REQUIRE(blind.report.scene_cer.has_value());
    CHECK(*blind.report.scene_cer == 1.0);
    CHECK(blind.psnr == good.psnr);  // image quality does not depend on the reader

    // No held-out views at all: image metrics are undefined.
    SceneBundle train_only = bundle;
    for (ViewRecord& v : train_only.views) v.is_eval = false;
    SceneEval none = evaluate_scene(scene, train_only, 0, fixed_recognizer({"AB"}));
    CHECK(std::isnan(none.psnr));
    CHECK(std::isnan(none.ssim));
    CHECK(none.report.counted_views == 0);
    CHECK(!none.report.scene_cer.has_value());
}

TEST_CASE("training improves held-out image quality") {
    const SceneBundle& bundle = synth_bundle();

    RunConfig cfg = quick_cfg();
    cfg.t1 = 0;
    cfg.t2 = 0;  // no steps: the freshly seeded scene
    SplatScene init = run_vanilla(bundle, cfg);
    cfg.t2 = 80;
    SplatScene tuned = run_vanilla(bundle, cfg);

    Recognizer reader = fixed_recognizer({"AB"});
    double before = evaluate_scene(init, bundle, 0, reader).psnr;
    double after = evaluate_scene(tuned, bundle, 0, reader).psnr;
    CHECK(std::isfinite(before));
    CHECK(after > before + 0.25);
}

TEST_CASE("train runs write config metrics and checkpoints") {
    namespace fs = std::filesystem;
    const SceneBundle& bundle = synth_bundle();
    testutil::TempDir dir("train_run_artifacts");

    RunConfig cfg = quick_cfg();
    cfg.mode = TrainMode::Strings;
    cfg.n_max = 4;
    cfg.t1 = 6;
    cfg.t2 = 12;
    cfg.eval_interval = 5;
    cfg.checkpoint_interval = 4;
    cfg.seed = 3;

    std::string run_dir = dir.sub("strings_run");
    TrainResult result = train_run(bundle, cfg, run_dir, "demo_bundle");
    CHECK(result.final_scene.size() > 0);
    CHECK(result.final_checkpoint == (fs::path(run_dir) / "checkpoints" / "final.ply").string());
    CHECK(fs::exists(result.final_checkpoint));
    REQUIRE(!result.phase1_checkpoint.empty());
    CHECK(fs::exists(result.phase1_checkpoint));

    // Interval checkpoints skip phase ends (those get their own files).
    CHECK(fs::exists(fs::path(run_dir) / "checkpoints" / "iter_000004.ply"));
    CHECK(fs::exists(fs::path(run_dir) / "checkpoints" / "iter_000008.ply"));
    CHECK(!fs::exists(fs::path(run_dir) / "checkpoints" / "iter_000006.ply"));
    CHECK(!fs::exists(fs::path(run_dir) / "checkpoints" / "iter_000012.ply"));

    // The config snapshot reloads into an identical configuration.
    auto entries = read_config_file((fs::path(run_dir) / "config.txt").string());
    CHECK(entries.at("version") == kVersion);
    CHECK(entries.at("bundle") == "demo_bundle");
    RunConfig rt;
    for (const auto& [key, value] : entries) apply_run_config_entry(rt, key, value);
    CHECK(rt.mode == cfg.mode);
    CHECK(rt.seed == cfg.seed);
    CHECK(rt.t1 == cfg.t1);
    CHECK(rt.t2 == cfg.t2);
    CHECK(rt.alpha == cfg.alpha);
    CHECK(rt.beta == cfg.beta);
    CHECK(rt.gamma == cfg.gamma);
    CHECK(rt.base_lr_init == cfg.base_lr_init);
    CHECK(rt.base_lr_final == cfg.base_lr_final);
    CHECK(rt.max_steps == cfg.max_steps);
    CHECK(rt.densify_interval == cfg.densify_interval);
    CHECK(rt.densify_start == cfg.densify_start);
    CHECK(rt.densify_stop == cfg.densify_stop);
    CHECK(rt.grad_threshold == cfg.grad_threshold);
    CHECK(rt.opacity_prune == cfg.opacity_prune);
    CHECK(rt.opacity_reset_interval == cfg.opacity_reset_interval);
    CHECK(rt.percent_dense == cfg.percent_dense);
    CHECK(rt.n_max == cfg.n_max);
    CHECK(rt.tau == cfg.tau);
    CHECK(rt.dilation_fraction == cfg.dilation_fraction);
    CHECK(rt.loss_lambda == cfg.loss_lambda);
    CHECK(rt.eval_interval == cfg.eval_interval);
    CHECK(rt.checkpoint_interval == cfg.checkpoint_interval);

    // metrics.csv: header plus rows at 0/5/6 (phase 1) and 10/12 (phase 2),
    // wall clock non-decreasing.
    auto lines = read_lines(fs::path(run_dir) / "metrics.csv");
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == kMetricsHeader);
    std::vector<long long> iters;
    std::vector<int> phases;
    double last_clock = -1;
    for (size_t i = 1; i < lines.size(); ++i) {
        std::vector<std::string> fields;
        std::stringstream ss(lines[i]);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        REQUIRE(fields.size() == 8);
        iters.push_back(std::stoll(fields[0]));
        phases.push_back(std::stoi(fields[1]));
        double clock = std::stod(fields[7]);
        CHECK(clock >= last_clock);
        last_clock = clock;
    }
    CHECK(iters == std::vector<long long>{0, 5, 6, 10, 12});
    CHECK(phases == std::vector<int>{1, 1, 1, 2, 2});

    // The baseline writes no text-phase checkpoint.
    RunConfig van = quick_cfg();
    van.mode = TrainMode::Vanilla;
    van.t1 = 0;
    van.t2 = 6;
    van.eval_interval = 3;
    std::string van_dir = dir.sub("vanilla_run");
    TrainResult vres = train_run(bundle, van, van_dir);
    CHECK(vres.phase1_checkpoint.empty());
    CHECK(!fs::exists(fs::path(van_dir) / "checkpoints" / "phase1_final.ply"));
    CHECK(fs::exists(fs::path(van_dir) / "checkpoints" / "final.ply"));
    auto vlines = read_lines(fs::path(van_dir) / "metrics.csv");
    REQUIRE(vlines.size() == 4);  // header + 0, 3, 6
    CHECK(vlines[0] == kMetricsHeader);
}

TEST_CASE("identical seeds reproduce a run byte for byte") {
    namespace fs = std::filesystem;
    const SceneBundle& bundle = synth_bundle();
    testutil::TempDir dir("train_run_repro");

    RunConfig cfg = quick_cfg();
    cfg.mode = TrainMode::Strings;
    cfg.n_max = 4;
    cfg.t1 = 5;
    cfg.t2 = 12;
    cfg.eval_interval = 4;
    cfg.seed = 9;

    std::string dir_a = dir.sub("a");
    std::string dir_b = dir.sub("b");
    train_run(bundle, cfg, dir_a);
    train_run(bundle, cfg, dir_b);

    CHECK(read_file(fs::path(dir_a) / "checkpoints" / "final.ply") ==
          read_file(fs::path(dir_b) / "checkpoints" / "final.ply"));
    CHECK(read_file(fs::path(dir_a) / "checkpoints" / "phase1_final.ply") ==
          read_file(fs::path(dir_b) / "checkpoints" / "phase1_final.ply"));
    CHECK(strip_wall_clock(read_lines(fs::path(dir_a) / "metrics.csv")) ==
          strip_wall_clock(read_lines(fs::path(dir_b) / "metrics.csv")));

    // A different seed takes a different path.
    RunConfig other = cfg;
    other.seed = 10;
    std::string dir_c = dir.sub("c");
    train_run(bundle, other, dir_c);
    CHECK(read_file(fs::path(dir_a) / "checkpoints" / "final.ply") !=
          read_file(fs::path(dir_c) / "checkpoints" / "final.ply"));
}
