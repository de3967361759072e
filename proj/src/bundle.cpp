#include "textsplat/bundle.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "textsplat/common.hpp"
#include "textsplat/geometry.hpp"

namespace fs = std::filesystem;

namespace textsplat {

namespace {

std::string stem_of(const std::string& name) {
    size_t dot = name.rfind('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

std::vector<size_t> SceneBundle::eval_indices() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < views.size(); ++i)
        if (views[i].is_eval) out.push_back(i);
    return out;
}

std::vector<size_t> SceneBundle::train_indices() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < views.size(); ++i)
        if (!views[i].is_eval) out.push_back(i);
    return out;
}

const ViewRecord* SceneBundle::find_view(int32_t image_id) const {
    for (const auto& v : views)
        if (v.pose.image_id == image_id) return &v;
    return nullptr;
}

SceneBundle assemble_bundle(const ColmapModel& model, const std::string& images_dir,
                            const std::string& masks_dir) {
    SceneBundle bundle;
    bundle.intrinsics = model.intrinsics;
    bundle.points = model.points;

    std::vector<CameraPose> poses = model.poses;
    std::sort(poses.begin(), poses.end(),
              [](const CameraPose& a, const CameraPose& b) { return a.name < b.name; });
    bundle.extent = scene_extent(poses);

    bundle.views.reserve(poses.size());
    for (size_t i = 0; i < poses.size(); ++i) {
        ViewRecord v;
        v.pose = poses[i];
        v.intr = model.intrinsics.at(poses[i].camera_id);
        v.is_eval = i % 8 == 0;

        std::string image_path = images_dir + "/" + v.pose.name;
        if (!fs::exists(image_path))
            throw IoError(cat(image_path, ": image file missing for pose '", v.pose.name, "'"));
        v.image = read_png_rgb(image_path);
        if (v.image.width != v.intr.width || v.image.height != v.intr.height)
            throw InvalidArgument(cat(image_path, ": image is ", v.image.width, "x",
                                      v.image.height, " but camera ", v.intr.camera_id,
                                      " declares ", v.intr.width, "x", v.intr.height));

        std::string mask_path = masks_dir + "/" + v.pose.name;
        if (fs::exists(mask_path)) {
            v.mask = read_png_mask(mask_path);
            if (v.mask.width != v.image.width || v.mask.height != v.image.height)
                throw InvalidArgument(cat(mask_path, ": mask is ", v.mask.width, "x",
                                          v.mask.height, " but its image is ", v.image.width,
                                          "x", v.image.height));
        } else {
            std::cerr << "warning: no mask for '" << v.pose.name << "'; assuming no text\n";
            v.mask = MaskGrid(v.image.height, v.image.width, 0);
        }
        bundle.views.push_back(std::move(v));
    }
    return bundle;
}

SceneBundle load_bundle(const std::string& dir) {
    ColmapModel model = read_colmap_model(dir + "/sparse/0", ColmapFormat::Auto);
    SceneBundle bundle = assemble_bundle(model, dir + "/images", dir + "/masks");
    for (auto& v : bundle.views) {
        std::string sidecar = dir + "/gt_text/" + stem_of(v.pose.name) + ".txt";
        if (fs::exists(sidecar)) v.gt_words = parse_gt_words(sidecar);
    }
    return bundle;
}

void save_bundle(const SceneBundle& bundle, const std::string& dir) {
    ColmapModel model;
    model.intrinsics = bundle.intrinsics;
    model.points = bundle.points;
    for (const auto& v : bundle.views) model.poses.push_back(v.pose);
    write_colmap_model_binary(model, dir + "/sparse/0");

    fs::create_directories(dir + "/images");
    fs::create_directories(dir + "/masks");
    bool any_words = false;
    for (const auto& v : bundle.views) {
        write_png_rgb(dir + "/images/" + v.pose.name, v.image);
        write_png_gray(dir + "/masks/" + v.pose.name, v.mask);
        any_words |= !v.gt_words.empty();
    }
    if (any_words) {
        fs::create_directories(dir + "/gt_text");
        for (const auto& v : bundle.views) {
            if (v.gt_words.empty()) continue;
            std::string path = dir + "/gt_text/" + stem_of(v.pose.name) + ".txt";
            std::ofstream out(path);
            if (!out) throw IoError(cat(path, ": cannot open for writing"));
            for (size_t i = 0; i < v.gt_words.size(); ++i)
                out << v.gt_words[i] << (i + 1 < v.gt_words.size() ? ' ' : '\n');
        }
    }
}

std::vector<std::string> parse_gt_words(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(cat(path, ": cannot open for reading"));
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::string w;
        while (ss >> w) words.push_back(w);
    }
    return words;
}

}  // namespace textsplat
