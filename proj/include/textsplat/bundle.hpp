#pragma once

#include <map>
#include <string>
#include <vector>

#include "textsplat/colmap_io.hpp"
#include "textsplat/image.hpp"

namespace textsplat {

// One registered view with everything training needs.
struct ViewRecord {
    CameraPose pose;
    CameraIntrinsics intr;  // resolved copy of the referenced camera
    Image3 image;           // RGB in [0,1]
    MaskGrid mask;          // raw text mask (undilated, values 0/1)
    std::vector<std::string> gt_words;  // expected words, empty if no sidecar
    bool is_eval = false;
};

// A complete training scene: views sorted lexicographically by image name
// with every 8th marked eval, plus the sparse points they were built from.
struct SceneBundle {
    std::map<int32_t, CameraIntrinsics> intrinsics;
    std::vector<ViewRecord> views;
    std::vector<SparsePoint> points;
    double extent = 1.0;  // camera bounding-sphere radius

    std::vector<size_t> eval_indices() const;
    std::vector<size_t> train_indices() const;
    const ViewRecord* find_view(int32_t image_id) const;
};

// Pairs each pose with its image and mask files (by image name) and applies
// the eval split. A missing mask file loads as all-zero with a warning;
// a missing image file or a mask/image dimension mismatch is an error.
SceneBundle assemble_bundle(const ColmapModel& model, const std::string& images_dir,
                            const std::string& masks_dir);

// Loads a dataset directory: sparse/0/ (COLMAP binary or text), images/,
// masks/, and optional gt_text/ word sidecars named <image stem>.txt.
SceneBundle load_bundle(const std::string& dir);

// Writes the same layout (binary COLMAP model, PNG images, 0/255 masks,
// gt_text sidecars for views that have words).
void save_bundle(const SceneBundle& bundle, const std::string& dir);

// Parses a ground-truth sidecar: whitespace-separated words, '#' comments.
std::vector<std::string> parse_gt_words(const std::string& path);

}  // namespace textsplat
