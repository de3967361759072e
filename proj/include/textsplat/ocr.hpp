#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textsplat/image.hpp"

namespace textsplat {

// One recognized or expected word, optionally with the pixel box it was
// read from.
struct TextItem {
    std::string text;
    bool has_bbox = false;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive pixel bounds

    TextItem() = default;
    explicit TextItem(std::string t) : text(std::move(t)) {}
};

// Minimal edit distance (unit-cost insert/delete/substitute) over unicode
// scalar values; inputs are UTF-8.
int64_t levenshtein(const std::string& a, const std::string& b);

struct ViewScore {
    std::string view;
    int64_t gt_chars = 0;
    int64_t edit_cost = 0;
    double cer = 0;  // meaningful only when gt_chars > 0
};

// Recall-oriented word scoring: each ground-truth item (processed longest
// first, ties lexicographic) greedily takes the unused recognized item with
// the smallest edit distance, but only if that beats leaving it unmatched
// (full-length cost). Extra recognized items are free.
// cer = min(1, cost / gt_chars). Items are case-folded and
// whitespace-trimmed first.
ViewScore score_view(const std::vector<TextItem>& gt, const std::vector<TextItem>& recognized,
                     const std::string& view_name = {});

struct CerReport {
    std::vector<ViewScore> views;
    std::optional<double> scene_cer;  // absent when no view has ground truth
    int counted_views = 0;
};

// Unweighted mean of per-view cer over views with non-empty ground truth.
CerReport aggregate(const std::vector<ViewScore>& views);

// Deterministic dot-matrix reader matched to the generator's font: binarize
// at luma 0.5, group ink into lines, carve each line into glyph cells, and
// classify every cell by nearest template (normalized Hamming distance,
// reject above 0.35). Blank cells separate words.
std::vector<TextItem> recognize_builtin(const Image3& image);

// Run an external recognizer command (via the shell). Every "{image}" in
// the template is replaced with the escaped image path; a template without
// the placeholder runs unchanged. Stdout is parsed either as a JSON array
// of {"text": ...} objects or as newline-delimited words. A nonzero exit
// raises an error carrying the command's stderr.
std::vector<TextItem> recognize_external(const std::string& image_path,
                                         const std::string& command_template);

}  // namespace textsplat
