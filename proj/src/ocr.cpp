#include "textsplat/ocr.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "textsplat/common.hpp"
#include "textsplat/font5x7.hpp"

namespace textsplat {

namespace {

std::u32string decode_utf8(const std::string& s) {
    std::u32string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = s[i];
        uint32_t cp = 0;
        int extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            throw ParseError(cat("ocr: invalid UTF-8 byte 0x", int(c), " at offset ", i));
        }
        if (i + extra >= s.size())
            throw ParseError(cat("ocr: truncated UTF-8 sequence at offset ", i));
        for (int k = 1; k <= extra; ++k) {
            unsigned char cc = s[i + k];
            if ((cc & 0xC0) != 0x80)
                throw ParseError(cat("ocr: invalid UTF-8 continuation at offset ", i + k));
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (cp > 0x10FFFF) throw ParseError(cat("ocr: UTF-8 codepoint out of range at ", i));
        out.push_back(char32_t(cp));
        i += size_t(extra) + 1;
    }
    return out;
}

// Lowercase ASCII letters; other codepoints pass through.
std::string fold_and_trim(const std::string& raw) {
    size_t b = raw.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string::npos) return {};
    size_t e = raw.find_last_not_of(" \t\r\n\f\v");
    std::string out = raw.substr(b, e - b + 1);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
    return out;
}

}  // namespace

int64_t levenshtein(const std::string& a, const std::string& b) {
    std::u32string ua = decode_utf8(a), ub = decode_utf8(b);
    if (ua.size() < ub.size()) std::swap(ua, ub);
    size_t n = ua.size(), m = ub.size();
    if (m == 0) return int64_t(n);
    std::vector<int64_t> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j) prev[j] = int64_t(j);
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = int64_t(i);
        for (size_t j = 1; j <= m; ++j) {
            int64_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

ViewScore score_view(const std::vector<TextItem>& gt, const std::vector<TextItem>& recognized,
                     const std::string& view_name) {
    std::vector<std::string> gt_words;
    for (const auto& item : gt) {
        std::string w = fold_and_trim(item.text);
        if (!w.empty()) gt_words.push_back(std::move(w));
    }
    std::vector<std::string> rec_words;
    for (const auto& item : recognized) {
        std::string w = fold_and_trim(item.text);
        if (!w.empty()) rec_words.push_back(std::move(w));
    }
    // Longest ground-truth words choose first; byte order on UTF-8 agrees
    // with codepoint order, so the tie-break is well defined.
    std::vector<size_t> order(gt_words.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<int64_t> gt_len(gt_words.size());
    for (size_t i = 0; i < gt_words.size(); ++i)
        gt_len[i] = int64_t(decode_utf8(gt_words[i]).size());
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (gt_len[a] != gt_len[b]) return gt_len[a] > gt_len[b];
        return gt_words[a] < gt_words[b];
    });

    std::vector<uint8_t> used(rec_words.size(), 0);
    ViewScore score;
    score.view = view_name;
    for (size_t oi : order) {
        score.gt_chars += gt_len[oi];
        int64_t best_cost = gt_len[oi];  // leave unmatched
        int best = -1;
        for (size_t j = 0; j < rec_words.size(); ++j) {
            if (used[j]) continue;
            int64_t d = levenshtein(gt_words[oi], rec_words[j]);
            if (d < best_cost) {
                best_cost = d;
                best = int(j);
            }
        }
        if (best >= 0) used[size_t(best)] = 1;
        score.edit_cost += best_cost;
    }
    score.cer = score.gt_chars > 0
                    ? std::min(1.0, double(score.edit_cost) / double(score.gt_chars))
                    : 0.0;
    return score;
}

CerReport aggregate(const std::vector<ViewScore>& views) {
    CerReport report;
    report.views = views;
    double sum = 0;
    for (const auto& v : views) {
        if (v.gt_chars <= 0) continue;
        sum += v.cer;
        report.counted_views += 1;
    }
    if (report.counted_views > 0) report.scene_cer = sum / report.counted_views;
    return report;
}

// ---------------------------------------------------------------------------
// Builtin dot-matrix reader.

namespace {

constexpr int kCanvasW = 10;
constexpr int kCanvasH = 14;
constexpr double kRejectDistance = 0.35;   // hard ceiling on template distance
constexpr double kClearDistance = 0.15;    // below this, accept unconditionally
constexpr double kAmbiguityGap = 0.10;     // borderline needs this runner-up gap
constexpr int kMinCellInk = 3;   // fewer ink pixels means a blank cell
constexpr int kMinLineHeight = 5;
constexpr int kMinComponentArea = 3;
const char* kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

struct BBox {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
    bool empty() const { return x1 < x0 || y1 < y0; }
    void add(int y, int x) {
        if (empty()) {
            x0 = x1 = x;
            y0 = y1 = y;
        } else {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    void merge(const BBox& o) {
        if (o.empty()) return;
        if (empty()) {
            *this = o;
        } else {
            x0 = std::min(x0, o.x0);
            x1 = std::max(x1, o.x1);
            y0 = std::min(y0, o.y0);
            y1 = std::max(y1, o.y1);
        }
    }
    int w() const { return x1 - x0 + 1; }
    int h() const { return y1 - y0 + 1; }
};

using Canvas = std::array<uint8_t, size_t(kCanvasW) * kCanvasH>;

// Area-weighted binary downsample of on(y, x) over bbox to the canvas.
template <typename OnFn>
Canvas resample_to_canvas(const BBox& box, OnFn&& on) {
    Canvas canvas{};
    double sh = double(box.h()) / kCanvasH;
    double sw = double(box.w()) / kCanvasW;
    for (int ci = 0; ci < kCanvasH; ++ci)
        for (int cj = 0; cj < kCanvasW; ++cj) {
            double ya = box.y0 + ci * sh, yb = box.y0 + (ci + 1) * sh;
            double xa = box.x0 + cj * sw, xb = box.x0 + (cj + 1) * sw;
            double ink = 0, total = 0;
            for (int y = int(std::floor(ya)); y < int(std::ceil(yb)); ++y)
                for (int x = int(std::floor(xa)); x < int(std::ceil(xb)); ++x) {
                    double wy = std::min(yb, double(y + 1)) - std::max(ya, double(y));
                    double wx = std::min(xb, double(x + 1)) - std::max(xa, double(x));
                    if (wy <= 0 || wx <= 0) continue;
                    total += wy * wx;
                    if (y >= box.y0 && y <= box.y1 && x >= box.x0 && x <= box.x1 && on(y, x))
                        ink += wy * wx;
                }
            canvas[size_t(ci) * kCanvasW + cj] = total > 0 && ink / total >= 0.5;
        }
    return canvas;
}

const std::vector<std::pair<char, Canvas>>& glyph_templates() {
    static const std::vector<std::pair<char, Canvas>> templates = [] {
        std::vector<std::pair<char, Canvas>> out;
        for (const char* p = kAlphabet; *p; ++p) {
            const auto& rows = glyph_rows(*p);
            BBox box;
            for (int y = 0; y < kGlyphRows; ++y)
                for (int x = 0; x < kGlyphCols; ++x)
                    if (rows[size_t(y)] >> (kGlyphCols - 1 - x) & 1) box.add(y, x);
            Canvas canvas = resample_to_canvas(box, [&](int y, int x) {
                return (rows[size_t(y)] >> (kGlyphCols - 1 - x) & 1) != 0;
            });
            out.emplace_back(*p, canvas);
        }
        return out;
    }();
    return templates;
}

int hamming(const Canvas& a, const Canvas& b) {
    int d = 0;
    for (size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

struct Line {
    BBox box;
    std::vector<int> comps;
};

}  // namespace

std::vector<TextItem> recognize_builtin(const Image3& image) {
    int H = image.height, W = image.width;
    std::vector<uint8_t> ink(size_t(H) * W, 0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) ink[size_t(y) * W + x] = luma(image.px(y, x)) > 0.5;

    // 8-connected components of the ink.
    std::vector<int> comp_id(size_t(H) * W, -1);
    std::vector<BBox> comp_box;
    std::vector<int> comp_area;
    std::vector<size_t> stack;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            size_t p = size_t(y) * W + x;
            if (!ink[p] || comp_id[p] >= 0) continue;
            int id = int(comp_box.size());
            comp_box.emplace_back();
            comp_area.push_back(0);
            comp_id[p] = id;
            stack.assign(1, p);
            while (!stack.empty()) {
                size_t q = stack.back();
                stack.pop_back();
                int qy = int(q / W), qx = int(q % W);
                comp_box[size_t(id)].add(qy, qx);
                comp_area[size_t(id)] += 1;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int ny = qy + dy, nx = qx + dx;
                        if (ny < 0 || ny >= H || nx < 0 || nx >= W) continue;
                        size_t np = size_t(ny) * W + nx;
                        if (!ink[np] || comp_id[np] >= 0) continue;
                        comp_id[np] = id;
                        stack.push_back(np);
                    }
            }
        }

    // Group components into text lines by vertical overlap.
    std::vector<int> comp_order;
    for (int i = 0; i < int(comp_box.size()); ++i)
        if (comp_area[size_t(i)] >= kMinComponentArea) comp_order.push_back(i);
    std::sort(comp_order.begin(), comp_order.end(), [&](int a, int b) {
        if (comp_box[size_t(a)].x0 != comp_box[size_t(b)].x0)
            return comp_box[size_t(a)].x0 < comp_box[size_t(b)].x0;
        return comp_box[size_t(a)].y0 < comp_box[size_t(b)].y0;
    });
    std::vector<Line> lines;
    std::vector<int> comp_line(comp_box.size(), -1);
    for (int ci : comp_order) {
        const BBox& cb = comp_box[size_t(ci)];
        int found = -1;
        for (size_t li = 0; li < lines.size(); ++li) {
            const BBox& lb = lines[li].box;
            int ov = std::min(cb.y1, lb.y1) - std::max(cb.y0, lb.y0) + 1;
            if (ov * 2 >= std::min(cb.h(), lb.h())) {
                found = int(li);
                break;
            }
        }
        if (found < 0) {
            found = int(lines.size());
            lines.emplace_back();
        }
        lines[size_t(found)].box.merge(cb);
        lines[size_t(found)].comps.push_back(ci);
        comp_line[size_t(ci)] = found;
    }
    std::vector<int> line_order(lines.size());
    for (size_t i = 0; i < lines.size(); ++i) line_order[i] = int(i);
    std::sort(line_order.begin(), line_order.end(), [&](int a, int b) {
        if (lines[size_t(a)].box.y0 != lines[size_t(b)].box.y0)
            return lines[size_t(a)].box.y0 < lines[size_t(b)].box.y0;
        return lines[size_t(a)].box.x0 < lines[size_t(b)].box.x0;
    });

    std::vector<TextItem> out;
    for (int li : line_order) {
        const Line& line = lines[size_t(li)];
        const BBox& lb = line.box;
        if (lb.h() < kMinLineHeight || lb.w() < 2) continue;
        double dv = lb.h() / double(kGlyphRows);
        int cells = int(std::lround((lb.w() / dv + 1.0) / 6.0));
        if (cells < 1 || cells > 100) continue;
        double d = lb.w() / (6.0 * cells - 1.0);

        auto line_ink = [&](int y, int x) {
            size_t p = size_t(y) * W + x;
            return ink[p] && comp_id[p] >= 0 && comp_line[size_t(comp_id[p])] == li;
        };

        std::string word;
        BBox word_box;
        auto flush_word = [&]() {
            if (!word.empty()) {
                TextItem item(word);
                item.has_bbox = true;
                item.x0 = word_box.x0;
                item.y0 = word_box.y0;
                item.x1 = word_box.x1;
                item.y1 = word_box.y1;
                out.push_back(std::move(item));
            }
            word.clear();
            word_box = BBox{};
        };
        for (int j = 0; j < cells; ++j) {
            int cx0 = lb.x0 + int(std::lround(j * 6 * d));
            int cx1 = lb.x0 + int(std::lround(j * 6 * d + 5 * d)) - 1;
            cx1 = std::min(cx1, lb.x1);
            BBox cell_box;
            int cell_ink = 0;
            for (int y = lb.y0; y <= lb.y1; ++y)
                for (int x = std::max(0, cx0); x <= std::min(W - 1, cx1); ++x)
                    if (line_ink(y, x)) {
                        cell_box.add(y, x);
                        cell_ink += 1;
                    }
            if (cell_ink < kMinCellInk) {
                flush_word();
                continue;
            }
            Canvas canvas = resample_to_canvas(cell_box, line_ink);
            int best_d = kCanvasW * kCanvasH + 1;
            char best_c = 0;
            int second_d = kCanvasW * kCanvasH + 1;
            for (const auto& [ch, tpl] : glyph_templates()) {
                int hd = hamming(canvas, tpl);
                if (hd < best_d) {
                    second_d = best_d;
                    best_d = hd;
                    best_c = ch;
                } else if (hd < second_d) {
                    second_d = hd;
                }
            }
            // Accept a clearly close match outright; in the borderline band
            // the winner must also beat the runner-up decisively, which
            // rejects unstructured ink (dense textures sit near many
            // templates at once).
            double area = kCanvasW * kCanvasH;
            bool close = best_d <= kClearDistance * area;
            bool decisive = best_d <= kRejectDistance * area &&
                            second_d - best_d >= kAmbiguityGap * area;
            if (!close && !decisive) {
                flush_word();
                continue;
            }
            word.push_back(best_c);
            word_box.merge(cell_box);
        }
        flush_word();
    }
    return out;
}

// ---------------------------------------------------------------------------
// External recognizer.

namespace {

std::string shell_escape(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

std::string substitute_image(const std::string& tmpl, const std::string& path) {
    static const std::string kPlaceholder = "{image}";
    std::string out;
    size_t pos = 0;
    while (true) {
        size_t hit = tmpl.find(kPlaceholder, pos);
        if (hit == std::string::npos) {
            out += tmpl.substr(pos);
            return out;
        }
        out += tmpl.substr(pos, hit - pos);
        out += shell_escape(path);
        pos = hit + kPlaceholder.size();
    }
}

struct TempFile {
    std::string path;
    int fd = -1;

    explicit TempFile(const char* tag) {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / (std::string("textsplat_") + tag + "_XXXXXX"))
                .string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        fd = mkstemp(buf.data());
        if (fd < 0) throw IoError(cat("ocr: cannot create temp file from ", tmpl));
        path.assign(buf.data());
    }
    ~TempFile() {
        if (fd >= 0) close(fd);
        if (!path.empty()) unlink(path.c_str());
    }
    std::string read() const {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
};

std::string trim_for_message(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    if (s.size() > 500) s = s.substr(0, 500) + "...";
    return s;
}

std::vector<TextItem> parse_recognizer_output(const std::string& raw) {
    size_t first = raw.find_first_not_of(" \t\r\n");
    std::vector<TextItem> out;
    if (first == std::string::npos) return out;
    if (raw[first] == '[') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(raw);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(cat("ocr: recognizer emitted invalid JSON: ", e.what()));
        }
        if (!doc.is_array()) throw ParseError("ocr: recognizer JSON must be an array");
        for (const auto& el : doc) {
            if (!el.is_object() || !el.contains("text") || !el["text"].is_string())
                throw ParseError("ocr: recognizer JSON items need a string \"text\" field");
            TextItem item(el["text"].get<std::string>());
            if (el.contains("bbox") && el["bbox"].is_array() && el["bbox"].size() == 4) {
                item.has_bbox = true;
                item.x0 = el["bbox"][0].get<int>();
                item.y0 = el["bbox"][1].get<int>();
                item.x1 = el["bbox"][2].get<int>();
                item.y1 = el["bbox"][3].get<int>();
            }
            decode_utf8(item.text);  // validate
            out.push_back(std::move(item));
        }
        return out;
    }
    std::istringstream lines(raw);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream words(line);
        std::string w;
        while (words >> w) {
            decode_utf8(w);  // validate
            out.emplace_back(w);
        }
    }
    return out;
}

}  // namespace

std::vector<TextItem> recognize_external(const std::string& image_path,
                                         const std::string& command_template) {
    std::string cmd = substitute_image(command_template, image_path);
    TempFile out_file("stdout"), err_file("stderr");

    pid_t pid = fork();
    if (pid < 0) throw IoError("ocr: fork failed for recognizer command");
    if (pid == 0) {
        dup2(out_file.fd, STDOUT_FILENO);
        dup2(err_file.fd, STDERR_FILENO);
        execl("/bin/sh", "sh", "-c", cmd.c_str(), (char*)nullptr);
        _exit(127);
    }
    int status = 0;
    if (waitpid(pid, &status, 0) < 0) throw IoError("ocr: waitpid failed for recognizer command");
    if (WIFSIGNALED(status))
        throw Error(cat("ocr: recognizer command killed by signal ", WTERMSIG(status), ": ", cmd));
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (code != 0) {
        std::string err = trim_for_message(err_file.read());
        throw Error(cat("ocr: recognizer command exited ", code, ": ", cmd,
                        err.empty() ? "" : cat("\nstderr: ", err)));
    }
    return parse_recognizer_output(out_file.read());
}

}  // namespace textsplat
