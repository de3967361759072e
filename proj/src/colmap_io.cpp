#include "textsplat/colmap_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "textsplat/common.hpp"

namespace fs = std::filesystem;

namespace textsplat {

namespace {

constexpr int32_t kModelSimplePinhole = 0;
constexpr int32_t kModelPinhole = 1;

// --- binary reading -------------------------------------------------------

class BinReader {
public:
    BinReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError(cat(path, ": cannot open for reading"));
    }

    template <typename T>
    T get() {
        T v;
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!in_)
            throw ParseError(cat(path_, ":", offset_, ": truncated record (expected ", sizeof(T),
                                 " more bytes)"));
        offset_ += sizeof(T);
        return v;
    }

    std::string get_cstring() {
        std::string s;
        char c;
        while (true) {
            in_.read(&c, 1);
            if (!in_) throw ParseError(cat(path_, ":", offset_, ": unterminated string"));
            ++offset_;
            if (c == '\0') break;
            s.push_back(c);
        }
        return s;
    }

    size_t offset() const { return offset_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    size_t offset_ = 0;
};

// --- text reading ---------------------------------------------------------

// Yields non-comment, non-blank lines with their 1-based line numbers.
class TextReader {
public:
    TextReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw IoError(cat(path, ": cannot open for reading"));
    }

    bool next(std::string& line, int& line_no) {
        while (std::getline(in_, raw_)) {
            ++line_no_;
            size_t start = raw_.find_first_not_of(" \t\r");
            if (start == std::string::npos || raw_[start] == '#') continue;
            line = raw_;
            line_no = line_no_;
            return true;
        }
        return false;
    }

    // Consumes one line verbatim (blank lines included); false at end of file.
    bool next_raw(std::string& line) {
        if (!std::getline(in_, raw_)) return false;
        ++line_no_;
        line = raw_;
        return true;
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    std::string raw_;
    int line_no_ = 0;
};

int camera_model_arity(int32_t model_id, const std::string& file, const std::string& where) {
    switch (model_id) {
        case kModelSimplePinhole: return 3;
        case kModelPinhole: return 4;
        default:
            throw ParseError(cat(file, ":", where, ": unknown or unsupported camera model id ",
                                 model_id, " (only SIMPLE_PINHOLE and PINHOLE are supported)"));
    }
}

CameraIntrinsics make_intrinsics(int32_t camera_id, int32_t model_id, uint64_t width,
                                 uint64_t height, const std::vector<double>& params,
                                 const std::string& file, const std::string& where) {
    CameraIntrinsics intr;
    intr.camera_id = camera_id;
    intr.width = int(width);
    intr.height = int(height);
    if (model_id == kModelSimplePinhole) {
        intr.model = CameraModel::SimplePinhole;
        intr.fx = intr.fy = params[0];
        intr.cx = params[1];
        intr.cy = params[2];
    } else {
        intr.model = CameraModel::Pinhole;
        intr.fx = params[0];
        intr.fy = params[1];
        intr.cx = params[2];
        intr.cy = params[3];
    }
    if (intr.width <= 0 || intr.height <= 0)
        throw ParseError(cat(file, ":", where, ": non-positive image dimensions"));
    if (intr.fx <= 0 || intr.fy <= 0)
        throw ParseError(cat(file, ":", where, ": non-positive focal length"));
    if (intr.cx < 0 || intr.cx >= double(intr.width) || intr.cy < 0 ||
        intr.cy >= double(intr.height))
        throw ParseError(cat(file, ":", where, ": principal point outside image"));
    return intr;
}

void normalize_quaternion(CameraPose& pose, const std::string& file, const std::string& where) {
    double n = pose.rotation.norm();
    if (!(n > 1e-12))
        throw ParseError(cat(file, ":", where, ": degenerate quaternion for image ",
                             pose.image_id));
    pose.rotation /= n;
}

std::vector<int32_t> dedup_track(std::vector<int32_t> track) {
    std::sort(track.begin(), track.end());
    track.erase(std::unique(track.begin(), track.end()), track.end());
    return track;
}

// --- per-file binary parsers ----------------------------------------------

std::map<int32_t, CameraIntrinsics> read_cameras_bin(const std::string& path) {
    BinReader r(path);
    uint64_t count = r.get<uint64_t>();
    std::map<int32_t, CameraIntrinsics> out;
    for (uint64_t i = 0; i < count; ++i) {
        size_t rec_off = r.offset();
        int32_t camera_id = r.get<int32_t>();
        int32_t model_id = r.get<int32_t>();
        uint64_t width = r.get<uint64_t>();
        uint64_t height = r.get<uint64_t>();
        int arity = camera_model_arity(model_id, path, cat(rec_off));
        std::vector<double> params(static_cast<size_t>(arity));
        for (auto& p : params) p = r.get<double>();
        out[camera_id] = make_intrinsics(camera_id, model_id, width, height, params, path,
                                         cat(rec_off));
    }
    return out;
}

std::vector<CameraPose> read_images_bin(const std::string& path) {
    BinReader r(path);
    uint64_t count = r.get<uint64_t>();
    std::vector<CameraPose> out;
    out.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        size_t rec_off = r.offset();
        CameraPose pose;
        pose.image_id = r.get<int32_t>();
        for (int k = 0; k < 4; ++k) pose.rotation[k] = r.get<double>();
        for (int k = 0; k < 3; ++k) pose.translation[k] = r.get<double>();
        pose.camera_id = r.get<int32_t>();
        pose.name = r.get_cstring();
        normalize_quaternion(pose, path, cat(rec_off));
        uint64_t n2d = r.get<uint64_t>();
        for (uint64_t k = 0; k < n2d; ++k) {
            r.get<double>();
            r.get<double>();
            r.get<int64_t>();
        }
        out.push_back(std::move(pose));
    }
    return out;
}

std::vector<SparsePoint> read_points_bin(const std::string& path) {
    BinReader r(path);
    uint64_t count = r.get<uint64_t>();
    std::vector<SparsePoint> out;
    out.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        SparsePoint p;
        p.point_id = r.get<int64_t>();
        for (int k = 0; k < 3; ++k) p.position[k] = r.get<double>();
        for (int k = 0; k < 3; ++k) p.color[size_t(k)] = r.get<uint8_t>();
        p.error = r.get<double>();
        uint64_t track_len = r.get<uint64_t>();
        p.track.reserve(track_len);
        for (uint64_t k = 0; k < track_len; ++k) {
            p.track.push_back(r.get<int32_t>());
            r.get<int32_t>();  // point2D index, unused
        }
        p.track = dedup_track(std::move(p.track));
        out.push_back(std::move(p));
    }
    return out;
}

// --- per-file text parsers --------------------------------------------------

std::map<int32_t, CameraIntrinsics> read_cameras_txt(const std::string& path) {
    TextReader r(path);
    std::map<int32_t, CameraIntrinsics> out;
    std::string line;
    int line_no = 0;
    while (r.next(line, line_no)) {
        std::istringstream ss(line);
        int32_t camera_id;
        std::string model_name;
        uint64_t width, height;
        if (!(ss >> camera_id >> model_name >> width >> height))
            throw ParseError(cat(path, ":", line_no, ": malformed camera record"));
        int32_t model_id;
        if (model_name == "SIMPLE_PINHOLE")
            model_id = kModelSimplePinhole;
        else if (model_name == "PINHOLE")
            model_id = kModelPinhole;
        else
            throw ParseError(cat(path, ":", line_no, ": unknown or unsupported camera model '",
                                 model_name,
                                 "' (only SIMPLE_PINHOLE and PINHOLE are supported)"));
        int arity = camera_model_arity(model_id, path, cat(line_no));
        std::vector<double> params(static_cast<size_t>(arity));
        for (auto& p : params)
            if (!(ss >> p))
                throw ParseError(cat(path, ":", line_no, ": missing camera parameters"));
        out[camera_id] =
            make_intrinsics(camera_id, model_id, width, height, params, path, cat(line_no));
    }
    return out;
}

std::vector<CameraPose> read_images_txt(const std::string& path) {
    TextReader r(path);
    std::vector<CameraPose> out;
    std::string line;
    int line_no = 0;
    while (r.next(line, line_no)) {
        std::istringstream ss(line);
        CameraPose pose;
        if (!(ss >> pose.image_id >> pose.rotation[0] >> pose.rotation[1] >> pose.rotation[2] >>
              pose.rotation[3] >> pose.translation[0] >> pose.translation[1] >>
              pose.translation[2] >> pose.camera_id >> pose.name))
            throw ParseError(cat(path, ":", line_no, ": malformed image record"));
        normalize_quaternion(pose, path, cat(line_no));
        // The observations line follows immediately; it may be blank.
        std::string obs;
        r.next_raw(obs);
        out.push_back(std::move(pose));
    }
    return out;
}

std::vector<SparsePoint> read_points_txt(const std::string& path) {
    TextReader r(path);
    std::vector<SparsePoint> out;
    std::string line;
    int line_no = 0;
    while (r.next(line, line_no)) {
        std::istringstream ss(line);
        SparsePoint p;
        int r8, g8, b8;
        if (!(ss >> p.point_id >> p.position[0] >> p.position[1] >> p.position[2] >> r8 >> g8 >>
              b8 >> p.error))
            throw ParseError(cat(path, ":", line_no, ": malformed point record"));
        if (r8 < 0 || r8 > 255 || g8 < 0 || g8 > 255 || b8 < 0 || b8 > 255)
            throw ParseError(cat(path, ":", line_no, ": color component out of byte range"));
        p.color = {uint8_t(r8), uint8_t(g8), uint8_t(b8)};
        int32_t image_id, p2d;
        while (ss >> image_id >> p2d) p.track.push_back(image_id);
        p.track = dedup_track(std::move(p.track));
        out.push_back(std::move(p));
    }
    return out;
}

void validate_model(ColmapModel& model, const std::string& dir) {
    std::set<int32_t> image_ids;
    for (const auto& pose : model.poses) {
        if (!model.intrinsics.count(pose.camera_id))
            throw ParseError(cat(dir, ": image ", pose.image_id, " ('", pose.name,
                                 "') references unknown camera_id ", pose.camera_id));
        image_ids.insert(pose.image_id);
    }
    for (const auto& p : model.points) {
        if (p.track.empty())
            throw ParseError(cat(dir, ": point ", p.point_id, " has an empty track"));
        for (int32_t id : p.track)
            if (!image_ids.count(id))
                throw ParseError(cat(dir, ": point ", p.point_id,
                                     " track references unknown image_id ", id));
    }
}

std::string pick(const std::string& dir, const char* stem, ColmapFormat& format) {
    std::string bin = dir + "/" + stem + ".bin";
    std::string txt = dir + "/" + stem + ".txt";
    if (format == ColmapFormat::Auto) {
        if (fs::exists(bin))
            format = ColmapFormat::Binary;
        else if (fs::exists(txt))
            format = ColmapFormat::Text;
        else
            throw IoError(cat(dir, ": neither ", stem, ".bin nor ", stem, ".txt found"));
    }
    std::string path = format == ColmapFormat::Binary ? bin : txt;
    if (!fs::exists(path)) throw IoError(cat(path, ": file not found"));
    return path;
}

}  // namespace

ColmapModel read_colmap_model(const std::string& dir_path, ColmapFormat format) {
    ColmapModel model;
    ColmapFormat fmt = format;
    std::string cameras = pick(dir_path, "cameras", fmt);
    std::string images = pick(dir_path, "images", fmt);
    std::string points = pick(dir_path, "points3D", fmt);
    if (fmt == ColmapFormat::Binary) {
        model.intrinsics = read_cameras_bin(cameras);
        model.poses = read_images_bin(images);
        model.points = read_points_bin(points);
    } else {
        model.intrinsics = read_cameras_txt(cameras);
        model.poses = read_images_txt(images);
        model.points = read_points_txt(points);
    }
    validate_model(model, dir_path);
    return model;
}

namespace {

class BinWriter {
public:
    BinWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError(cat(path, ": cannot open for writing"));
    }
    template <typename T>
    void put(T v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put_cstring(const std::string& s) {
        out_.write(s.data(), std::streamsize(s.size()));
        out_.put('\0');
    }
    void close() {
        out_.close();
        if (!out_) throw IoError(cat(path_, ": write failed"));
    }

private:
    std::string path_;
    std::ofstream out_;
};

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_colmap_model_binary(const ColmapModel& model, const std::string& dir_path) {
    fs::create_directories(dir_path);
    {
        BinWriter w(dir_path + "/cameras.bin");
        w.put<uint64_t>(model.intrinsics.size());
        for (const auto& [id, intr] : model.intrinsics) {
            w.put<int32_t>(id);
            bool simple = intr.model == CameraModel::SimplePinhole;
            w.put<int32_t>(simple ? kModelSimplePinhole : kModelPinhole);
            w.put<uint64_t>(uint64_t(intr.width));
            w.put<uint64_t>(uint64_t(intr.height));
            if (simple) {
                w.put<double>(intr.fx);
            } else {
                w.put<double>(intr.fx);
                w.put<double>(intr.fy);
            }
            w.put<double>(intr.cx);
            w.put<double>(intr.cy);
        }
        w.close();
    }
    {
        BinWriter w(dir_path + "/images.bin");
        w.put<uint64_t>(model.poses.size());
        for (const auto& pose : model.poses) {
            w.put<int32_t>(pose.image_id);
            for (int k = 0; k < 4; ++k) w.put<double>(pose.rotation[k]);
            for (int k = 0; k < 3; ++k) w.put<double>(pose.translation[k]);
            w.put<int32_t>(pose.camera_id);
            w.put_cstring(pose.name);
            w.put<uint64_t>(0);  // no 2D observations are stored
        }
        w.close();
    }
    {
        BinWriter w(dir_path + "/points3D.bin");
        w.put<uint64_t>(model.points.size());
        for (const auto& p : model.points) {
            w.put<int64_t>(p.point_id);
            for (int k = 0; k < 3; ++k) w.put<double>(p.position[k]);
            for (int k = 0; k < 3; ++k) w.put<uint8_t>(p.color[size_t(k)]);
            w.put<double>(p.error);
            w.put<uint64_t>(p.track.size());
            for (int32_t id : p.track) {
                w.put<int32_t>(id);
                w.put<int32_t>(0);
            }
        }
        w.close();
    }
}

void write_colmap_model_text(const ColmapModel& model, const std::string& dir_path) {
    fs::create_directories(dir_path);
    {
        std::ofstream out(dir_path + "/cameras.txt");
        if (!out) throw IoError(cat(dir_path, "/cameras.txt: cannot open for writing"));
        out << "# Camera list: CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n";
        for (const auto& [id, intr] : model.intrinsics) {
            bool simple = intr.model == CameraModel::SimplePinhole;
            out << id << ' ' << (simple ? "SIMPLE_PINHOLE" : "PINHOLE") << ' ' << intr.width
                << ' ' << intr.height << ' ';
            if (simple)
                out << fmt_double(intr.fx);
            else
                out << fmt_double(intr.fx) << ' ' << fmt_double(intr.fy);
            out << ' ' << fmt_double(intr.cx) << ' ' << fmt_double(intr.cy) << '\n';
        }
    }
    {
        std::ofstream out(dir_path + "/images.txt");
        if (!out) throw IoError(cat(dir_path, "/images.txt: cannot open for writing"));
        out << "# Image list: IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n";
        out << "#   POINTS2D[] as (X, Y, POINT3D_ID)\n";
        for (const auto& pose : model.poses) {
            out << pose.image_id;
            for (int k = 0; k < 4; ++k) out << ' ' << fmt_double(pose.rotation[k]);
            for (int k = 0; k < 3; ++k) out << ' ' << fmt_double(pose.translation[k]);
            out << ' ' << pose.camera_id << ' ' << pose.name << '\n';
            out << '\n';  // empty observations line
        }
    }
    {
        std::ofstream out(dir_path + "/points3D.txt");
        if (!out) throw IoError(cat(dir_path, "/points3D.txt: cannot open for writing"));
        out << "# 3D point list: POINT3D_ID, X, Y, Z, R, G, B, ERROR, "
               "TRACK[] as (IMAGE_ID, POINT2D_IDX)\n";
        for (const auto& p : model.points) {
            out << p.point_id;
            for (int k = 0; k < 3; ++k) out << ' ' << fmt_double(p.position[k]);
            for (int k = 0; k < 3; ++k) out << ' ' << int(p.color[size_t(k)]);
            out << ' ' << fmt_double(p.error);
            for (int32_t id : p.track) out << ' ' << id << " 0";
            out << '\n';
        }
    }
}

}  // namespace textsplat
