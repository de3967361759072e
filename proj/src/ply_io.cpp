#include "textsplat/ply_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "textsplat/common.hpp"

namespace textsplat {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// The vertex properties written by write_ply_gaussians, in order.
std::vector<std::string> gaussian_property_names() {
    std::vector<std::string> names = {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"};
    for (int i = 0; i < 45; ++i) names.push_back(cat("f_rest_", i));
    names.push_back("opacity");
    for (int i = 0; i < 3; ++i) names.push_back(cat("scale_", i));
    for (int i = 0; i < 4; ++i) names.push_back(cat("rot_", i));
    return names;
}

// sh index (channel*16 + coeff) for each of the 48 PLY SH slots:
// slots 0..2 are f_dc per channel, slots 3.. are f_rest, channel-major.
int sh_index_for_slot(int slot) {
    if (slot < 3) return slot * kShCoeffsPerChannel;
    int rest = slot - 3;
    int channel = rest / 15;
    int coeff = rest % 15 + 1;
    return channel * kShCoeffsPerChannel + coeff;
}

struct PlyProperty {
    std::string name;
    std::string type;
    size_t offset = 0;  // byte offset within one vertex record
};

size_t type_size(const std::string& t, const std::string& path) {
    if (t == "double" || t == "float64") return 8;
    if (t == "float" || t == "float32") return 4;
    if (t == "int" || t == "int32" || t == "uint" || t == "uint32") return 4;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    throw ParseError(cat(path, ": unsupported PLY property type '", t, "'"));
}

}  // namespace

void write_ply_gaussians(const SplatScene& scene, const std::string& path) {
    if (scene.gaussians.empty())
        throw InvalidArgument(cat(path, ": refusing to write an empty Gaussian scene"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(cat(path, ": cannot open for writing"));

    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\n";
    header << "comment scene_extent " << fmt_double(scene.scene_extent) << "\n";
    header << "comment next_id " << scene.next_id << "\n";
    header << "element vertex " << scene.gaussians.size() << "\n";
    for (const auto& name : gaussian_property_names())
        header << "property double " << name << "\n";
    header << "property int id\n";
    header << "property uchar region\n";
    header << "end_header\n";
    std::string h = header.str();
    out.write(h.data(), std::streamsize(h.size()));

    for (const auto& g : scene.gaussians) {
        double rec[59];
        rec[0] = g.position[0];
        rec[1] = g.position[1];
        rec[2] = g.position[2];
        for (int slot = 0; slot < 48; ++slot) rec[3 + slot] = g.sh[size_t(sh_index_for_slot(slot))];
        rec[51] = g.opacity_logit;
        rec[52] = g.log_scale[0];
        rec[53] = g.log_scale[1];
        rec[54] = g.log_scale[2];
        for (int k = 0; k < 4; ++k) rec[55 + k] = g.rotation[k];
        out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
        if (g.id < std::numeric_limits<int32_t>::min() || g.id > std::numeric_limits<int32_t>::max())
            throw InvalidArgument(cat(path, ": Gaussian id ", g.id, " does not fit int32"));
        int32_t id32 = int32_t(g.id);
        out.write(reinterpret_cast<const char*>(&id32), 4);
        uint8_t region = g.region == Region::Text ? 1 : 0;
        out.write(reinterpret_cast<const char*>(&region), 1);
    }
    out.close();
    if (!out) throw IoError(cat(path, ": write failed"));
}

SplatScene read_ply_gaussians(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(cat(path, ": cannot open for reading"));

    std::string line;
    if (!std::getline(in, line) || (line != "ply" && line != "ply\r"))
        throw ParseError(cat(path, ": not a PLY file (missing 'ply' magic)"));

    size_t vertex_count = 0;
    bool binary_le = false;
    bool in_vertex_element = false;
    std::vector<PlyProperty> props;
    size_t record_size = 0;
    double extent = 1.0;
    int64_t next_id = -1;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word == "end_header") break;
        if (word == "format") {
            std::string fmt;
            ss >> fmt;
            binary_le = fmt == "binary_little_endian";
        } else if (word == "comment") {
            std::string key;
            ss >> key;
            if (key == "scene_extent") ss >> extent;
            if (key == "next_id") ss >> next_id;
        } else if (word == "element") {
            std::string kind;
            size_t count;
            ss >> kind >> count;
            in_vertex_element = kind == "vertex";
            if (in_vertex_element) vertex_count = count;
        } else if (word == "property") {
            if (!in_vertex_element)
                throw ParseError(cat(path, ": unsupported non-vertex element with properties"));
            PlyProperty p;
            ss >> p.type >> p.name;
            if (p.type == "list")
                throw ParseError(cat(path, ": list properties are not supported"));
            p.offset = record_size;
            record_size += type_size(p.type, path);
            props.push_back(p);
        }
        if (in.eof()) break;
    }
    if (!binary_le) throw ParseError(cat(path, ": expected format binary_little_endian 1.0"));
    if (vertex_count == 0) throw ParseError(cat(path, ": no vertex element declared"));

    std::map<std::string, const PlyProperty*> by_name;
    for (const auto& p : props) by_name[p.name] = &p;
    for (const auto& name : gaussian_property_names()) {
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw ParseError(cat(path, ": missing required property '", name, "'"));
        if (it->second->type != "double" && it->second->type != "float64")
            throw ParseError(cat(path, ": property '", name, "' must be double"));
    }
    const PlyProperty* id_prop = by_name.count("id") ? by_name.at("id") : nullptr;
    const PlyProperty* region_prop = by_name.count("region") ? by_name.at("region") : nullptr;
    if (!region_prop)
        std::cerr << "warning: " << path
                  << ": no region property; loading all Gaussians as non-text\n";

    std::vector<char> payload(record_size * vertex_count);
    in.read(payload.data(), std::streamsize(payload.size()));
    size_t got = size_t(in.gcount());
    if (got != payload.size())
        throw ParseError(cat(path, ": truncated payload: expected ", payload.size(),
                             " bytes after header, got ", got));

    auto read_double = [&](size_t rec, const std::string& name) {
        double v;
        std::memcpy(&v, payload.data() + rec * record_size + by_name.at(name)->offset, 8);
        return v;
    };

    SplatScene scene;
    scene.scene_extent = extent;
    scene.gaussians.resize(vertex_count);
    auto names = gaussian_property_names();
    int64_t max_id = -1;
    for (size_t i = 0; i < vertex_count; ++i) {
        Gaussian& g = scene.gaussians[i];
        g.position = Vec3(read_double(i, "x"), read_double(i, "y"), read_double(i, "z"));
        for (int slot = 0; slot < 48; ++slot)
            g.sh[size_t(sh_index_for_slot(slot))] = read_double(i, names[size_t(3 + slot)]);
        g.opacity_logit = read_double(i, "opacity");
        g.log_scale = Vec3(read_double(i, "scale_0"), read_double(i, "scale_1"),
                           read_double(i, "scale_2"));
        g.rotation = Vec4(read_double(i, "rot_0"), read_double(i, "rot_1"),
                          read_double(i, "rot_2"), read_double(i, "rot_3"));
        if (id_prop) {
            int32_t id32;
            std::memcpy(&id32, payload.data() + i * record_size + id_prop->offset, 4);
            g.id = id32;
        } else {
            g.id = int64_t(i);
        }
        max_id = std::max(max_id, g.id);
        if (region_prop) {
            uint8_t r = uint8_t(payload[i * record_size + region_prop->offset]);
            g.region = r ? Region::Text : Region::NonText;
        } else {
            g.region = Region::NonText;
        }
    }
    scene.next_id = next_id >= 0 ? next_id : max_id + 1;
    return scene;
}

void write_ply_points(const std::string& path, const std::vector<Vec3>& positions,
                      const std::vector<std::array<uint8_t, 3>>& colors) {
    if (positions.size() != colors.size())
        throw InvalidArgument(cat(path, ": position/color count mismatch"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(cat(path, ": cannot open for writing"));
    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\n";
    header << "element vertex " << positions.size() << "\n";
    header << "property double x\nproperty double y\nproperty double z\n";
    header << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    header << "end_header\n";
    std::string h = header.str();
    out.write(h.data(), std::streamsize(h.size()));
    for (size_t i = 0; i < positions.size(); ++i) {
        double xyz[3] = {positions[i][0], positions[i][1], positions[i][2]};
        out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
        out.write(reinterpret_cast<const char*>(colors[i].data()), 3);
    }
    out.close();
    if (!out) throw IoError(cat(path, ": write failed"));
}

}  // namespace textsplat
