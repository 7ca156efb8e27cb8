#pragma once

// PLY 1.0 reader/writer for colored point clouds.
// Supported: format ascii 1.0 and binary_little_endian 1.0, element
// "vertex" with float/double x,y,z and uchar red/green/blue (or r/g/b).
// Unknown scalar per-vertex properties are skipped. List properties,
// big-endian binaries and non-vertex elements with data are rejected.

#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pcq/errors.hpp"
#include "pcq/point_cloud.hpp"

namespace pcq {

enum class PlyFormat { ascii, binary_le };

namespace detail {

inline std::size_t ply_scalar_size(const std::string& t) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32" ||
        t == "float" || t == "float32")
        return 4;
    if (t == "double" || t == "float64") return 8;
    throw malformed_header("unknown property type '" + t + "'");
}

struct PlyProperty {
    std::string type;
    std::string name;
};

struct PlyHeader {
    PlyFormat format = PlyFormat::ascii;
    std::size_t vertex_count = 0;
    std::vector<PlyProperty> vertex_props;
    bool has_color = false;
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
};

inline PlyHeader parse_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw malformed_header("empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "ply") throw malformed_header("missing 'ply' magic");

    PlyHeader h;
    bool saw_format = false, in_vertex = false, saw_vertex = false, done = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
        if (tok == "format") {
            std::string fmt, ver;
            ls >> fmt >> ver;
            if (ver != "1.0") throw malformed_header("unsupported PLY version");
            if (fmt == "ascii")
                h.format = PlyFormat::ascii;
            else if (fmt == "binary_little_endian")
                h.format = PlyFormat::binary_le;
            else if (fmt == "binary_big_endian")
                throw unsupported_format("binary_big_endian is not supported");
            else
                throw malformed_header("unknown format '" + fmt + "'");
            saw_format = true;
        } else if (tok == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            if (name == "vertex") {
                h.vertex_count = count;
                in_vertex = true;
                saw_vertex = true;
            } else {
                if (count != 0)
                    throw unsupported_format("non-vertex element '" + name +
                                             "' with data");
                in_vertex = false;
            }
        } else if (tok == "property") {
            if (!in_vertex) continue;
            PlyProperty p;
            ls >> p.type;
            if (p.type == "list")
                throw unsupported_format("list properties are not supported");
            ls >> p.name;
            int idx = int(h.vertex_props.size());
            if (p.name == "x") h.ix = idx;
            else if (p.name == "y") h.iy = idx;
            else if (p.name == "z") h.iz = idx;
            else if (p.name == "red" || p.name == "r") h.ir = idx;
            else if (p.name == "green" || p.name == "g") h.ig = idx;
            else if (p.name == "blue" || p.name == "b") h.ib = idx;
            h.vertex_props.push_back(p);
        } else if (tok == "end_header") {
            done = true;
            break;
        } else {
            throw malformed_header("unexpected header line '" + line + "'");
        }
    }
    if (!done) throw malformed_header("missing end_header");
    if (!saw_format) throw malformed_header("missing format line");
    if (!saw_vertex) throw malformed_header("missing vertex element");
    if (h.ix < 0 || h.iy < 0 || h.iz < 0)
        throw malformed_header("vertex element lacks x/y/z properties");
    h.has_color = h.ir >= 0 && h.ig >= 0 && h.ib >= 0;
    return h;
}

inline double read_binary_scalar(std::istream& in, const std::string& type) {
    unsigned char buf[8];
    const std::size_t n = ply_scalar_size(type);
    if (!in.read(reinterpret_cast<char*>(buf), std::streamsize(n)))
        throw count_mismatch("unexpected end of binary vertex data");
    auto u = [&](std::size_t k) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < k; ++i) v |= std::uint64_t(buf[i]) << (8 * i);
        return v;
    };
    if (type == "float" || type == "float32") {
        float f;
        std::uint32_t bits = std::uint32_t(u(4));
        std::memcpy(&f, &bits, 4);
        return double(f);
    }
    if (type == "double" || type == "float64") {
        double d;
        std::uint64_t bits = u(8);
        std::memcpy(&d, &bits, 8);
        return d;
    }
    if (type == "char" || type == "int8") return double(std::int8_t(buf[0]));
    if (type == "uchar" || type == "uint8") return double(buf[0]);
    if (type == "short" || type == "int16") return double(std::int16_t(u(2)));
    if (type == "ushort" || type == "uint16") return double(std::uint16_t(u(2)));
    if (type == "int" || type == "int32") return double(std::int32_t(u(4)));
    return double(std::uint32_t(u(4)));
}

} // namespace detail

inline PointCloud read_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_failure("cannot open '" + path + "'");
    detail::PlyHeader h = detail::parse_header(in);

    std::vector<Point> pts;
    pts.reserve(h.vertex_count);
    const std::size_t nprops = h.vertex_props.size();
    std::vector<double> row(nprops, 0.0);

    for (std::size_t v = 0; v < h.vertex_count; ++v) {
        if (h.format == PlyFormat::ascii) {
            for (std::size_t k = 0; k < nprops; ++k) {
                if (!(in >> row[k]))
                    throw count_mismatch("vertex body ends before declared count");
            }
        } else {
            for (std::size_t k = 0; k < nprops; ++k)
                row[k] = detail::read_binary_scalar(in, h.vertex_props[k].type);
        }
        Point p;
        p.x = float(row[std::size_t(h.ix)]);
        p.y = float(row[std::size_t(h.iy)]);
        p.z = float(row[std::size_t(h.iz)]);
        if (!std::isfinite(double(p.x)) || !std::isfinite(double(p.y)) ||
            !std::isfinite(double(p.z)))
            throw bad_input("non-finite coordinate in vertex data");
        if (h.has_color) {
            auto chan = [&](int idx) {
                double c = row[std::size_t(idx)];
                if (c < 0.0 || c > 255.0)
                    throw bad_input("color channel outside [0,255]");
                return std::uint8_t(c);
            };
            p.r = chan(h.ir);
            p.g = chan(h.ig);
            p.b = chan(h.ib);
        }
        pts.push_back(p);
    }
    return PointCloud(std::move(pts), h.has_color);
}

inline void write_ply(const PointCloud& cloud, const std::string& path,
                      PlyFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_failure("cannot open '" + path + "' for writing");

    out << "ply\n";
    out << (format == PlyFormat::ascii ? "format ascii 1.0\n"
                                       : "format binary_little_endian 1.0\n");
    out << "element vertex " << cloud.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (cloud.has_color())
        out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";

    if (format == PlyFormat::ascii) {
        out.precision(std::numeric_limits<float>::max_digits10);
        for (const Point& p : cloud.points()) {
            out << p.x << ' ' << p.y << ' ' << p.z;
            if (cloud.has_color())
                out << ' ' << int(p.r) << ' ' << int(p.g) << ' ' << int(p.b);
            out << '\n';
        }
    } else {
        auto put_f32 = [&](float f) {
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            char b[4] = {char(bits & 0xff), char((bits >> 8) & 0xff),
                         char((bits >> 16) & 0xff), char((bits >> 24) & 0xff)};
            out.write(b, 4);
        };
        for (const Point& p : cloud.points()) {
            put_f32(p.x);
            put_f32(p.y);
            put_f32(p.z);
            if (cloud.has_color()) {
                char c[3] = {char(p.r), char(p.g), char(p.b)};
                out.write(c, 3);
            }
        }
    }
    if (!out) throw io_failure("write to '" + path + "' failed");
}

} // namespace pcq
