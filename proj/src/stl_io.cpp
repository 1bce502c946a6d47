#include "distcomp/stl_io.hpp"

#include <Eigen/Geometry>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace distcomp {

namespace {

constexpr std::size_t kHeaderSize = 80;
constexpr std::size_t kRecordSize = 50;

float read_f32(const std::uint8_t* p) {
    float f;
    std::memcpy(&f, p, 4);
    return f;
}

std::uint32_t read_u32(const std::uint8_t* p) {
    std::uint32_t u;
    std::memcpy(&u, p, 4);
    return u;
}

void append_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint8_t buf[4];
    std::memcpy(buf, &f, 4);
    out.insert(out.end(), buf, buf + 4);
}

Eigen::Vector3f facet_normal(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                             const Eigen::Vector3d& c) {
    const Eigen::Vector3d n = (b - a).cross(c - a);
    const double len = n.norm();
    if (len <= 0.0 || !std::isfinite(len)) {
        return Eigen::Vector3f::Zero();
    }
    return (n / len).cast<float>();
}

TriangleMesh read_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize + 4) {
        throw std::runtime_error("stl: binary file shorter than header + count");
    }
    const std::uint32_t count = read_u32(bytes.data() + kHeaderSize);
    if (count == 0) {
        throw std::runtime_error("stl: file declares zero triangles");
    }
    const std::size_t expected = kHeaderSize + 4 + static_cast<std::size_t>(count) * kRecordSize;
    if (bytes.size() < expected) {
        throw std::runtime_error("stl: truncated binary body, expected " +
                                 std::to_string(expected) + " bytes, got " +
                                 std::to_string(bytes.size()));
    }

    TriangleMesh mesh;
    mesh.vertices.reserve(3u * count);
    mesh.triangles.reserve(count);
    mesh.facet_normals.reserve(count);
    const std::uint8_t* p = bytes.data() + kHeaderSize + 4;
    for (std::uint32_t t = 0; t < count; ++t, p += kRecordSize) {
        mesh.facet_normals.emplace_back(read_f32(p), read_f32(p + 4), read_f32(p + 8));
        const std::uint32_t base = static_cast<std::uint32_t>(mesh.vertices.size());
        for (int v = 0; v < 3; ++v) {
            const std::uint8_t* q = p + 12 + 12 * v;
            mesh.vertices.emplace_back(read_f32(q), read_f32(q + 4), read_f32(q + 8));
        }
        mesh.triangles.push_back({base, base + 1, base + 2});
    }
    return mesh;
}

struct Tokenizer {
    const char* p;
    const char* end;

    // Returns the next whitespace-separated token, empty at end of input.
    std::string next() {
        while (p != end && std::isspace(static_cast<unsigned char>(*p))) ++p;
        const char* start = p;
        while (p != end && !std::isspace(static_cast<unsigned char>(*p))) ++p;
        return std::string(start, p);
    }
};

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

float parse_float_token(const std::string& tok) {
    try {
        std::size_t used = 0;
        const float f = std::stof(tok, &used);
        if (used != tok.size()) {
            throw std::runtime_error("");
        }
        return f;
    } catch (const std::exception&) {
        throw std::runtime_error("stl: bad number '" + tok + "'");
    }
}

TriangleMesh read_ascii(std::span<const std::uint8_t> bytes) {
    Tokenizer tk{reinterpret_cast<const char*>(bytes.data()),
                 reinterpret_cast<const char*>(bytes.data()) + bytes.size()};
    auto expect = [&](const char* kw) {
        const std::string tok = lower(tk.next());
        if (tok != kw) {
            throw std::runtime_error(std::string("stl: expected '") + kw + "', got '" + tok +
                                     "'");
        }
    };
    auto number = [&] { return parse_float_token(tk.next()); };

    expect("solid");
    // Optional solid name: everything up to the first keyword token.
    std::string tok = lower(tk.next());
    while (tok != "facet" && tok != "endsolid") {
        if (tok.empty()) {
            throw std::runtime_error("stl: unexpected end of file after 'solid'");
        }
        tok = lower(tk.next());
    }

    TriangleMesh mesh;
    while (tok == "facet") {
        expect("normal");
        const float nx = number(), ny = number(), nz = number();
        mesh.facet_normals.emplace_back(nx, ny, nz);
        expect("outer");
        expect("loop");
        const std::uint32_t base = static_cast<std::uint32_t>(mesh.vertices.size());
        for (int v = 0; v < 3; ++v) {
            expect("vertex");
            const float x = number(), y = number(), z = number();
            mesh.vertices.emplace_back(x, y, z);
        }
        expect("endloop");
        expect("endfacet");
        mesh.triangles.push_back({base, base + 1, base + 2});
        tok = lower(tk.next());
    }
    if (tok != "endsolid") {
        throw std::runtime_error("stl: expected 'facet' or 'endsolid', got '" + tok + "'");
    }
    if (mesh.triangles.empty()) {
        throw std::runtime_error("stl: file declares zero triangles");
    }
    return mesh;
}

}  // namespace

TriangleMesh read_stl(std::span<const std::uint8_t> bytes) {
    const bool starts_solid =
        bytes.size() >= 5 && std::memcmp(bytes.data(), "solid", 5) == 0;
    std::string ascii_error;
    if (starts_solid) {
        try {
            return read_ascii(bytes);
        } catch (const std::exception& e) {
            // Binary files whose header happens to start with "solid"
            // fall through to the binary reader.
            ascii_error = e.what();
        }
    }
    try {
        return read_binary(bytes);
    } catch (const std::exception& e) {
        if (!ascii_error.empty()) {
            throw std::runtime_error(std::string(e.what()) + "; as ascii: " + ascii_error);
        }
        throw;
    }
}

std::vector<std::uint8_t> write_stl(const TriangleMesh& mesh, StlFormat format) {
    if (mesh.triangles.empty()) {
        throw std::invalid_argument("write_stl: refusing to write empty mesh");
    }
    validate_mesh(mesh);

    std::vector<std::uint8_t> out;
    if (format == StlFormat::binary) {
        out.reserve(kHeaderSize + 4 + kRecordSize * mesh.triangles.size());
        const char header[] = "distcomp binary STL";
        out.assign(kHeaderSize, 0);
        std::memcpy(out.data(), header, sizeof(header) - 1);
        const std::uint32_t count = static_cast<std::uint32_t>(mesh.triangles.size());
        std::uint8_t cbuf[4];
        std::memcpy(cbuf, &count, 4);
        out.insert(out.end(), cbuf, cbuf + 4);
        for (const auto& tri : mesh.triangles) {
            const Eigen::Vector3f n = facet_normal(
                mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
            append_f32(out, n.x());
            append_f32(out, n.y());
            append_f32(out, n.z());
            for (std::uint32_t idx : tri) {
                const Eigen::Vector3d& v = mesh.vertices[idx];
                append_f32(out, static_cast<float>(v.x()));
                append_f32(out, static_cast<float>(v.y()));
                append_f32(out, static_cast<float>(v.z()));
            }
            out.push_back(0);
            out.push_back(0);  // attribute byte count
        }
    } else {
        std::string text = "solid distcomp\n";
        char buf[160];
        for (const auto& tri : mesh.triangles) {
            const Eigen::Vector3f n = facet_normal(
                mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
            std::snprintf(buf, sizeof(buf), "  facet normal %.9g %.9g %.9g\n", n.x(), n.y(),
                          n.z());
            text += buf;
            text += "    outer loop\n";
            for (std::uint32_t idx : tri) {
                const Eigen::Vector3d& v = mesh.vertices[idx];
                std::snprintf(buf, sizeof(buf), "      vertex %.9g %.9g %.9g\n",
                              static_cast<float>(v.x()), static_cast<float>(v.y()),
                              static_cast<float>(v.z()));
                text += buf;
            }
            text += "    endloop\n  endfacet\n";
        }
        text += "endsolid distcomp\n";
        out.assign(text.begin(), text.end());
    }
    return out;
}

TriangleMesh read_stl_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("stl: cannot open '" + path + "'");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return read_stl(bytes);
}

void write_stl_file(const TriangleMesh& mesh, const std::string& path, StlFormat format) {
    const std::vector<std::uint8_t> bytes = write_stl(mesh, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("stl: cannot open '" + path + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("stl: write to '" + path + "' failed");
    }
}

}  // namespace distcomp
