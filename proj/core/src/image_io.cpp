#include "jssr/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>
#include <png.h>

#include "jssr/errors.hpp"

namespace jssr {

namespace {

namespace fs = std::filesystem;

std::string lower_ext(const std::string& path) {
    std::string ext = fs::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

[[noreturn]] void fail_io(const std::string& msg) { throw IoError(msg); }

// ---------------------------------------------------------------- PNG ----

struct PngReadGuard {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadGuard() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriteGuard {
    FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteGuard() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

ScalarImage load_png(const std::string& path) {
    PngReadGuard g;
    g.fp = std::fopen(path.c_str(), "rb");
    if (!g.fp) fail_io("cannot open image: " + path);
    g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (g.png) g.info = png_create_info_struct(g.png);
    if (!g.png || !g.info) fail_io("out of memory reading PNG: " + path);

    // Locals touched on both sides of the setjmp point stay trivially
    // destructible; the vectors live outside the jump range.
    std::vector<unsigned char> raster;
    std::vector<png_bytep> rows;
    int width = 0, height = 0, depth = 0;
    const char* err = nullptr;

    if (setjmp(png_jmpbuf(g.png))) fail_io("corrupt PNG: " + path);

    png_init_io(g.png, g.fp);
    png_read_info(g.png, g.info);
    width = static_cast<int>(png_get_image_width(g.png, g.info));
    height = static_cast<int>(png_get_image_height(g.png, g.info));
    depth = png_get_bit_depth(g.png, g.info);
    const int color = png_get_color_type(g.png, g.info);
    if (color != PNG_COLOR_TYPE_GRAY)
        err = "only grayscale PNG is supported";
    else if (width < 1 || height < 1)
        err = "empty PNG";
    if (!err) {
        if (depth < 8) {
            png_set_expand_gray_1_2_4_to_8(g.png);
            depth = 8;
        }
        png_read_update_info(g.png, g.info);
        const std::size_t stride = png_get_rowbytes(g.png, g.info);
        raster.resize(stride * static_cast<std::size_t>(height));
        rows.resize(static_cast<std::size_t>(height));
        for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = raster.data() + stride * static_cast<std::size_t>(y);
        png_read_image(g.png, rows.data());
        png_read_end(g.png, nullptr);
    }
    if (err) fail_io(std::string(err) + ": " + path);

    ScalarImage img(GridDims{width, height});
    const std::size_t stride = depth == 16 ? static_cast<std::size_t>(width) * 2
                                           : static_cast<std::size_t>(width);
    for (int y = 0; y < height; ++y) {
        const unsigned char* row = raster.data() + stride * static_cast<std::size_t>(y);
        for (int x = 0; x < width; ++x) {
            double v;
            if (depth == 16) {
                // PNG stores 16-bit samples big-endian.
                v = static_cast<double>((static_cast<unsigned>(row[2 * x]) << 8) |
                                        row[2 * x + 1]);
            } else {
                v = static_cast<double>(row[x]);
            }
            img.data[img.dims.index(x, y, 0)] = v;
        }
    }
    return img;
}

void save_gray_png(const std::string& path, const ScalarImage& image) {
    if (image.dims.ndim != 2) fail_io("PNG output is 2-D only: " + path);
    PngWriteGuard g;
    g.fp = std::fopen(path.c_str(), "wb");
    if (!g.fp) fail_io("cannot write image: " + path);
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (g.png) g.info = png_create_info_struct(g.png);
    if (!g.png || !g.info) fail_io("out of memory writing PNG: " + path);

    const int w = image.dims.nx, h = image.dims.ny;
    std::vector<unsigned char> raster(static_cast<std::size_t>(w) * h);
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
        rows[static_cast<std::size_t>(y)] = raster.data() + static_cast<std::size_t>(w) * y;
        for (int x = 0; x < w; ++x) {
            const double v = std::clamp(image.data[image.dims.index(x, y, 0)], 0.0, 1.0);
            raster[static_cast<std::size_t>(w) * y + x] =
                static_cast<unsigned char>(std::lround(v * 255.0));
        }
    }

    if (setjmp(png_jmpbuf(g.png))) fail_io("failed writing PNG: " + path);
    png_init_io(g.png, g.fp);
    png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    png_write_image(g.png, rows.data());
    png_write_end(g.png, nullptr);
}

void save_rgb_png(const std::string& path, int w, int h, std::vector<unsigned char>& raster) {
    PngWriteGuard g;
    g.fp = std::fopen(path.c_str(), "wb");
    if (!g.fp) fail_io("cannot write image: " + path);
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (g.png) g.info = png_create_info_struct(g.png);
    if (!g.png || !g.info) fail_io("out of memory writing PNG: " + path);

    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y)
        rows[static_cast<std::size_t>(y)] = raster.data() + static_cast<std::size_t>(w) * 3 * y;

    if (setjmp(png_jmpbuf(g.png))) fail_io("failed writing PNG: " + path);
    png_init_io(g.png, g.fp);
    png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    png_write_image(g.png, rows.data());
    png_write_end(g.png, nullptr);
}

// ---------------------------------------------------------------- PGM ----

// Reads the next PNM header token, skipping whitespace and # comments.
long pnm_token(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#')
            while (c != EOF && c != '\n') c = in.get();
        c = in.get();
    }
    if (c == EOF) fail_io("truncated PGM header: " + path);
    long value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) fail_io("malformed PGM header: " + path);
    return value;
}

ScalarImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open image: " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2'))
        fail_io("not a PGM file: " + path);
    const bool binary = magic[1] == '5';
    const long w = pnm_token(in, path);
    const long h = pnm_token(in, path);
    const long maxval = pnm_token(in, path);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) fail_io("bad PGM header: " + path);

    ScalarImage img(GridDims{static_cast<int>(w), static_cast<int>(h)});
    const std::size_t n = img.dims.count();
    if (binary) {
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(n * static_cast<std::size_t>(bytes));
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size())
            fail_io("truncated PGM data: " + path);
        for (std::size_t i = 0; i < n; ++i)
            img.data[i] = bytes == 2 ? static_cast<double>((static_cast<unsigned>(buf[2 * i]) << 8) |
                                                           buf[2 * i + 1])
                                     : static_cast<double>(buf[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) img.data[i] = static_cast<double>(pnm_token(in, path));
    }
    return img;
}

void save_pgm(const std::string& path, const ScalarImage& image) {
    if (image.dims.ndim != 2) fail_io("PGM output is 2-D only: " + path);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write image: " + path);
    out << "P5\n" << image.dims.nx << " " << image.dims.ny << "\n255\n";
    std::vector<unsigned char> buf(image.dims.count());
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] = static_cast<unsigned char>(
            std::lround(std::clamp(image.data[i], 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) fail_io("failed writing image: " + path);
}

// ------------------------------------------------------------- volumes ----

struct RawHeader {
    GridDims dims;
    std::string dtype;
    fs::path data_path;
    int components = 0; // 0 for plain volumes
};

RawHeader read_header(const std::string& path, bool field) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open header: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        fail_io("invalid JSON header " + path + ": " + e.what());
    }

    RawHeader h;
    try {
        const auto dims = j.at("dims");
        if (!dims.is_array() || dims.size() < 2 || dims.size() > 3)
            fail_io("header dims must have 2 or 3 entries: " + path);
        h.dims.nx = dims.at(0).get<int>();
        h.dims.ny = dims.at(1).get<int>();
        h.dims.nz = dims.size() == 3 ? dims.at(2).get<int>() : 1;
        h.dims.ndim = dims.size() == 3 ? 3 : 2;
        h.dtype = j.at("dtype").get<std::string>();
        if (j.contains("byte_order") && j.at("byte_order").get<std::string>() != "little")
            fail_io("only little-endian data is supported: " + path);
        if (field) h.components = j.at("components").get<int>();
        const std::string data = j.contains("data") ? j.at("data").get<std::string>()
                                                    : fs::path(path).stem().string() + ".raw";
        h.data_path = fs::path(data);
        if (h.data_path.is_relative()) h.data_path = fs::path(path).parent_path() / h.data_path;
    } catch (const nlohmann::json::exception& e) {
        fail_io("bad header " + path + ": " + e.what());
    }
    if (h.dims.nx < 1 || h.dims.ny < 1 || h.dims.nz < 1) fail_io("bad header dims: " + path);
    return h;
}

std::vector<unsigned char> read_raw(const fs::path& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open raw data: " + path.string());
    std::vector<unsigned char> buf(expected);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(expected));
    if (static_cast<std::size_t>(in.gcount()) != expected)
        fail_io("raw data shorter than header promises: " + path.string());
    return buf;
}

ScalarImage load_volume(const std::string& path) {
    const RawHeader h = read_header(path, false);
    const std::size_t n = h.dims.count();
    ScalarImage img(h.dims);
    if (h.dtype == "u8") {
        const auto buf = read_raw(h.data_path, n);
        for (std::size_t i = 0; i < n; ++i) img.data[i] = buf[i];
    } else if (h.dtype == "u16") {
        const auto buf = read_raw(h.data_path, n * 2);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint16_t v;
            std::memcpy(&v, buf.data() + 2 * i, 2);
            img.data[i] = v;
        }
    } else if (h.dtype == "f32") {
        const auto buf = read_raw(h.data_path, n * 4);
        for (std::size_t i = 0; i < n; ++i) {
            float v;
            std::memcpy(&v, buf.data() + 4 * i, 4);
            img.data[i] = v;
        }
    } else {
        fail_io("unsupported dtype \"" + h.dtype + "\": " + path);
    }
    return img;
}

fs::path sibling_raw(const std::string& header_path) {
    fs::path p(header_path);
    p.replace_extension(".raw");
    return p;
}

void write_header(const std::string& path, const GridDims& dims, const std::string& dtype,
                  int components, const fs::path& data_path) {
    nlohmann::json j;
    if (dims.ndim == 3)
        j["dims"] = {dims.nx, dims.ny, dims.nz};
    else
        j["dims"] = {dims.nx, dims.ny};
    j["dtype"] = dtype;
    j["byte_order"] = "little";
    if (components > 0) j["components"] = components;
    j["data"] = data_path.filename().string();
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write header: " + path);
    out << j.dump(2) << "\n";
    if (!out) fail_io("failed writing header: " + path);
}

void write_raw(const fs::path& path, const std::vector<float>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write raw data: " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!out) fail_io("failed writing raw data: " + path.string());
}

void save_volume(const std::string& path, const ScalarImage& image) {
    const fs::path raw = sibling_raw(path);
    write_header(path, image.dims, "f32", 0, raw);
    std::vector<float> data(image.data.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(image.data[i]);
    write_raw(raw, data);
}

// ----------------------------------------------------------------- CSV ----

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    for (std::string& f : fields) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return fields;
}

} // namespace

ScalarImage load_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    ScalarImage img;
    if (ext == ".png")
        img = load_png(path);
    else if (ext == ".pgm")
        img = load_pgm(path);
    else if (ext == ".json")
        img = load_volume(path);
    else
        fail_io("unsupported image format \"" + ext + "\": " + path);
    return normalize_minmax(img);
}

void save_image(const std::string& path, const ScalarImage& image) {
    const std::string ext = lower_ext(path);
    if (ext == ".png")
        save_gray_png(path, image);
    else if (ext == ".pgm")
        save_pgm(path, image);
    else if (ext == ".json")
        save_volume(path, image);
    else
        fail_io("unsupported image format \"" + ext + "\": " + path);
}

void save_heatmap_png(const std::string& path, const ScalarImage& map) {
    if (map.dims.ndim != 2) fail_io("heatmap output is 2-D only: " + path);
    const ScalarImage norm = normalize_minmax(map);
    const int w = map.dims.nx, h = map.dims.ny;
    std::vector<unsigned char> rgb(static_cast<std::size_t>(w) * h * 3);
    // Four-segment blue -> cyan -> green -> yellow -> red ramp.
    auto shade = [](double t, int channel) {
        static const double stops[5][3] = {
            {0, 0, 1}, {0, 1, 1}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}};
        const double s = std::clamp(t, 0.0, 1.0) * 4.0;
        const int k = std::min(3, static_cast<int>(s));
        const double f = s - k;
        return stops[k][channel] * (1.0 - f) + stops[k + 1][channel] * f;
    };
    for (std::size_t i = 0; i < norm.data.size(); ++i)
        for (int c = 0; c < 3; ++c)
            rgb[i * 3 + static_cast<std::size_t>(c)] =
                static_cast<unsigned char>(std::lround(shade(norm.data[i], c) * 255.0));
    save_rgb_png(path, w, h, rgb);
}

void save_field(const std::string& path, const DisplacementField& field) {
    const int comp = field.dims.ndim;
    const fs::path raw = sibling_raw(path);
    write_header(path, field.dims, "f32", comp, raw);
    std::vector<float> data(field.vectors.size() * static_cast<std::size_t>(comp));
    for (std::size_t i = 0; i < field.vectors.size(); ++i) {
        data[i * comp] = static_cast<float>(field.vectors[i].x);
        data[i * comp + 1] = static_cast<float>(field.vectors[i].y);
        if (comp == 3) data[i * comp + 2] = static_cast<float>(field.vectors[i].z);
    }
    write_raw(raw, data);
}

DisplacementField load_field(const std::string& path) {
    const RawHeader h = read_header(path, true);
    if (h.dtype != "f32") fail_io("field files must be f32: " + path);
    if (h.components != h.dims.ndim)
        fail_io("field component count does not match dims: " + path);
    const std::size_t n = h.dims.count();
    const auto buf = read_raw(h.data_path, n * static_cast<std::size_t>(h.components) * 4);
    DisplacementField field(h.dims);
    for (std::size_t i = 0; i < n; ++i) {
        float v[3] = {0, 0, 0};
        std::memcpy(v, buf.data() + 4 * i * static_cast<std::size_t>(h.components),
                    sizeof(float) * static_cast<std::size_t>(h.components));
        field.vectors[i] = Vec3{v[0], v[1], h.components == 3 ? v[2] : 0.0};
    }
    return field;
}

LandmarkSet load_landmarks_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open landmarks: " + path);
    std::string line;
    if (!std::getline(in, line)) fail_io("empty landmarks file: " + path);
    const auto header = split_csv_line(line);
    bool three_d;
    if (header.size() == 4 && header[0] == "rx" && header[1] == "ry" && header[2] == "mx" &&
        header[3] == "my")
        three_d = false;
    else if (header.size() == 6 && header[0] == "rx" && header[1] == "ry" && header[2] == "rz" &&
             header[3] == "mx" && header[4] == "my" && header[5] == "mz")
        three_d = true;
    else
        fail_io("landmarks header must be rx,ry[,rz],mx,my[,mz]: " + path);

    LandmarkSet set;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            fail_io("landmarks row " + std::to_string(lineno) + " has wrong field count: " + path);
        double v[6] = {0, 0, 0, 0, 0, 0};
        for (std::size_t i = 0; i < fields.size(); ++i) {
            try {
                v[i] = std::stod(fields[i]);
            } catch (const std::exception&) {
                fail_io("landmarks row " + std::to_string(lineno) + " is not numeric: " + path);
            }
        }
        if (three_d)
            set.pairs.push_back(LandmarkPair{Vec3{v[0], v[1], v[2]}, Vec3{v[3], v[4], v[5]}});
        else
            set.pairs.push_back(LandmarkPair{Vec3{v[0], v[1], 0}, Vec3{v[2], v[3], 0}});
    }
    return set;
}

void save_landmarks_csv(const std::string& path, const LandmarkSet& set) {
    std::ofstream out(path);
    if (!out) fail_io("cannot write landmarks: " + path);
    const bool three_d = !set.pairs.empty() &&
                         (set.pairs.front().reference.z != 0 || set.pairs.front().moving.z != 0);
    out << (three_d ? "rx,ry,rz,mx,my,mz\n" : "rx,ry,mx,my\n");
    for (const LandmarkPair& p : set.pairs) {
        if (three_d)
            out << p.reference.x << "," << p.reference.y << "," << p.reference.z << ","
                << p.moving.x << "," << p.moving.y << "," << p.moving.z << "\n";
        else
            out << p.reference.x << "," << p.reference.y << "," << p.moving.x << ","
                << p.moving.y << "\n";
    }
    if (!out) fail_io("failed writing landmarks: " + path);
}

void save_sparse_csv(const std::string& path, const SparseDisplacements& sparse) {
    std::ofstream out(path);
    if (!out) fail_io("cannot write sparse samples: " + path);
    const bool three_d = sparse.level_dims.ndim == 3;
    out << (three_d ? "x,y,z,dx,dy,dz,certainty\n" : "x,y,dx,dy,certainty\n");
    for (const SparseSample& s : sparse.samples) {
        if (three_d)
            out << s.position.x << "," << s.position.y << "," << s.position.z << ","
                << s.displacement.x << "," << s.displacement.y << "," << s.displacement.z << ","
                << s.certainty << "\n";
        else
            out << s.position.x << "," << s.position.y << "," << s.displacement.x << ","
                << s.displacement.y << "," << s.certainty << "\n";
    }
    if (!out) fail_io("failed writing sparse samples: " + path);
}

} // namespace jssr
