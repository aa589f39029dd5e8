#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "jssr/errors.hpp"
#include "jssr/eval.hpp"
#include "jssr/image_io.hpp"

#include "synthetic.hpp"

using namespace jssr;
namespace fs = std::filesystem;

namespace {

// Scratch directory shared by the file-format cases.
fs::path scratch() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "jssreg_io_tests";
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string file_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Test-side PNG writers (independent of the library reader under test).
void write_png_gray16(const fs::path& path, int w, int h,
                      const std::vector<std::uint16_t>& samples) {
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    REQUIRE(fp != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 16,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * 2);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint16_t v = samples[static_cast<std::size_t>(y * w + x)];
            row[static_cast<std::size_t>(2 * x)] = static_cast<unsigned char>(v >> 8);
            row[static_cast<std::size_t>(2 * x + 1)] = static_cast<unsigned char>(v & 0xff);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

void write_png_rgb8(const fs::path& path, int w, int h) {
    std::FILE* fp = std::fopen(path.string().c_str(), "wb");
    REQUIRE(fp != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * 3, 128);
    for (int y = 0; y < h; ++y) png_write_row(png, row.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

} // namespace

TEST_CASE("hand-built error lists produce the expected mean and spread") {
    DisplacementField zero(GridDims::d2(16, 16));
    LandmarkSet lm;
    lm.pairs.push_back({Vec3{4, 4, 0}, Vec3{5, 4, 0}});  // error 1
    lm.pairs.push_back({Vec3{8, 4, 0}, Vec3{8, 6, 0}});  // error 2
    lm.pairs.push_back({Vec3{4, 8, 0}, Vec3{7, 8, 0}});  // error 3

    const LandmarkErrors e = landmark_error(lm, zero);
    REQUIRE(e.per_pair.size() == 3);
    CHECK(e.mre == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(e.sd == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("a uniform 3-4-5 offset scores five pixels under the zero field") {
    DisplacementField zero(GridDims::d2(32, 32));
    LandmarkSet lm;
    for (int i = 4; i < 28; i += 6)
        lm.pairs.push_back({Vec3{double(i), double(i), 0}, Vec3{double(i + 3), double(i + 4), 0}});
    const LandmarkErrors e = landmark_error(lm, zero);
    CHECK(e.mre == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(e.sd == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("a perfect field scores zero error") {
    DisplacementField field(GridDims::d2(24, 24));
    for (Vec3& v : field.vectors) v = Vec3{3, 4, 0};
    LandmarkSet lm;
    for (int i = 4; i < 20; i += 5)
        lm.pairs.push_back({Vec3{double(i), 10, 0}, Vec3{double(i + 3), 14, 0}});
    const LandmarkErrors e = landmark_error(lm, field);
    CHECK(e.mre == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(e.sd == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("empty landmark sets are rejected") {
    DisplacementField zero(GridDims::d2(8, 8));
    CHECK_THROWS_AS(landmark_error(LandmarkSet{}, zero), EmptyLandmarks);
}

TEST_CASE("evaluator statistics match a spreadsheet-style recomputation") {
    std::mt19937 rng(81);
    std::uniform_real_distribution<double> disp(-3.0, 3.0), off(-2.0, 2.0);
    DisplacementField field(GridDims::d2(40, 40));
    for (Vec3& v : field.vectors) v = Vec3{disp(rng), disp(rng), 0};

    LandmarkSet lm;
    std::vector<double> expected;
    std::uniform_int_distribution<int> coord(0, 39);
    for (int i = 0; i < 50; ++i) {
        const int x = coord(rng), y = coord(rng);
        const Vec3 r{double(x), double(y), 0};
        const Vec3 m = r + Vec3{off(rng), off(rng), 0};
        lm.pairs.push_back({r, m});
        // Integer reference points sample the field exactly at a node.
        const Vec3 pred = r + field.at(x, y, 0);
        expected.push_back((m - pred).norm());
    }

    const LandmarkErrors e = landmark_error(lm, field);
    REQUIRE(e.per_pair.size() == expected.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(e.per_pair[i] == doctest::Approx(expected[i]).epsilon(1e-12));
        sum += expected[i];
    }
    const double mean = sum / double(expected.size());
    double var = 0.0;
    for (double v : expected) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / double(expected.size()));
    CHECK(e.mre == doctest::Approx(mean).epsilon(1e-9));
    CHECK(e.sd == doctest::Approx(sd).epsilon(1e-9).scale(1.0));
}

TEST_CASE("three-dimensional landmarks use all components") {
    DisplacementField zero(GridDims::d3(8, 8, 8));
    LandmarkSet lm;
    lm.pairs.push_back({Vec3{2, 2, 2}, Vec3{3, 4, 4}}); // offset (1,2,2), norm 3
    const LandmarkErrors e = landmark_error(lm, zero);
    CHECK(e.mre == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("difference images subtract pixelwise") {
    const ScalarImage img = testutil::textured_image(16, 12, 82);
    const ScalarImage zero_diff = difference_image(img, img);
    for (double v : zero_diff.data) CHECK(v == 0.0);

    ScalarImage black(GridDims::d2(8, 8), 0.0), white(GridDims::d2(8, 8), 1.0);
    const ScalarImage ones = difference_image(black, white);
    for (double v : ones.data) CHECK(v == 1.0);

    ScalarImage a(GridDims::d2(8, 8), 0.25), b = a;
    b.at(3, 5, 0) = 0.75;
    const ScalarImage single = difference_image(a, b);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            CHECK(single.at(x, y, 0) == doctest::Approx(x == 3 && y == 5 ? 0.5 : 0.0)
                                            .scale(1.0)
                                            .epsilon(1e-15));

    CHECK_THROWS_AS(difference_image(img, black), DimMismatch);
}

TEST_CASE("grid landmarks tile the interior and fall back to the center") {
    const LandmarkSet set = grid_landmarks(GridDims::d2(32, 24), 8, 4);
    CHECK(set.pairs.size() == 6); // x in {4,12,20}, y in {4,12}
    for (const LandmarkPair& p : set.pairs) {
        CHECK(p.reference.x == p.moving.x);
        CHECK(p.reference.y == p.moving.y);
        CHECK(p.reference.x >= 4);
        CHECK(p.reference.x < 28);
        CHECK(p.reference.y >= 4);
        CHECK(p.reference.y < 20);
    }

    const LandmarkSet tiny = grid_landmarks(GridDims::d2(3, 3), 8, 4);
    REQUIRE(tiny.pairs.size() == 1);
    CHECK(tiny.pairs[0].reference.x == 1.0);
    CHECK(tiny.pairs[0].reference.y == 1.0);

    const LandmarkSet vol = grid_landmarks(GridDims::d3(16, 16, 16), 4, 4);
    CHECK(vol.pairs.size() == 8); // {4,8} per axis
    for (const LandmarkPair& p : vol.pairs) CHECK(p.reference.z >= 4);
}

TEST_CASE("8-bit PNG images survive a save/load round trip") {
    ScalarImage img(GridDims::d2(6, 4));
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x)
            img.at(x, y, 0) = double((y * 6 + x) * 11 + (y * 6 + x == 23 ? 2 : 0)) / 255.0;
    img.at(0, 0, 0) = 0.0;
    img.at(5, 3, 0) = 1.0;

    const fs::path path = scratch() / "roundtrip8.png";
    save_image(path.string(), img);
    const ScalarImage back = load_image(path.string());
    REQUIRE(back.dims == img.dims);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("16-bit PNG samples are assembled big-endian and normalized") {
    const std::vector<std::uint16_t> samples = {0, 257, 4096, 65535, 32768, 513};
    const fs::path path = scratch() / "gray16.png";
    write_png_gray16(path, 3, 2, samples);

    const ScalarImage img = load_image(path.string());
    REQUIRE(img.dims.nx == 3);
    REQUIRE(img.dims.ny == 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x)
            CHECK(img.at(x, y, 0) ==
                  doctest::Approx(samples[std::size_t(y * 3 + x)] / 65535.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("color PNG input is rejected") {
    const fs::path path = scratch() / "color.png";
    write_png_rgb8(path, 4, 4);
    CHECK_THROWS_AS(load_image(path.string()), IoError);
}

TEST_CASE("PGM images round trip through the binary writer") {
    ScalarImage img(GridDims::d2(5, 3));
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x) img.at(x, y, 0) = double(y * 5 + x) * 17.0 / 255.0;
    img.at(4, 2, 0) = 1.0;

    const fs::path path = scratch() / "roundtrip.pgm";
    save_image(path.string(), img);
    const ScalarImage back = load_image(path.string());
    REQUIRE(back.dims == img.dims);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("16-bit binary PGM uses big-endian sample pairs") {
    const fs::path path = scratch() / "deep.pgm";
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n2 2\n65535\n";
        const std::uint16_t samples[4] = {0, 513, 32768, 65535};
        for (std::uint16_t v : samples) {
            out.put(static_cast<char>(v >> 8));
            out.put(static_cast<char>(v & 0xff));
        }
    }
    const ScalarImage img = load_image(path.string());
    CHECK(img.at(0, 0, 0) == doctest::Approx(0.0).scale(1.0));
    CHECK(img.at(1, 0, 0) == doctest::Approx(513.0 / 65535.0).epsilon(1e-12));
    CHECK(img.at(0, 1, 0) == doctest::Approx(32768.0 / 65535.0).epsilon(1e-12));
    CHECK(img.at(1, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ASCII PGM with comments parses") {
    const fs::path path = scratch() / "ascii.pgm";
    {
        std::ofstream out(path);
        out << "P2\n# a comment\n3 2\n# another\n100\n0 25 50\n75 90 100\n";
    }
    const ScalarImage img = load_image(path.string());
    REQUIRE(img.dims.nx == 3);
    REQUIRE(img.dims.ny == 2);
    CHECK(img.at(0, 0, 0) == doctest::Approx(0.0).scale(1.0));
    CHECK(img.at(1, 0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(img.at(2, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("malformed PGM files are I/O errors") {
    const fs::path truncated = scratch() / "short.pgm";
    {
        std::ofstream out(truncated, std::ios::binary);
        out << "P5\n4 4\n255\nab"; // promises 16 bytes, delivers 2
    }
    CHECK_THROWS_AS(load_image(truncated.string()), IoError);

    const fs::path bad = scratch() / "bad.pgm";
    {
        std::ofstream out(bad, std::ios::binary);
        out << "P7\n2 2\n255\nabcd";
    }
    CHECK_THROWS_AS(load_image(bad.string()), IoError);

    CHECK_THROWS_AS(load_image((scratch() / "missing.pgm").string()), IoError);
}

TEST_CASE("f32 volumes round trip through the JSON header format") {
    ScalarImage vol(GridDims::d3(4, 3, 2));
    for (std::size_t i = 0; i < vol.data.size(); ++i)
        vol.data[i] = double(i) / double(vol.data.size() - 1);

    const fs::path path = scratch() / "vol.json";
    save_image(path.string(), vol);
    CHECK(fs::exists(scratch() / "vol.raw"));

    const ScalarImage back = load_image(path.string());
    REQUIRE(back.dims == vol.dims);
    REQUIRE(back.dims.ndim == 3);
    for (std::size_t i = 0; i < vol.data.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(vol.data[i]).epsilon(1e-6).scale(1.0));
}

TEST_CASE("u8 and u16 volumes decode little-endian and normalize") {
    const fs::path h8 = scratch() / "v8.json";
    {
        std::ofstream out(h8);
        out << R"({"dims":[2,2,1],"dtype":"u8","byte_order":"little","data":"v8.raw"})";
    }
    {
        std::ofstream out(scratch() / "v8.raw", std::ios::binary);
        const unsigned char bytes[4] = {0, 51, 102, 204};
        out.write(reinterpret_cast<const char*>(bytes), 4);
    }
    const ScalarImage v8 = load_image(h8.string());
    CHECK(v8.at(0, 0, 0) == doctest::Approx(0.0).scale(1.0));
    CHECK(v8.at(1, 0, 0) == doctest::Approx(51.0 / 204.0).epsilon(1e-12));
    CHECK(v8.at(1, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));

    const fs::path h16 = scratch() / "v16.json";
    {
        std::ofstream out(h16);
        out << R"({"dims":[2,1,2],"dtype":"u16","data":"v16.raw"})";
    }
    {
        std::ofstream out(scratch() / "v16.raw", std::ios::binary);
        // little-endian u16: 0, 513 (0x0201), 1024, 2048
        const unsigned char bytes[8] = {0, 0, 0x01, 0x02, 0, 0x04, 0, 0x08};
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
    const ScalarImage v16 = load_image(h16.string());
    REQUIRE(v16.dims.ndim == 3);
    CHECK(v16.at(1, 0, 0) == doctest::Approx(513.0 / 2048.0).epsilon(1e-12));
    CHECK(v16.at(1, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("volume headers are validated") {
    auto write_text = [](const fs::path& p, const std::string& text) {
        std::ofstream out(p);
        out << text;
    };

    const fs::path big = scratch() / "big.json";
    write_text(big, R"({"dims":[2,2],"dtype":"u8","byte_order":"big","data":"v8.raw"})");
    CHECK_THROWS_AS(load_image(big.string()), IoError);

    const fs::path one_dim = scratch() / "onedim.json";
    write_text(one_dim, R"({"dims":[4],"dtype":"u8"})");
    CHECK_THROWS_AS(load_image(one_dim.string()), IoError);

    const fs::path bad_type = scratch() / "badtype.json";
    write_text(bad_type, R"({"dims":[2,2],"dtype":"u32","data":"v8.raw"})");
    CHECK_THROWS_AS(load_image(bad_type.string()), IoError);

    const fs::path no_raw = scratch() / "noraw.json";
    write_text(no_raw, R"({"dims":[2,2],"dtype":"u8","data":"never_written.raw"})");
    CHECK_THROWS_AS(load_image(no_raw.string()), IoError);

    const fs::path not_json = scratch() / "notjson.json";
    write_text(not_json, "dims 2 2");
    CHECK_THROWS_AS(load_image(not_json.string()), IoError);
}

TEST_CASE("displacement fields round trip exactly") {
    DisplacementField field(GridDims::d2(7, 5));
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 7; ++x)
            field.at(x, y, 0) = Vec3{(x - 3) / 256.0 * 7, (y - 2) / 256.0 * 19, 0};

    const fs::path path = scratch() / "field2d.json";
    save_field(path.string(), field);
    const DisplacementField back = load_field(path.string());
    REQUIRE(back.dims == field.dims);
    for (std::size_t i = 0; i < field.vectors.size(); ++i) {
        CHECK(back.vectors[i].x == field.vectors[i].x); // exact: f32-representable values
        CHECK(back.vectors[i].y == field.vectors[i].y);
    }

    DisplacementField vol(GridDims::d3(3, 4, 5));
    for (std::size_t i = 0; i < vol.vectors.size(); ++i)
        vol.vectors[i] = Vec3{double(i) / 8.0, -double(i) / 16.0, double(i) / 32.0};
    const fs::path vpath = scratch() / "field3d.json";
    save_field(vpath.string(), vol);
    const DisplacementField vback = load_field(vpath.string());
    REQUIRE(vback.dims == vol.dims);
    for (std::size_t i = 0; i < vol.vectors.size(); ++i) {
        CHECK(vback.vectors[i].x == vol.vectors[i].x);
        CHECK(vback.vectors[i].y == vol.vectors[i].y);
        CHECK(vback.vectors[i].z == vol.vectors[i].z);
    }
}

TEST_CASE("field files are byte-identical across saves") {
    DisplacementField field(GridDims::d2(9, 6));
    std::mt19937 rng(83);
    std::uniform_real_distribution<double> disp(-4.0, 4.0);
    for (Vec3& v : field.vectors) v = Vec3{disp(rng), disp(rng), 0};

    const fs::path a = scratch() / "det_a.json";
    const fs::path b = scratch() / "det_b.json";
    save_field(a.string(), field);
    save_field(b.string(), field);
    CHECK(file_text(scratch() / "det_a.raw") == file_text(scratch() / "det_b.raw"));
}

TEST_CASE("field headers are validated") {
    auto write_text = [](const fs::path& p, const std::string& text) {
        std::ofstream out(p);
        out << text;
    };

    const fs::path wrong_comp = scratch() / "wrongcomp.json";
    write_text(wrong_comp,
               R"({"dims":[2,2],"components":3,"dtype":"f32","data":"wrongcomp.raw"})");
    {
        std::ofstream out(scratch() / "wrongcomp.raw", std::ios::binary);
        const float zeros[12] = {};
        out.write(reinterpret_cast<const char*>(zeros), sizeof zeros);
    }
    CHECK_THROWS_AS(load_field(wrong_comp.string()), IoError);

    const fs::path wrong_type = scratch() / "wrongtype.json";
    write_text(wrong_type, R"({"dims":[2,2],"components":2,"dtype":"u8","data":"v8.raw"})");
    CHECK_THROWS_AS(load_field(wrong_type.string()), IoError);

    CHECK_THROWS_AS(load_field((scratch() / "missing_field.json").string()), IoError);
}

TEST_CASE("landmark CSV files round trip") {
    LandmarkSet set;
    set.pairs.push_back({Vec3{1.5, 2, 0}, Vec3{3, 4.25, 0}});
    set.pairs.push_back({Vec3{10, 20, 0}, Vec3{30, 40, 0}});

    const fs::path path = scratch() / "lm2d.csv";
    save_landmarks_csv(path.string(), set);
    const LandmarkSet back = load_landmarks_csv(path.string());
    REQUIRE(back.pairs.size() == 2);
    CHECK(back.pairs[0].reference.x == 1.5);
    CHECK(back.pairs[0].moving.y == 4.25);
    CHECK(back.pairs[1].moving.x == 30.0);

    LandmarkSet vol;
    vol.pairs.push_back({Vec3{1, 2, 3}, Vec3{4, 5, 6}});
    const fs::path vpath = scratch() / "lm3d.csv";
    save_landmarks_csv(vpath.string(), vol);
    const LandmarkSet vback = load_landmarks_csv(vpath.string());
    REQUIRE(vback.pairs.size() == 1);
    CHECK(vback.pairs[0].reference.z == 3.0);
    CHECK(vback.pairs[0].moving.z == 6.0);
}

TEST_CASE("malformed landmark CSV files are I/O errors") {
    auto write_text = [](const fs::path& p, const std::string& text) {
        std::ofstream out(p);
        out << text;
    };

    const fs::path bad_header = scratch() / "badheader.csv";
    write_text(bad_header, "x1,y1,x2,y2\n1,2,3,4\n");
    CHECK_THROWS_AS(load_landmarks_csv(bad_header.string()), IoError);

    const fs::path short_row = scratch() / "shortrow.csv";
    write_text(short_row, "rx,ry,mx,my\n1,2,3\n");
    CHECK_THROWS_AS(load_landmarks_csv(short_row.string()), IoError);

    const fs::path not_number = scratch() / "notnumber.csv";
    write_text(not_number, "rx,ry,mx,my\n1,2,three,4\n");
    CHECK_THROWS_AS(load_landmarks_csv(not_number.string()), IoError);

    CHECK_THROWS_AS(load_landmarks_csv((scratch() / "missing.csv").string()), IoError);

    // Blank lines are tolerated.
    const fs::path blanks = scratch() / "blanks.csv";
    write_text(blanks, "rx,ry,mx,my\n1,2,3,4\n\n5,6,7,8\n");
    CHECK(load_landmarks_csv(blanks.string()).pairs.size() == 2);
}

TEST_CASE("sparse sample dumps carry positions, displacements, and certainty") {
    SparseDisplacements sparse;
    sparse.level_dims = GridDims::d2(16, 16);
    sparse.samples.push_back({Vec3{2, 3, 0}, Vec3{1.5, -0.5, 0}, 0.75});
    sparse.samples.push_back({Vec3{6, 3, 0}, Vec3{0, 2, 0}, 1.0});

    const fs::path path = scratch() / "sparse.csv";
    save_sparse_csv(path.string(), sparse);
    const std::string text = file_text(path);
    CHECK(text.find("x,y,dx,dy,certainty") == 0);
    CHECK(text.find("2,3,1.5,-0.5,0.75") != std::string::npos);
    CHECK(text.find("6,3,0,2,1") != std::string::npos);
}

TEST_CASE("heatmaps render as color PNG") {
    const ScalarImage map = testutil::textured_image(12, 10, 84);
    const fs::path path = scratch() / "heat.png";
    save_heatmap_png(path.string(), map);
    CHECK(fs::exists(path));
    // The rendering is RGB, which the grayscale loader rejects by design.
    CHECK_THROWS_AS(load_image(path.string()), IoError);
}

TEST_CASE("unknown image extensions are rejected") {
    CHECK_THROWS_AS(load_image((scratch() / "img.tiff").string()), IoError);
    const ScalarImage img = testutil::textured_image(4, 4, 85);
    CHECK_THROWS_AS(save_image((scratch() / "img.tiff").string(), img), IoError);
}
