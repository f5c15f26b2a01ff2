#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mgan/image.hpp"
#include "mgan/rng.hpp"

namespace fs = std::filesystem;
using mgan::ImageRGB;

namespace {

fs::path temp_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "mgan_image_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Writes a PNG of arbitrary color type / bit depth so the loader's
// normalization paths can be exercised with real files.
void write_raw_png(const fs::path& path, int w, int h, int color_type, int bit_depth,
                   const std::vector<unsigned char>& row_bytes_per_row) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    REQUIRE(f != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = row_bytes_per_row.size() / static_cast<std::size_t>(h);
    for (int y = 0; y < h; ++y) {
        png_write_row(png, const_cast<png_bytep>(row_bytes_per_row.data() +
                                                 static_cast<std::size_t>(y) * stride));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
}

ImageRGB random_quantized(std::int64_t h, std::int64_t w, std::uint64_t seed) {
    ImageRGB img(3, h, w);
    mgan::Rng rng(seed);
    for (auto& v : img.data) v = static_cast<float>(rng.uniform_int(256)) / 255.0f;
    return img;
}

}  // namespace

TEST_CASE("quantize8 rounds half away from zero and clamps") {
    CHECK(mgan::quantize8(0.0f) == 0);
    CHECK(mgan::quantize8(1.0f) == 255);
    CHECK(mgan::quantize8(1.5f) == 255);
    CHECK(mgan::quantize8(-0.25f) == 0);
    CHECK(mgan::quantize8(0.5f) == 128);          // 127.5 -> 128
    CHECK(mgan::quantize8(0.5f / 255.0f) == 1);   // 0.5 -> 1
    CHECK(mgan::quantize8(0.3f) == 77);           // 76.5 -> 77
    CHECK(mgan::quantize8(std::nanf("")) == 0);
}

TEST_CASE("quantization is idempotent") {
    ImageRGB img(3, 2, 2);
    img.data = {0.1f, 0.26f, 0.4999f, 0.5f, 0.9f, 1.0f, 0.0f, 0.77f, 0.3f, 0.6f, 0.2f, 0.8f};
    ImageRGB q1 = mgan::quantize_image(img);
    ImageRGB q2 = mgan::quantize_image(q1);
    for (std::size_t i = 0; i < q1.data.size(); ++i) CHECK(q1.data[i] == q2.data[i]);
}

TEST_CASE("png round trip preserves 8-bit data exactly") {
    ImageRGB img = random_quantized(13, 7, 100);
    const fs::path p = temp_dir() / "roundtrip.png";
    mgan::save_image(img, p.string());
    ImageRGB back = mgan::load_image(p.string());
    REQUIRE(back.height == img.height);
    REQUIRE(back.width == img.width);
    for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
}

TEST_CASE("bmp round trip preserves 8-bit data at every row padding") {
    for (std::int64_t w : {3, 4, 5, 6}) {
        ImageRGB img = random_quantized(5, w, 200 + static_cast<std::uint64_t>(w));
        const fs::path p = temp_dir() / ("roundtrip_" + std::to_string(w) + ".bmp");
        mgan::save_image(img, p.string());
        ImageRGB back = mgan::load_image(p.string());
        REQUIRE(back.height == img.height);
        REQUIRE(back.width == img.width);
        for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
    }
}

TEST_CASE("grayscale png expands to three equal channels") {
    const fs::path p = temp_dir() / "gray.png";
    std::vector<unsigned char> rows = {10, 200, 37, 0, 255, 128};  // 3x2
    write_raw_png(p, 3, 2, PNG_COLOR_TYPE_GRAY, 8, rows);
    ImageRGB img = mgan::load_image(p.string());
    REQUIRE(img.channels == 3);
    REQUIRE(img.height == 2);
    REQUIRE(img.width == 3);
    CHECK(img.at(0, 0, 1) == 200.0f / 255.0f);
    for (std::int64_t y = 0; y < 2; ++y)
        for (std::int64_t x = 0; x < 3; ++x) {
            CHECK(img.at(0, y, x) == img.at(1, y, x));
            CHECK(img.at(1, y, x) == img.at(2, y, x));
        }
}

TEST_CASE("sixteen-bit png is reduced to its high byte") {
    const fs::path p = temp_dir() / "deep.png";
    // one row, two pixels: 0xABCD and 0x0102 (big-endian within PNG)
    std::vector<unsigned char> rows = {0xAB, 0xCD, 0x01, 0x02};
    write_raw_png(p, 2, 1, PNG_COLOR_TYPE_GRAY, 16, rows);
    ImageRGB img = mgan::load_image(p.string());
    CHECK(img.at(0, 0, 0) == 0xAB / 255.0f);
    CHECK(img.at(0, 0, 1) == 0x01 / 255.0f);
}

TEST_CASE("alpha channels are stripped") {
    const fs::path p = temp_dir() / "rgba.png";
    std::vector<unsigned char> rows = {40, 80, 120, 255, 200, 100, 50, 0};  // 2x1 RGBA
    write_raw_png(p, 2, 1, PNG_COLOR_TYPE_RGB_ALPHA, 8, rows);
    ImageRGB img = mgan::load_image(p.string());
    REQUIRE(img.channels == 3);
    CHECK(img.at(0, 0, 0) == 40.0f / 255.0f);
    CHECK(img.at(1, 0, 0) == 80.0f / 255.0f);
    CHECK(img.at(2, 0, 0) == 120.0f / 255.0f);
    CHECK(img.at(0, 0, 1) == 200.0f / 255.0f);  // alpha 0 does not bleed in
}

TEST_CASE("loader failures raise IoError") {
    CHECK_THROWS_AS(mgan::load_image((temp_dir() / "missing.png").string()), mgan::IoError);
    CHECK_THROWS_AS(mgan::load_image((temp_dir() / "missing.bmp").string()), mgan::IoError);

    const fs::path garbage = temp_dir() / "garbage.png";
    std::ofstream(garbage) << "this is not an image";
    CHECK_THROWS_AS(mgan::load_image(garbage.string()), mgan::IoError);

    const fs::path badbmp = temp_dir() / "garbage.bmp";
    std::ofstream(badbmp) << "nope";
    CHECK_THROWS_AS(mgan::load_image(badbmp.string()), mgan::IoError);

    CHECK_THROWS_AS(mgan::load_image("image.jpg"), mgan::IoError);
    ImageRGB img(3, 2, 2);
    CHECK_THROWS_AS(mgan::save_image(img, "out.tiff"), mgan::IoError);
    ImageRGB gray(1, 2, 2);
    CHECK_THROWS_AS(mgan::save_image(gray, (temp_dir() / "gray_out.png").string()),
                    mgan::IoError);
}

TEST_CASE("luma matches the fixed-point anchors") {
    ImageRGB img(3, 1, 4);
    // white, black, mid gray, pure red
    const float px[4][3] = {{1, 1, 1}, {0, 0, 0}, {0.5f, 0.5f, 0.5f}, {1, 0, 0}};
    for (int x = 0; x < 4; ++x)
        for (int c = 0; c < 3; ++c) img.at(c, 0, x) = px[x][c];
    const std::vector<float> y = mgan::rgb_to_y(img);
    CHECK(y[0] == doctest::Approx(235.0).epsilon(1e-5));
    CHECK(y[1] == doctest::Approx(16.0).epsilon(1e-5));
    CHECK(y[2] == doctest::Approx(125.5).epsilon(1e-5));
    CHECK(y[3] == doctest::Approx(81.481).epsilon(1e-5));

    ImageRGB gray(1, 1, 1);
    CHECK_THROWS_AS(mgan::rgb_to_y(gray), mgan::ShapeError);
}

TEST_CASE("tensor conversion round trips and clamps") {
    ImageRGB img = random_quantized(4, 6, 300);
    mgan::Tensor<float> t = mgan::image_to_tensor(img);
    REQUIRE(t.shape() == mgan::Shape{1, 3, 4, 6});
    ImageRGB back = mgan::tensor_to_image(t);
    for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);

    mgan::Tensor<float> wild = mgan::Tensor<float>::from_data({1, 1, 1, 3}, {-0.5f, 0.25f, 1.5f});
    ImageRGB clamped = mgan::tensor_to_image(wild);
    CHECK(clamped.data[0] == 0.0f);
    CHECK(clamped.data[1] == 0.25f);
    CHECK(clamped.data[2] == 1.0f);

    CHECK_THROWS_AS(mgan::tensor_to_image(mgan::Tensor<float>::zeros({2, 3, 4, 4})),
                    mgan::ShapeError);
}
