#include "mgan/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "mgan/errors.hpp"

namespace mgan {

namespace {

std::string lower_ext(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

struct FileHandle {
    std::FILE* f = nullptr;
    explicit FileHandle(const std::string& path, const char* mode)
        : f(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (f) std::fclose(f);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

ImageRGB load_png(const std::string& path) {
    FileHandle file(path, "rb");
    if (!file.f) throw IoError("cannot open " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, file.f) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw IoError("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG: " + path);
    }
    png_init_io(png, file.f);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize every variant to 8-bit RGB.
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    if (row_bytes != static_cast<std::size_t>(w) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unexpected PNG row layout in " + path);
    }
    pixels.resize(row_bytes * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageRGB img(3, h, w);
    for (std::int64_t y = 0; y < img.height; ++y)
        for (std::int64_t x = 0; x < img.width; ++x)
            for (std::int64_t c = 0; c < 3; ++c)
                img.at(c, y, x) =
                    static_cast<float>(pixels[static_cast<std::size_t>((y * img.width + x) * 3 + c)]) /
                    255.0f;
    return img;
}

void save_png(const ImageRGB& img, const std::string& path) {
    FileHandle file(path, "wb");
    if (!file.f) throw IoError("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_byte> pixels(static_cast<std::size_t>(img.height * img.width * 3));
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG: " + path);
    }
    png_init_io(png, file.f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    for (std::int64_t y = 0; y < img.height; ++y)
        for (std::int64_t x = 0; x < img.width; ++x)
            for (std::int64_t c = 0; c < 3; ++c)
                pixels[static_cast<std::size_t>((y * img.width + x) * 3 + c)] =
                    quantize8(img.at(c, y, x));
    for (std::int64_t y = 0; y < img.height; ++y)
        rows[static_cast<std::size_t>(y)] =
            pixels.data() + static_cast<std::size_t>(y * img.width * 3);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16le(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

// Uncompressed 24-bit BMP, bottom-up rows padded to four bytes.
ImageRGB load_bmp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 54 || bytes[0] != 'B' || bytes[1] != 'M')
        throw IoError("not a BMP file: " + path);
    const std::uint32_t data_offset = read_u32le(&bytes[10]);
    const std::int32_t w = static_cast<std::int32_t>(read_u32le(&bytes[18]));
    const std::int32_t h = static_cast<std::int32_t>(read_u32le(&bytes[22]));
    const std::uint16_t bpp = static_cast<std::uint16_t>(bytes[28] | (bytes[29] << 8));
    const std::uint32_t compression = read_u32le(&bytes[30]);
    if (bpp != 24 || compression != 0)
        throw IoError("unsupported BMP variant in " + path + " (need uncompressed 24-bit)");
    if (w <= 0 || h == 0) throw IoError("bad BMP dimensions in " + path);
    const bool top_down = h < 0;
    const std::int64_t height = top_down ? -h : h;
    const std::size_t stride = (static_cast<std::size_t>(w) * 3 + 3) & ~std::size_t(3);
    if (bytes.size() < data_offset + stride * static_cast<std::size_t>(height))
        throw IoError("truncated BMP: " + path);

    ImageRGB img(3, height, w);
    for (std::int64_t y = 0; y < height; ++y) {
        const std::int64_t src_row = top_down ? y : height - 1 - y;
        const unsigned char* row =
            bytes.data() + data_offset + static_cast<std::size_t>(src_row) * stride;
        for (std::int64_t x = 0; x < w; ++x) {
            // BMP stores BGR
            img.at(2, y, x) = static_cast<float>(row[x * 3 + 0]) / 255.0f;
            img.at(1, y, x) = static_cast<float>(row[x * 3 + 1]) / 255.0f;
            img.at(0, y, x) = static_cast<float>(row[x * 3 + 2]) / 255.0f;
        }
    }
    return img;
}

void save_bmp(const ImageRGB& img, const std::string& path) {
    const std::size_t stride = (static_cast<std::size_t>(img.width) * 3 + 3) & ~std::size_t(3);
    const std::size_t data_size = stride * static_cast<std::size_t>(img.height);
    std::vector<unsigned char> out;
    out.reserve(54 + data_size);
    out.push_back('B');
    out.push_back('M');
    put_u32le(out, static_cast<std::uint32_t>(54 + data_size));
    put_u32le(out, 0);
    put_u32le(out, 54);
    put_u32le(out, 40);  // BITMAPINFOHEADER
    put_u32le(out, static_cast<std::uint32_t>(img.width));
    put_u32le(out, static_cast<std::uint32_t>(img.height));
    put_u16le(out, 1);
    put_u16le(out, 24);
    put_u32le(out, 0);
    put_u32le(out, static_cast<std::uint32_t>(data_size));
    put_u32le(out, 2835);  // 72 DPI
    put_u32le(out, 2835);
    put_u32le(out, 0);
    put_u32le(out, 0);
    for (std::int64_t y = img.height - 1; y >= 0; --y) {
        const std::size_t row_start = out.size();
        for (std::int64_t x = 0; x < img.width; ++x) {
            out.push_back(quantize8(img.at(2, y, x)));
            out.push_back(quantize8(img.at(1, y, x)));
            out.push_back(quantize8(img.at(0, y, x)));
        }
        while (out.size() - row_start < stride) out.push_back(0);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("failed to write " + path);
}

}  // namespace

std::uint8_t quantize8(float v) {
    const float scaled = v * 255.0f;
    if (!(scaled > 0.0f)) return 0;  // also catches NaN
    if (scaled >= 255.0f) return 255;
    return static_cast<std::uint8_t>(std::lround(scaled));
}

ImageRGB quantize_image(const ImageRGB& img) {
    ImageRGB out = img;
    for (auto& v : out.data) v = static_cast<float>(quantize8(v)) / 255.0f;
    return out;
}

ImageRGB load_image(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == "png") return load_png(path);
    if (ext == "bmp") return load_bmp(path);
    throw IoError("unsupported image format: " + path + " (need .png or .bmp)");
}

void save_image(const ImageRGB& img, const std::string& path) {
    if (img.channels != 3 || img.height < 1 || img.width < 1)
        throw IoError("can only save three-channel images, got shape " +
                      std::to_string(img.channels) + "x" + std::to_string(img.height) + "x" +
                      std::to_string(img.width));
    const std::string ext = lower_ext(path);
    if (ext == "png") return save_png(img, path);
    if (ext == "bmp") return save_bmp(img, path);
    throw IoError("unsupported image format: " + path + " (need .png or .bmp)");
}

Tensor<float> image_to_tensor(const ImageRGB& img) {
    Tensor<float> t = Tensor<float>::zeros({1, img.channels, img.height, img.width});
    std::copy(img.data.begin(), img.data.end(), t.data());
    return t;
}

ImageRGB tensor_to_image(const Tensor<float>& t) {
    if (t.rank() != 4 || t.dim(0) != 1)
        throw ShapeError("expected a [1,C,H,W] tensor, got " + shape_str(t.shape()));
    ImageRGB img(t.dim(1), t.dim(2), t.dim(3));
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = std::clamp(t.data()[static_cast<std::int64_t>(i)], 0.0f, 1.0f);
    return img;
}

namespace {

ImageRGB flip_horizontal(const ImageRGB& img) {
    ImageRGB out(img.channels, img.height, img.width);
    for (std::int64_t c = 0; c < img.channels; ++c)
        for (std::int64_t y = 0; y < img.height; ++y)
            for (std::int64_t x = 0; x < img.width; ++x)
                out.at(c, y, x) = img.at(c, y, img.width - 1 - x);
    return out;
}

ImageRGB rot90_ccw(const ImageRGB& img) {
    ImageRGB out(img.channels, img.width, img.height);
    for (std::int64_t c = 0; c < img.channels; ++c)
        for (std::int64_t y = 0; y < out.height; ++y)
            for (std::int64_t x = 0; x < out.width; ++x)
                out.at(c, y, x) = img.at(c, x, img.width - 1 - y);
    return out;
}

}  // namespace

ImageRGB dihedral(const ImageRGB& img, int code) {
    if (code < 0 || code > 7) throw ShapeError("dihedral code must be in 0..7");
    ImageRGB out = (code & 4) ? flip_horizontal(img) : img;
    for (int r = 0; r < (code & 3); ++r) out = rot90_ccw(out);
    return out;
}

int dihedral_inverse(int code) {
    if (code < 0 || code > 7) throw ShapeError("dihedral code must be in 0..7");
    if (code & 4) return code;  // flip-then-rotate transforms are involutions
    return (4 - (code & 3)) & 3;
}

std::vector<float> rgb_to_y(const ImageRGB& img) {
    if (img.channels != 3)
        throw ShapeError("luma conversion needs a three-channel image");
    std::vector<float> y(static_cast<std::size_t>(img.height * img.width));
    for (std::int64_t i = 0; i < img.height; ++i)
        for (std::int64_t j = 0; j < img.width; ++j)
            y[static_cast<std::size_t>(i * img.width + j)] =
                16.0f + 65.481f * img.at(0, i, j) + 128.553f * img.at(1, i, j) +
                24.966f * img.at(2, i, j);
    return y;
}

}  // namespace mgan
