#include "sefm/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sefm/errors.hpp"

namespace sefm {

namespace {

// Cursor over a netpbm payload. Tracks the byte offset for error messages.
struct ByteCursor {
    const std::vector<uint8_t>& bytes;
    size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }
    uint8_t peek() const { return bytes[pos]; }

    void skip_ws_and_comments() {
        while (!eof()) {
            uint8_t c = bytes[pos];
            if (c == '#') {
                while (!eof() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(c)) {
                ++pos;
            } else {
                break;
            }
        }
    }

    int read_int(const char* what) {
        skip_ws_and_comments();
        if (eof())
            throw DecodeError(std::string("missing ") + what, pos);
        if (!std::isdigit(bytes[pos]))
            throw DecodeError(std::string("expected digit for ") + what, pos);
        long v = 0;
        while (!eof() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 1000000000)
                throw DecodeError(std::string(what) + " out of range", pos);
            ++pos;
        }
        return int(v);
    }
};

}  // namespace

GrayImage decode_image(const std::vector<uint8_t>& bytes) {
    ByteCursor cur{bytes};
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw DecodeError("not a PGM/PPM payload", 0);
    char type = char(bytes[1]);
    if (type != '2' && type != '3' && type != '5' && type != '6')
        throw DecodeError("unsupported netpbm type", 1);
    cur.pos = 2;

    bool color = (type == '3' || type == '6');
    bool ascii = (type == '2' || type == '3');

    int width = cur.read_int("width");
    int height = cur.read_int("height");
    int maxval = cur.read_int("maxval");
    if (width <= 0 || height <= 0)
        throw DecodeError("non-positive dimensions", cur.pos);
    if (maxval <= 0 || maxval > 255)
        throw DecodeError("maxval out of range (must be 1..255)", cur.pos);

    size_t nsamples = size_t(width) * height * (color ? 3 : 1);
    std::vector<double> samples;
    samples.reserve(nsamples);

    if (ascii) {
        for (size_t i = 0; i < nsamples; ++i) {
            int v = cur.read_int("sample");
            if (v > maxval)
                throw DecodeError("sample exceeds maxval", cur.pos);
            samples.push_back(double(v));
        }
    } else {
        // Binary data starts after exactly one whitespace byte.
        if (cur.eof() || !std::isspace(cur.peek()))
            throw DecodeError("missing delimiter before binary data", cur.pos);
        ++cur.pos;
        if (bytes.size() - cur.pos < nsamples)
            throw DecodeError("truncated payload", bytes.size());
        for (size_t i = 0; i < nsamples; ++i) {
            uint8_t v = bytes[cur.pos + i];
            if (v > maxval)
                throw DecodeError("sample exceeds maxval", cur.pos + i);
            samples.push_back(double(v));
        }
    }

    GrayImage img(width, height);
    if (color) {
        for (size_t i = 0; i < size_t(width) * height; ++i) {
            img.data[i] = 0.299 * samples[3 * i] + 0.587 * samples[3 * i + 1] +
                          0.114 * samples[3 * i + 2];
        }
    } else {
        img.data = std::move(samples);
    }
    return img;
}

namespace {

uint8_t to_byte(double v) {
    double r = std::lround(std::clamp(v, 0.0, 255.0));
    return uint8_t(r);
}

void append_header(std::vector<uint8_t>& out, const char* magic, int w, int h) {
    char buf[64];
    int n = std::snprintf(buf, sizeof(buf), "%s\n%d %d\n255\n", magic, w, h);
    out.insert(out.end(), buf, buf + n);
}

}  // namespace

std::vector<uint8_t> encode_pgm(const GrayImage& img) {
    std::vector<uint8_t> out;
    out.reserve(size_t(img.width) * img.height + 32);
    append_header(out, "P5", img.width, img.height);
    for (double v : img.data) out.push_back(to_byte(v));
    return out;
}

std::vector<uint8_t> encode_ppm(const GrayImage& img,
                                const std::vector<OverlaySegment>& overlay) {
    for (const auto& seg : overlay) {
        if (!img.contains(seg.a) || !img.contains(seg.b))
            throw RangeError("overlay segment endpoint outside image");
    }

    std::vector<uint8_t> rgb(size_t(img.width) * img.height * 3);
    for (size_t i = 0; i < img.data.size(); ++i) {
        uint8_t v = to_byte(img.data[i]);
        rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = v;
    }

    auto put = [&](int x, int y, const OverlaySegment& s) {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
        size_t i = 3 * (size_t(y) * img.width + x);
        rgb[i] = s.r;
        rgb[i + 1] = s.g;
        rgb[i + 2] = s.b_;
    };

    // Walk each segment at half-pixel steps and stamp the nearest pixel.
    for (const auto& seg : overlay) {
        double len = dist(seg.a, seg.b);
        int steps = std::max(1, int(std::ceil(len * 2.0)));
        for (int k = 0; k <= steps; ++k) {
            double t = double(k) / steps;
            Point2 p = seg.a + t * (seg.b - seg.a);
            put(int(std::lround(p.x)), int(std::lround(p.y)), seg);
        }
    }

    std::vector<uint8_t> out;
    out.reserve(rgb.size() + 32);
    append_header(out, "P6", img.width, img.height);
    out.insert(out.end(), rgb.begin(), rgb.end());
    return out;
}

double sample_bilinear(const GrayImage& img, Point2 p) {
    if (!(p.x >= 0.0 && p.x <= img.width - 1 && p.y >= 0.0 && p.y <= img.height - 1))
        throw RangeError("sample point outside image");

    // Clamp the cell so x == width-1 lands on the last cell with weight 1.
    int ix = std::min(int(p.x), img.width - 2);
    int iy = std::min(int(p.y), img.height - 2);
    if (img.width == 1) ix = 0;
    if (img.height == 1) iy = 0;
    double fx = p.x - ix;
    double fy = p.y - iy;
    if (img.width == 1) fx = 0.0;
    if (img.height == 1) fy = 0.0;

    int x1 = std::min(ix + 1, img.width - 1);
    int y1 = std::min(iy + 1, img.height - 1);
    double v00 = img.at(ix, iy);
    double v10 = img.at(x1, iy);
    double v01 = img.at(ix, y1);
    double v11 = img.at(x1, y1);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

GrayImage load_image(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open image file: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    return decode_image(bytes);
}

namespace {

void write_file_atomic(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error("cannot write file: " + tmp);
        f.write(reinterpret_cast<const char*>(bytes.data()),
                std::streamsize(bytes.size()));
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void save_pgm(const GrayImage& img, const std::string& path) {
    write_file_atomic(path, encode_pgm(img));
}

void save_ppm(const GrayImage& img, const std::vector<OverlaySegment>& overlay,
              const std::string& path) {
    write_file_atomic(path, encode_ppm(img, overlay));
}

}  // namespace sefm
