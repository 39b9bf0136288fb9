#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sefm/linalg.hpp"

namespace sefm {

// Grayscale raster with real-valued intensities in [0, 255]. Stored as
// doubles so interpolation and filtering lose no precision. Immutable in
// the pipeline once built; safe to read from any number of workers.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // row-major, width * height entries

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(size_t(w) * h, fill) {}

    double& at(int x, int y) { return data[size_t(y) * width + x]; }
    double at(int x, int y) const { return data[size_t(y) * width + x]; }
    bool contains(Point2 p) const {
        return p.x >= 0.0 && p.x <= width - 1 && p.y >= 0.0 && p.y <= height - 1;
    }
};

// Colored segment for visualization overlays.
struct OverlaySegment {
    Point2 a;
    Point2 b;
    uint8_t r = 255, g = 0, b_ = 0;
};

// Decodes PGM (P2/P5) or PPM (P3/P6) with maxval <= 255. Color input is
// converted to gray with BT.601 luma (0.299, 0.587, 0.114). Header comments
// ('#' to end of line) are accepted. Throws DecodeError with the offending
// byte offset.
GrayImage decode_image(const std::vector<uint8_t>& bytes);

// Binary PGM (P5).
std::vector<uint8_t> encode_pgm(const GrayImage& img);

// Binary PPM (P6); gray replicated to all three channels, overlay segments
// rasterized on top. Overlay endpoints must be inside the image.
std::vector<uint8_t> encode_ppm(const GrayImage& img,
                                const std::vector<OverlaySegment>& overlay = {});

// Bilinear interpolation of the four surrounding pixels. Exact at integer
// coordinates. Throws RangeError outside [0, w-1] x [0, h-1].
double sample_bilinear(const GrayImage& img, Point2 p);

GrayImage load_image(const std::string& path);
void save_pgm(const GrayImage& img, const std::string& path);
void save_ppm(const GrayImage& img, const std::vector<OverlaySegment>& overlay,
              const std::string& path);

}  // namespace sefm
