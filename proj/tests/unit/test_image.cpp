#include <doctest.h>

#include <random>

#include "sefm/errors.hpp"
#include "sefm/image.hpp"
#include "support/oracles.hpp"

using namespace sefm;

namespace {

std::vector<uint8_t> bytes_of(const std::string& s) {
    return std::vector<uint8_t>(s.begin(), s.end());
}

}  // namespace

TEST_CASE("binary PGM decodes to the raw pixel values") {
    std::string payload = "P5\n2 2\n255\n";
    payload += char(0);
    payload += char(255);
    payload += char(128);
    payload += char(64);
    GrayImage img = decode_image(bytes_of(payload));
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.data == std::vector<double>{0, 255, 128, 64});
}

TEST_CASE("ascii PGM with header comments decodes") {
    GrayImage img = decode_image(
        bytes_of("P2\n# a comment\n3 1\n# another\n255\n10 20 30\n"));
    CHECK(img.width == 3);
    CHECK(img.data == std::vector<double>{10, 20, 30});
}

TEST_CASE("white PPM pixel converts to full luma") {
    std::string payload = "P6\n1 1\n255\n";
    payload += char(255);
    payload += char(255);
    payload += char(255);
    GrayImage img = decode_image(bytes_of(payload));
    CHECK(img.data[0] == doctest::Approx(255.0));
}

TEST_CASE("ppm luma uses BT.601 weights") {
    GrayImage img = decode_image(bytes_of("P3\n1 1\n255\n100 200 50\n"));
    CHECK(img.data[0] == doctest::Approx(0.299 * 100 + 0.587 * 200 + 0.114 * 50));
}

TEST_CASE("truncated payload reports the byte offset") {
    std::string payload = "P5\n4 4\n255\n";
    payload.append(8, char(9));  // 8 of 16 bytes
    CHECK_THROWS_AS(decode_image(bytes_of(payload)), DecodeError);
    try {
        decode_image(bytes_of(payload));
    } catch (const DecodeError& e) {
        CHECK(e.offset() == payload.size());
    }
}

TEST_CASE("maxval above 255 is rejected") {
    CHECK_THROWS_AS(decode_image(bytes_of("P2\n1 1\n65535\n1000\n")), DecodeError);
}

TEST_CASE("garbage header is rejected") {
    CHECK_THROWS_AS(decode_image(bytes_of("Q5\n1 1\n255\n.")), DecodeError);
    CHECK_THROWS_AS(decode_image(bytes_of("P5\n-3 1\n255\n.")), DecodeError);
}

TEST_CASE("single-pixel ppm replicates gray to all channels") {
    GrayImage img(1, 1);
    img.at(0, 0) = 7.0;
    std::vector<uint8_t> out = encode_ppm(img);
    REQUIRE(out.size() >= 3);
    CHECK(out[out.size() - 3] == 7);
    CHECK(out[out.size() - 2] == 7);
    CHECK(out[out.size() - 1] == 7);
}

TEST_CASE("degenerate overlay segment paints one pixel") {
    GrayImage img(3, 3, 0.0);
    std::vector<uint8_t> out = encode_ppm(img, {{{0, 0}, {0, 0}, 255, 0, 0}});
    size_t body = out.size() - 27;
    CHECK(out[body + 0] == 255);
    CHECK(out[body + 1] == 0);
    CHECK(out[body + 2] == 0);
    // only that pixel is touched
    CHECK(out[body + 3] == 0);
}

TEST_CASE("overlay endpoints outside the image are rejected") {
    GrayImage img(4, 4, 0.0);
    CHECK_THROWS_AS(encode_ppm(img, {{{0, 0}, {9, 0}, 255, 0, 0}}), RangeError);
}

TEST_CASE("gray data round-trips through encode and decode") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        int w = 1 + int(oracle::uniform01(rng) * 63);
        int h = 1 + int(oracle::uniform01(rng) * 63);
        GrayImage img(w, h);
        for (double& v : img.data) v = double(int(oracle::uniform01(rng) * 256));

        GrayImage back = decode_image(encode_pgm(img));
        REQUIRE(back.width == w);
        REQUIRE(back.height == h);
        CHECK(back.data == img.data);

        GrayImage back_color = decode_image(encode_ppm(img));
        CHECK(back_color.width == w);
        // luma weights sum to 1, so gray survives the color path too
        for (size_t i = 0; i < img.data.size(); ++i)
            CHECK(back_color.data[i] == doctest::Approx(img.data[i]).epsilon(1e-9));
    }
}

TEST_CASE("bilinear sampling is exact at integer coordinates") {
    GrayImage img(8, 6);
    std::mt19937_64 rng(22);
    for (double& v : img.data) v = oracle::uniform(rng, 0, 255);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 8; ++x)
            CHECK(sample_bilinear(img, {double(x), double(y)}) ==
                  doctest::Approx(img.at(x, y)));
}

TEST_CASE("bilinear midpoint is the average of neighbors") {
    GrayImage img(2, 1);
    img.at(0, 0) = 0.0;
    img.at(1, 0) = 100.0;
    CHECK(sample_bilinear(img, {0.5, 0.0}) == doctest::Approx(50.0));
}

TEST_CASE("bilinear sampling rejects out-of-bounds points") {
    GrayImage img(4, 4, 1.0);
    CHECK_THROWS_AS(sample_bilinear(img, {3.5, 0.0}), RangeError);
    CHECK_THROWS_AS(sample_bilinear(img, {-0.1, 0.0}), RangeError);
    CHECK_NOTHROW(sample_bilinear(img, {3.0, 3.0}));
}

TEST_CASE("bilinear sampling is Lipschitz and stays within neighbor bounds") {
    GrayImage img(16, 16);
    std::mt19937_64 rng(23);
    for (double& v : img.data) v = oracle::uniform(rng, 0, 255);

    for (int trial = 0; trial < 500; ++trial) {
        Point2 p{oracle::uniform(rng, 0, 15), oracle::uniform(rng, 0, 15)};
        double dx = oracle::uniform(rng, -0.4, 0.4);
        double dy = oracle::uniform(rng, -0.4, 0.4);
        Point2 q{std::clamp(p.x + dx, 0.0, 15.0), std::clamp(p.y + dy, 0.0, 15.0)};
        double a = sample_bilinear(img, p);
        double b = sample_bilinear(img, q);
        CHECK(std::abs(a - b) <=
              255.0 * (std::abs(p.x - q.x) + std::abs(p.y - q.y)) + 1e-9);

        int x0 = std::min(int(p.x), 14), y0 = std::min(int(p.y), 14);
        double lo = std::min({img.at(x0, y0), img.at(x0 + 1, y0),
                              img.at(x0, y0 + 1), img.at(x0 + 1, y0 + 1)});
        double hi = std::max({img.at(x0, y0), img.at(x0 + 1, y0),
                              img.at(x0, y0 + 1), img.at(x0 + 1, y0 + 1)});
        CHECK(a >= lo - 1e-9);
        CHECK(a <= hi + 1e-9);
    }
}
