#include <catch2/catch_amalgamated.hpp>

#include "longalign/field.hpp"
#include "longalign/pyramid.hpp"
#include "longalign/rng.hpp"

using namespace longalign;

namespace {

Image2D ramp_x(int h, int w) {
    Image2D img(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.at(y, x) = static_cast<double>(x);
    return img;
}

Image2D random_image(int h, int w, std::uint64_t seed) {
    Image2D img(h, w);
    Rng rng(seed);
    for (auto& v : img.data) v = rng.uniform();
    return img;
}

DeformationField2D uniform_field(int h, int w, double u, double v) {
    DeformationField2D f(h, w);
    std::fill(f.u.begin(), f.u.end(), u);
    std::fill(f.v.begin(), f.v.end(), v);
    return f;
}

} // namespace

TEST_CASE("warp with zero field is the identity, bit-exact") {
    Image2D img = random_image(13, 9, 7);
    DeformationField2D zero(13, 9);
    Image2D out = warp_bilinear(img, zero);
    REQUIRE(out.data == img.data);
}

TEST_CASE("warp of a ramp by a unit shift clamps at the border") {
    // I(x,y) = x, u == 1: output(x,y) = min(x+1, 3) on a 4-wide grid.
    Image2D img = ramp_x(4, 4);
    Image2D out = warp_bilinear(img, uniform_field(4, 4, 1.0, 0.0));
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            REQUIRE(out.at(y, x) == Catch::Approx(std::min(x + 1.0, 3.0)));
}

TEST_CASE("warp interpolates at half-pixel offsets") {
    Image2D img(2, 2);
    img.at(0, 0) = 0.0; img.at(0, 1) = 1.0;
    img.at(1, 0) = 0.0; img.at(1, 1) = 1.0;
    Image2D out = warp_bilinear(img, uniform_field(2, 2, 0.5, 0.0));
    REQUIRE(out.at(0, 0) == Catch::Approx(0.5));
    REQUIRE(out.at(1, 0) == Catch::Approx(0.5));
}

TEST_CASE("warp rejects shape mismatch") {
    Image2D img(4, 4);
    DeformationField2D f(4, 5);
    REQUIRE_THROWS_AS(warp_bilinear(img, f), dimension_error);
}

TEST_CASE("warp is linear in the image") {
    Image2D a = random_image(10, 11, 1);
    Image2D b = random_image(10, 11, 2);
    DeformationField2D f(10, 11);
    Rng rng(3);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.u[i] = rng.uniform(-2.0, 2.0);
        f.v[i] = rng.uniform(-2.0, 2.0);
    }
    const double ca = 0.7, cb = -1.3;
    Image2D mix(10, 11);
    for (std::size_t i = 0; i < mix.size(); ++i) mix.data[i] = ca * a.data[i] + cb * b.data[i];
    Image2D wmix = warp_bilinear(mix, f);
    Image2D wa = warp_bilinear(a, f);
    Image2D wb = warp_bilinear(b, f);
    for (std::size_t i = 0; i < mix.size(); ++i) {
        const double expect = ca * wa.data[i] + cb * wb.data[i];
        REQUIRE(wmix.data[i] == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("identity affine yields the zero field exactly") {
    DeformationField2D f = affine_to_field(AffineTransform2D::identity(), 6, 9);
    for (std::size_t i = 0; i < f.size(); ++i) {
        REQUIRE(f.u[i] == 0.0);
        REQUIRE(f.v[i] == 0.0);
    }
}

TEST_CASE("pure normalized translation maps to constant pixel displacement") {
    AffineTransform2D a;
    a.translation = {0.5, 0.0};
    const int w = 9, h = 5;
    DeformationField2D f = affine_to_field(a, h, w);
    for (std::size_t i = 0; i < f.size(); ++i) {
        REQUIRE(f.u[i] == Catch::Approx(0.5 * (w - 1) / 2.0));
        REQUIRE(f.v[i] == Catch::Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("axis scaling is linear in the normalized coordinate") {
    AffineTransform2D a;
    a.matrix = {1.1, 0.0, 0.0, 1.0};
    const int w = 11, h = 7;
    DeformationField2D f = affine_to_field(a, h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double xn = 2.0 * x / (w - 1) - 1.0;
            REQUIRE(f.u[f.idx(y, x)] == Catch::Approx(0.1 * xn * (w - 1) / 2.0).margin(1e-12));
            REQUIRE(f.v[f.idx(y, x)] == Catch::Approx(0.0).margin(1e-15));
        }
}

TEST_CASE("composition with the zero field is bit-exact on either side") {
    DeformationField2D f(8, 8);
    Rng rng(11);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.u[i] = rng.uniform(-1.5, 1.5);
        f.v[i] = rng.uniform(-1.5, 1.5);
    }
    DeformationField2D zero(8, 8);
    DeformationField2D a = compose_fields(zero, f);
    DeformationField2D b = compose_fields(f, zero);
    REQUIRE(a.u == f.u);
    REQUIRE(a.v == f.v);
    REQUIRE(b.u == f.u);
    REQUIRE(b.v == f.v);
}

TEST_CASE("composing two translations adds them") {
    DeformationField2D t1 = uniform_field(12, 10, 1.0, 0.0);
    DeformationField2D t2 = uniform_field(12, 10, 0.0, 2.0);
    DeformationField2D c = compose_fields(t1, t2);
    for (std::size_t i = 0; i < c.size(); ++i) {
        REQUIRE(c.u[i] == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(c.v[i] == Catch::Approx(2.0).margin(1e-12));
    }
}

TEST_CASE("warp through a composed field matches sequential warps") {
    // Smooth content and fields keep the single- vs double-interpolation
    // difference small; noise images would amplify it.
    Image2D img(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            img.at(y, x) = 0.5 + 0.4 * std::sin(0.5 * x) * std::cos(0.4 * y);
    DeformationField2D f1(16, 16), f2(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            const std::size_t i = f1.idx(y, x);
            f1.u[i] = 0.8 * std::sin(0.2 * y);
            f1.v[i] = 0.5 * std::cos(0.2 * x);
            f2.u[i] = 0.6;
            f2.v[i] = -0.4;
        }
    Image2D twice = warp_bilinear(warp_bilinear(img, f1), f2);
    Image2D once = warp_bilinear(img, compose_fields(f1, f2));
    double max_err = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i)
        max_err = std::max(max_err, std::abs(twice.data[i] - once.data[i]));
    REQUIRE(max_err < 0.15); // interpolation differences only
}

TEST_CASE("resize_field scales displacements by the size ratio") {
    DeformationField2D f = uniform_field(8, 8, 2.0, 0.0);
    DeformationField2D r = resize_field(f, 16, 16);
    REQUIRE(r.height == 16);
    for (std::size_t i = 0; i < r.size(); ++i) {
        REQUIRE(r.u[i] == Catch::Approx(4.0));
        REQUIRE(r.v[i] == Catch::Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("resize_field to the same shape is the identity") {
    DeformationField2D f(6, 7);
    Rng rng(4);
    for (auto& x : f.u) x = rng.uniform(-3.0, 3.0);
    for (auto& x : f.v) x = rng.uniform(-3.0, 3.0);
    DeformationField2D r = resize_field(f, 6, 7);
    REQUIRE(r.u == f.u);
    REQUIRE(r.v == f.v);
}

TEST_CASE("resize_field of the zero field stays zero") {
    DeformationField2D f(8, 10);
    DeformationField2D r = resize_field(f, 20, 16);
    for (std::size_t i = 0; i < r.size(); ++i) {
        REQUIRE(r.u[i] == 0.0);
        REQUIRE(r.v[i] == 0.0);
    }
}

TEST_CASE("resize_field round trip preserves a smooth field") {
    DeformationField2D f(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            const std::size_t i = f.idx(y, x);
            f.u[i] = 2.0 * std::sin(2.0 * M_PI * x / 31.0);
            f.v[i] = 1.5 * std::cos(2.0 * M_PI * y / 31.0);
        }
    DeformationField2D up = resize_field(f, 64, 64);
    DeformationField2D back = resize_field(up, 32, 32);
    double mae = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        mae += std::abs(back.u[i] - f.u[i]) + std::abs(back.v[i] - f.v[i]);
    mae /= 2.0 * static_cast<double>(f.size());
    REQUIRE(mae < 0.1);
}

TEST_CASE("pyramid of a 64x64 image with 3 levels") {
    Image2D img = random_image(64, 64, 5);
    Pyramid p = build_pyramid(img, 3);
    REQUIRE(p.count() == 3);
    REQUIRE(p.levels[0].height == 16);
    REQUIRE(p.levels[0].width == 16);
    REQUIRE(p.levels[1].height == 32);
    REQUIRE(p.levels[2].height == 64);
    REQUIRE(p.finest().data == img.data);
}

TEST_CASE("pyramid of a constant image is constant at every level") {
    Image2D img(32, 32, 0.37);
    Pyramid p = build_pyramid(img, 3);
    for (const auto& level : p.levels)
        for (double v : level.data) REQUIRE(v == Catch::Approx(0.37));
}

TEST_CASE("average pooling a 4x4 checkerboard gives uniform 0.5") {
    Image2D img(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) img.at(y, x) = (x + y) % 2;
    Image2D pooled = downsample2x(img);
    for (double v : pooled.data) REQUIRE(v == Catch::Approx(0.5));
}

TEST_CASE("pyramid rejects configurations below the 8x8 floor") {
    Image2D img(32, 32, 0.1);
    REQUIRE_THROWS_AS(build_pyramid(img, 4), config_error);
}
