#pragma once

#include <array>
#include <cmath>

#include "longalign/image.hpp"

namespace longalign {

// Dense per-pixel displacement field. u is the horizontal component and v the
// vertical one, both in pixels of the grid the field lives on. The field sits
// on the fixed image's grid and points into the moving image (pull warping):
// warped(p) = moving(p + phi(p)).
struct DeformationField2D {
    int height = 0;
    int width = 0;
    std::vector<double> u;
    std::vector<double> v;

    DeformationField2D() = default;
    DeformationField2D(int h, int w)
        : height(h), width(w),
          u(static_cast<std::size_t>(h) * w, 0.0),
          v(static_cast<std::size_t>(h) * w, 0.0) {
        if (h < 2 || w < 2) throw dimension_error("DeformationField2D needs H,W >= 2");
    }

    std::size_t idx(int y, int x) const { return static_cast<std::size_t>(y) * width + x; }
    std::size_t size() const { return u.size(); }
    bool same_shape(const DeformationField2D& o) const {
        return height == o.height && width == o.width;
    }
    bool same_shape(const Image2D& img) const {
        return height == img.height && width == img.width;
    }

    void validate() const {
        const std::size_t n = static_cast<std::size_t>(height) * width;
        if (u.size() != n || v.size() != n)
            throw dimension_error("DeformationField2D component length != H*W");
        if (!all_finite(u) || !all_finite(v))
            throw data_error("DeformationField2D has non-finite displacements");
    }
};

// 6-parameter affine transform expressed in normalized [-1,1]^2 centered
// coordinates so the parameters are resolution independent. Conversion to
// pixel displacements happens in affine_to_field.
struct AffineTransform2D {
    // Row-major 2x2 linear part acting on (x_norm, y_norm).
    std::array<double, 4> matrix{1.0, 0.0, 0.0, 1.0};
    std::array<double, 2> translation{0.0, 0.0};

    static AffineTransform2D identity() { return AffineTransform2D{}; }

    double determinant() const { return matrix[0] * matrix[3] - matrix[1] * matrix[2]; }

    bool finite() const {
        for (double m : matrix)
            if (!std::isfinite(m)) return false;
        return std::isfinite(translation[0]) && std::isfinite(translation[1]);
    }
};

// Backward (pull) warp with clamped bilinear sampling. Identity field returns
// the input bit-exactly.
inline Image2D warp_bilinear(const Image2D& image, const DeformationField2D& field) {
    if (!field.same_shape(image))
        throw dimension_error("warp_bilinear: image and field shapes differ");
    Image2D out(image.height, image.width);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            const std::size_t i = field.idx(y, x);
            out.data[i] = sample_bilinear(image, x + field.u[i], y + field.v[i]);
        }
    return out;
}

// Normalized coordinate of pixel index i on an n-wide axis: maps 0..n-1 onto [-1,1].
inline double to_norm(int i, int n) { return 2.0 * i / (n - 1) - 1.0; }

// Dense pixel-displacement realization of an affine transform:
// phi(p) = (A - I) * p_norm + t, converted from normalized units to pixels.
inline DeformationField2D affine_to_field(const AffineTransform2D& affine, int height,
                                          int width) {
    if (height < 2 || width < 2)
        throw dimension_error("affine_to_field needs H,W >= 2");
    DeformationField2D field(height, width);
    const double half_w = 0.5 * (width - 1);
    const double half_h = 0.5 * (height - 1);
    const double a = affine.matrix[0], b = affine.matrix[1];
    const double c = affine.matrix[2], d = affine.matrix[3];
    for (int y = 0; y < height; ++y) {
        const double yn = to_norm(y, height);
        for (int x = 0; x < width; ++x) {
            const double xn = to_norm(x, width);
            const std::size_t i = field.idx(y, x);
            field.u[i] = ((a - 1.0) * xn + b * yn + affine.translation[0]) * half_w;
            field.v[i] = (c * xn + (d - 1.0) * yn + affine.translation[1]) * half_h;
        }
    }
    return field;
}

// (outer o inner)(p) = inner(p) + outer sampled at p + inner(p), so that
// warp(I, compose(outer, inner)) == warp(warp(I, outer), inner) up to
// interpolation. Bit-exact when inner is the zero field.
inline DeformationField2D compose_fields(const DeformationField2D& outer,
                                         const DeformationField2D& inner) {
    if (!outer.same_shape(inner))
        throw dimension_error("compose_fields: shapes differ");
    DeformationField2D out(outer.height, outer.width);
    // Treat the outer components as images so sampling reuses the clamped
    // bilinear kernel.
    Image2D ou(outer.height, outer.width), ov(outer.height, outer.width);
    ou.data = outer.u;
    ov.data = outer.v;
    for (int y = 0; y < outer.height; ++y)
        for (int x = 0; x < outer.width; ++x) {
            const std::size_t i = out.idx(y, x);
            const double sx = x + inner.u[i];
            const double sy = y + inner.v[i];
            out.u[i] = inner.u[i] + sample_bilinear(ou, sx, sy);
            out.v[i] = inner.v[i] + sample_bilinear(ov, sx, sy);
        }
    return out;
}

// Bilinear resampling of the displacement components plus per-axis rescaling
// by new/old so the physical motion is preserved across resolutions.
inline DeformationField2D resize_field(const DeformationField2D& field, int new_height,
                                       int new_width) {
    if (new_height < 2 || new_width < 2)
        throw dimension_error("resize_field target needs H,W >= 2");
    if (new_height == field.height && new_width == field.width) return field;
    DeformationField2D out(new_height, new_width);
    Image2D fu(field.height, field.width), fv(field.height, field.width);
    fu.data = field.u;
    fv.data = field.v;
    const double rx = static_cast<double>(new_width) / field.width;
    const double ry = static_cast<double>(new_height) / field.height;
    const double sx = static_cast<double>(field.width - 1) / (new_width - 1);
    const double sy = static_cast<double>(field.height - 1) / (new_height - 1);
    for (int y = 0; y < new_height; ++y)
        for (int x = 0; x < new_width; ++x) {
            const std::size_t i = out.idx(y, x);
            out.u[i] = rx * sample_bilinear(fu, x * sx, y * sy);
            out.v[i] = ry * sample_bilinear(fv, x * sx, y * sy);
        }
    return out;
}

inline double field_mean_magnitude(const DeformationField2D& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += std::sqrt(f.u[i] * f.u[i] + f.v[i] * f.v[i]);
    return f.size() ? s / static_cast<double>(f.size()) : 0.0;
}

} // namespace longalign
