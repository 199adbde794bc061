#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "longalign/core.hpp"

namespace longalign {

// Single-channel 2D intensity grid, row-major, intensities in [0,1] after
// loading. Used for the fixed/moving mammograms at every pyramid level.
struct Image2D {
    int height = 0;
    int width = 0;
    std::vector<double> data; // height*width, row-major

    Image2D() = default;
    Image2D(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {
        if (h < 2 || w < 2) throw dimension_error("Image2D needs H,W >= 2");
    }

    double& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Image2D& o) const { return height == o.height && width == o.width; }

    void validate() const {
        if (height < 2 || width < 2) throw dimension_error("Image2D needs H,W >= 2");
        if (data.size() != static_cast<std::size_t>(height) * width)
            throw dimension_error("Image2D data length != H*W");
        if (!all_finite(data)) throw data_error("Image2D has non-finite values");
    }
};

// Clamped bilinear sample at continuous position (x, y); out-of-bounds
// coordinates replicate the border. Exact at grid points.
inline double sample_bilinear(const Image2D& img, double x, double y) {
    const int w = img.width, h = img.height;
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    int x1 = std::min(x0 + 1, w - 1);
    int y1 = std::min(y0 + 1, h - 1);
    double dx = x - x0;
    double dy = y - y0;
    double top = (1.0 - dx) * img.at(y0, x0) + dx * img.at(y0, x1);
    double bot = (1.0 - dx) * img.at(y1, x0) + dx * img.at(y1, x1);
    return (1.0 - dy) * top + dy * bot;
}

// d(sample)/dx and d(sample)/dy at (x, y). Zero outside the clamp range,
// right-sided at exact integer coordinates (matches the forward sampling).
inline void sample_bilinear_grad(const Image2D& img, double x, double y,
                                 double& gx, double& gy) {
    const int w = img.width, h = img.height;
    bool inx = (x > 0.0 && x < w - 1);
    bool iny = (y > 0.0 && y < h - 1);
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    int x1 = std::min(x0 + 1, w - 1);
    int y1 = std::min(y0 + 1, h - 1);
    double dx = x - x0;
    double dy = y - y0;
    gx = inx ? (1.0 - dy) * (img.at(y0, x1) - img.at(y0, x0)) +
                   dy * (img.at(y1, x1) - img.at(y1, x0))
             : 0.0;
    gy = iny ? (1.0 - dx) * (img.at(y1, x0) - img.at(y0, x0)) +
                   dx * (img.at(y1, x1) - img.at(y0, x1))
             : 0.0;
}

// Align-corners bilinear resize.
inline Image2D resize_image(const Image2D& img, int new_h, int new_w) {
    if (new_h < 2 || new_w < 2) throw dimension_error("resize_image target needs H,W >= 2");
    Image2D out(new_h, new_w);
    const double sy = new_h > 1 ? static_cast<double>(img.height - 1) / (new_h - 1) : 0.0;
    const double sx = new_w > 1 ? static_cast<double>(img.width - 1) / (new_w - 1) : 0.0;
    for (int y = 0; y < new_h; ++y)
        for (int x = 0; x < new_w; ++x)
            out.at(y, x) = sample_bilinear(img, x * sx, y * sy);
    return out;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace longalign
