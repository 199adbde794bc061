#pragma once

#include "longalign/image.hpp"

namespace longalign {

// Multi-resolution ladder, coarsest first, finest level == input image.
struct Pyramid {
    std::vector<Image2D> levels;

    const Image2D& coarsest() const { return levels.front(); }
    const Image2D& finest() const { return levels.back(); }
    int count() const { return static_cast<int>(levels.size()); }
};

// 2x2 average pooling; odd trailing rows/columns pool over the truncated
// window so every pixel participates. Output dims are ceil(H/2) x ceil(W/2).
inline Image2D downsample2x(const Image2D& img) {
    const int nh = (img.height + 1) / 2;
    const int nw = (img.width + 1) / 2;
    if (nh < 2 || nw < 2) throw config_error("downsample2x would drop below 2x2");
    Image2D out(nh, nw);
    for (int y = 0; y < nh; ++y)
        for (int x = 0; x < nw; ++x) {
            double s = 0.0;
            int n = 0;
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    int yy = 2 * y + dy, xx = 2 * x + dx;
                    if (yy < img.height && xx < img.width) {
                        s += img.at(yy, xx);
                        ++n;
                    }
                }
            out.at(y, x) = s / n;
        }
    return out;
}

inline Pyramid build_pyramid(const Image2D& image, int levels) {
    if (levels < 1) throw config_error("build_pyramid needs at least 1 level");
    Pyramid pyr;
    pyr.levels.resize(levels);
    pyr.levels[levels - 1] = image;
    for (int l = levels - 2; l >= 0; --l) {
        const Image2D& finer = pyr.levels[l + 1];
        if ((finer.height + 1) / 2 < 8 || (finer.width + 1) / 2 < 8)
            throw config_error("build_pyramid: coarsest level would fall below 8x8");
        pyr.levels[l] = downsample2x(finer);
    }
    return pyr;
}

} // namespace longalign
