#pragma once

#include "longalign/field.hpp"
#include "longalign/metrics.hpp"
#include "longalign/rng.hpp"

namespace longalign {

// Multi-octave value noise in [0,1]. Coarse octaves give the structure the
// registration pyramid needs; fine octaves give NCC something to grip.
inline Image2D value_noise(int h, int w, double scale, std::uint64_t seed, int octaves = 4) {
    Image2D out(h, w, 0.0);
    double amp = 1.0, total = 0.0;
    for (int o = 0; o < octaves; ++o) {
        const double cell = std::max(2.0, 24.0 * scale / static_cast<double>(1 << o));
        const int gw = static_cast<int>(std::ceil(w / cell)) + 2;
        const int gh = static_cast<int>(std::ceil(h / cell)) + 2;
        Rng rng(seed * 1000003ULL + static_cast<std::uint64_t>(o) * 7917ULL);
        std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
        for (auto& v : lattice) v = rng.uniform();
        for (int y = 0; y < h; ++y) {
            const double fy = y / cell;
            const int y0 = static_cast<int>(fy);
            const double dy = fy - y0;
            for (int x = 0; x < w; ++x) {
                const double fx = x / cell;
                const int x0 = static_cast<int>(fx);
                const double dx = fx - x0;
                const std::size_t i00 = static_cast<std::size_t>(y0) * gw + x0;
                const double top = (1 - dx) * lattice[i00] + dx * lattice[i00 + 1];
                const double bot = (1 - dx) * lattice[i00 + gw] + dx * lattice[i00 + gw + 1];
                out.at(y, x) += amp * ((1 - dy) * top + dy * bot);
            }
        }
        total += amp;
        amp *= 0.55;
    }
    for (auto& v : out.data) v /= total;
    return out;
}

// Soft ellipse membership in [0,1], 1 well inside, 0 outside, smooth edge.
inline double ellipse_weight(int y, int x, int h, int w) {
    const double cy = 0.5 * (h - 1), cx = 0.5 * (w - 1);
    const double ry = 0.46 * h, rx = 0.44 * w;
    const double d = std::pow((y - cy) / ry, 2.0) + std::pow((x - cx) / rx, 2.0);
    // Smooth shoulder between d = 0.85 and d = 1.0.
    if (d <= 0.85) return 1.0;
    if (d >= 1.0) return 0.0;
    const double t = (1.0 - d) / 0.15;
    return t * t * (3.0 - 2.0 * t);
}

// Ellipse-bounded textured base image, breast-tissue-like intensity range.
inline Image2D textured_ellipse(int h, int w, double texture_scale, std::uint64_t seed) {
    Image2D noise = value_noise(h, w, texture_scale, seed);
    Image2D out(h, w, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double m = ellipse_weight(y, x, h, w);
            out.at(y, x) = m * (0.18 + 0.72 * noise.at(y, x));
        }
    return out;
}

inline bool inside_ellipse(int y, int x, int h, int w) {
    return ellipse_weight(y, x, h, w) >= 1.0;
}

// Additive Gaussian intensity bump, clamped to [0,1].
inline void add_gaussian_lesion(Image2D& img, double cy, double cx, double radius,
                                double intensity) {
    if (radius <= 0.0) throw config_error("lesion radius must be > 0");
    const double s2 = 2.0 * radius * radius;
    const int pad = static_cast<int>(std::ceil(3.5 * radius));
    const int y0 = std::max(0, static_cast<int>(cy) - pad);
    const int y1 = std::min(img.height - 1, static_cast<int>(cy) + pad);
    const int x0 = std::max(0, static_cast<int>(cx) - pad);
    const int x1 = std::min(img.width - 1, static_cast<int>(cx) + pad);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
            const double v = img.at(y, x) + intensity * std::exp(-d2 / s2);
            img.at(y, x) = std::clamp(v, 0.0, 1.0);
        }
}

// Smooth random deformation: a gentle global affine component plus a few
// low-frequency sinusoids, rescaled so the maximum displacement magnitude is
// max_mag and then shrunk (if ever needed) until the field has no folds.
inline DeformationField2D smooth_random_field(int h, int w, double max_mag,
                                              std::uint64_t seed) {
    Rng rng(seed);
    DeformationField2D f(h, w);
    // Affine share: small rotation, isotropic scale and translation.
    const double rot = rng.uniform(-0.035, 0.035);
    const double scl = rng.uniform(-0.03, 0.03);
    const double tx = rng.uniform(-0.045, 0.045);
    const double ty = rng.uniform(-0.045, 0.045);
    AffineTransform2D a;
    a.matrix = {(1.0 + scl) * std::cos(rot), -std::sin(rot), std::sin(rot),
                (1.0 + scl) * std::cos(rot)};
    a.translation = {tx, ty};
    DeformationField2D fa = affine_to_field(a, h, w);

    struct Wave {
        double au, av, kx, ky, px, py;
    };
    std::vector<Wave> waves(3);
    for (auto& wv : waves) {
        wv.au = rng.uniform(-1.0, 1.0);
        wv.av = rng.uniform(-1.0, 1.0);
        wv.kx = rng.uniform(0.5, 1.6) * 2.0 * M_PI / w;
        wv.ky = rng.uniform(0.5, 1.6) * 2.0 * M_PI / h;
        wv.px = rng.uniform(0.0, 2.0 * M_PI);
        wv.py = rng.uniform(0.0, 2.0 * M_PI);
    }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = f.idx(y, x);
            double u = fa.u[i], v = fa.v[i];
            for (const auto& wv : waves) {
                u += wv.au * std::sin(wv.kx * x + wv.px) * std::cos(wv.ky * y + wv.py);
                v += wv.av * std::cos(wv.kx * x + wv.px) * std::sin(wv.ky * y + wv.py);
            }
            f.u[i] = u;
            f.v[i] = v;
        }
    double peak = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        peak = std::max(peak, std::sqrt(f.u[i] * f.u[i] + f.v[i] * f.v[i]));
    if (peak > 0.0) {
        const double k = max_mag / peak;
        for (std::size_t i = 0; i < f.size(); ++i) {
            f.u[i] *= k;
            f.v[i] *= k;
        }
    }
    // Low-frequency fields of a few pixels never fold in practice; shrink as
    // a hard guarantee for the generator contract.
    while (njd_percent(jacobian_map(f)) > 0.0) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            f.u[i] *= 0.8;
            f.v[i] *= 0.8;
        }
    }
    return f;
}

} // namespace longalign
