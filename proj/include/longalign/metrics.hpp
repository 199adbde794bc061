#pragma once

#include <cmath>
#include <optional>

#include "longalign/field.hpp"

namespace longalign {

// ---------------------------------------------------------------------------
// Finite differences. Forward differences everywhere, with the last row /
// column taking the backward difference so affine fields have the same
// derivative at the edges as in the interior.
// ---------------------------------------------------------------------------

inline void grad_x(const std::vector<double>& f, int h, int w, std::vector<double>& out) {
    out.assign(f.size(), 0.0);
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w - 1; ++x) out[row + x] = f[row + x + 1] - f[row + x];
        out[row + w - 1] = f[row + w - 1] - f[row + w - 2];
    }
}

inline void grad_y(const std::vector<double>& f, int h, int w, std::vector<double>& out) {
    out.assign(f.size(), 0.0);
    for (int y = 0; y < h - 1; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            out[i] = f[i + w] - f[i];
        }
    for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(h - 1) * w + x;
        out[i] = f[i] - f[i - w];
    }
}

// Adjoints of the difference operators: accumulate d(loss)/d(f) given
// d(loss)/d(grad). Written in gather form (each output cell reads the inputs
// it depends on) so there are no overlapping writes.
inline void grad_x_adjoint(const std::vector<double>& g, int h, int w,
                           std::vector<double>& acc) {
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            if (x >= 1) s += g[row + x - 1];
            s += (x == w - 1) ? g[row + x] : -g[row + x];
            if (x == w - 2) s -= g[row + w - 1];
            acc[row + x] += s;
        }
    }
}

inline void grad_y_adjoint(const std::vector<double>& g, int h, int w,
                           std::vector<double>& acc) {
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            double s = 0.0;
            if (y >= 1) s += g[i - w];
            s += (y == h - 1) ? g[i] : -g[i];
            if (y == h - 2) s -= g[i + w];
            acc[i] += s;
        }
}

// ---------------------------------------------------------------------------
// Normalized cross-correlation, global over the pixel domain.
// ---------------------------------------------------------------------------

inline double ncc(const Image2D& a, const Image2D& b) {
    if (!a.same_shape(b)) throw dimension_error("ncc: shapes differ");
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a.data[i];
        mb += b.data[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.data[i] - ma;
        const double db = b.data[i] - mb;
        num += da * db;
        sa += da * da;
        sb += db * db;
    }
    if (sa <= 0.0 || sb <= 0.0)
        throw undefined_metric_error("ncc undefined: constant image (zero variance)");
    return num / std::sqrt(sa * sb);
}

// NCC value plus d(ncc)/d(b) for every pixel of the second image.
inline double ncc_with_grad(const Image2D& a, const Image2D& b, std::vector<double>& db_out) {
    if (!a.same_shape(b)) throw dimension_error("ncc: shapes differ");
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a.data[i];
        mb += b.data[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.data[i] - ma;
        const double dbv = b.data[i] - mb;
        num += da * dbv;
        sa += da * da;
        sb += dbv * dbv;
    }
    if (sa <= 0.0 || sb <= 0.0)
        throw undefined_metric_error("ncc undefined: constant image (zero variance)");
    const double den = std::sqrt(sa * sb);
    const double value = num / den;
    db_out.assign(n, 0.0);
    // d ncc / d b_i = (a_i - mu_a)/den - ncc * (b_i - mu_b)/sb; the mean terms
    // drop out because the centered a and b sum to zero.
    const double k = value / sb;
    for (std::size_t i = 0; i < n; ++i)
        db_out[i] = (a.data[i] - ma) / den - k * (b.data[i] - mb);
    return value;
}

// ---------------------------------------------------------------------------
// Jacobian-determinant quantities of the full mapping x + phi(x).
// ---------------------------------------------------------------------------

struct JacobianMap {
    int height = 0;
    int width = 0;
    std::vector<double> det;
};

inline JacobianMap jacobian_map(const DeformationField2D& field) {
    JacobianMap jm;
    jm.height = field.height;
    jm.width = field.width;
    std::vector<double> ux, uy, vx, vy;
    grad_x(field.u, field.height, field.width, ux);
    grad_y(field.u, field.height, field.width, uy);
    grad_x(field.v, field.height, field.width, vx);
    grad_y(field.v, field.height, field.width, vy);
    jm.det.resize(field.size());
    for (std::size_t i = 0; i < field.size(); ++i)
        jm.det[i] = (1.0 + ux[i]) * (1.0 + vy[i]) - uy[i] * vx[i];
    return jm;
}

inline double njd_percent(const JacobianMap& jm) {
    if (jm.det.empty()) return 0.0;
    std::size_t folded = 0;
    for (double d : jm.det)
        if (d <= 0.0) ++folded;
    return 100.0 * static_cast<double>(folded) / static_cast<double>(jm.det.size());
}

// Population standard deviation of the determinant map.
inline double jacobian_std(const JacobianMap& jm) {
    if (jm.det.empty()) return 0.0;
    const double n = static_cast<double>(jm.det.size());
    double m = 0.0;
    for (double d : jm.det) m += d;
    m /= n;
    double var = 0.0;
    for (double d : jm.det) var += (d - m) * (d - m);
    return std::sqrt(var / n);
}

enum class SmoothnessReduction { Mean, Sum };

// Displacement-gradient energy: reduce over pixels of |grad u|^2 + |grad v|^2.
// Mean by default so the regularizer weight is resolution independent.
inline double smoothness_energy(const DeformationField2D& field,
                                SmoothnessReduction red = SmoothnessReduction::Mean) {
    std::vector<double> ux, uy, vx, vy;
    grad_x(field.u, field.height, field.width, ux);
    grad_y(field.u, field.height, field.width, uy);
    grad_x(field.v, field.height, field.width, vx);
    grad_y(field.v, field.height, field.width, vy);
    double s = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i)
        s += ux[i] * ux[i] + uy[i] * uy[i] + vx[i] * vx[i] + vy[i] * vy[i];
    if (red == SmoothnessReduction::Mean) s /= static_cast<double>(field.size());
    return s;
}

// Hinge on folds: mean of max(0, -det). Zero iff no folding.
inline double jd_penalty(const JacobianMap& jm) {
    if (jm.det.empty()) return 0.0;
    double s = 0.0;
    for (double d : jm.det)
        if (d < 0.0) s -= d;
    return s / static_cast<double>(jm.det.size());
}

inline double jd_penalty(const DeformationField2D& field) {
    return jd_penalty(jacobian_map(field));
}

// Accumulates d/d(field) of [gamma * (smoothness + lambda * jd_penalty)] into
// (gu, gv). Shares the difference-operator adjoints with the forward path.
inline void regularizer_grad(const DeformationField2D& field, double gamma, double lambda_jd,
                             std::vector<double>& gu, std::vector<double>& gv,
                             SmoothnessReduction red = SmoothnessReduction::Mean) {
    const int h = field.height, w = field.width;
    const std::size_t n = field.size();
    std::vector<double> ux, uy, vx, vy;
    grad_x(field.u, h, w, ux);
    grad_y(field.u, h, w, uy);
    grad_x(field.v, h, w, vx);
    grad_y(field.v, h, w, vy);

    const double inv_n = red == SmoothnessReduction::Mean ? 1.0 / static_cast<double>(n) : 1.0;
    std::vector<double> dux(n), duy(n), dvx(n), dvy(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Smoothness term: d/d(g) of g^2 summed (or averaged) over pixels.
        dux[i] = gamma * 2.0 * ux[i] * inv_n;
        duy[i] = gamma * 2.0 * uy[i] * inv_n;
        dvx[i] = gamma * 2.0 * vx[i] * inv_n;
        dvy[i] = gamma * 2.0 * vy[i] * inv_n;
        // JD hinge term (always averaged): active where det < 0.
        const double det = (1.0 + ux[i]) * (1.0 + vy[i]) - uy[i] * vx[i];
        if (det < 0.0) {
            const double k = gamma * lambda_jd / static_cast<double>(n);
            dux[i] += -k * (1.0 + vy[i]);
            dvy[i] += -k * (1.0 + ux[i]);
            duy[i] += k * vx[i];
            dvx[i] += k * uy[i];
        }
    }
    grad_x_adjoint(dux, h, w, gu);
    grad_y_adjoint(duy, h, w, gu);
    grad_x_adjoint(dvx, h, w, gv);
    grad_y_adjoint(dvy, h, w, gv);
}

// One-stop deformation-quality summary used in registration reports.
struct DeformQualityReport {
    double njd_percent = 0.0;
    double jacobian_std = 0.0;
    double ncc_before = 0.0;
    double ncc_affine = 0.0;
    double ncc_final = 0.0;
};

} // namespace longalign
