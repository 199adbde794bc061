#pragma once

#include <array>
#include <string>

#include "longalign/adam.hpp"
#include "longalign/metrics.hpp"
#include "longalign/pyramid.hpp"

namespace longalign {

struct RegistrationConfig {
    double gamma = 1.0;       // regularizer weight
    double lambda_jd = 1e-5;  // JD-penalty weight inside the regularizer
    int deformable_levels = 4;
    int affine_iters = 200;             // per affine level
    int deformable_iters_per_level = 150;
    double affine_lr = 1e-2;            // normalized-parameter units
    double deformable_lr = 0.5;         // pixels at the coarsest level, halved per level
    double stop_rel_tol = 1e-5;
    std::uint64_t seed = 0; // carried for provenance; the optimizer is deterministic
    SmoothnessReduction smoothness_reduction = SmoothnessReduction::Mean;

    void validate() const {
        if (gamma < 0.0 || lambda_jd < 0.0)
            throw config_error("RegistrationConfig: weights must be >= 0");
        if (deformable_levels < 1 || affine_iters < 1 || deformable_iters_per_level < 1)
            throw config_error("RegistrationConfig: levels and iteration budgets must be >= 1");
        if (affine_lr <= 0.0 || deformable_lr <= 0.0 || stop_rel_tol < 0.0)
            throw config_error("RegistrationConfig: step sizes must be positive");
    }
};

struct RegistrationResult {
    AffineTransform2D affine;
    DeformationField2D final_field; // composed affine + deformable, finest resolution
    Image2D warped_affine;
    Image2D warped_final;
    DeformQualityReport quality;
    // Per-iteration losses, affine stage then deformable stage. Each
    // optimization segment (one pyramid level of one stage) starts at an
    // index in stage_starts and ends at its best loss, so within a segment
    // the last entry never exceeds the first. Losses are not comparable
    // across segments (they are evaluated at different resolutions).
    std::vector<double> loss_trace;
    std::vector<std::size_t> stage_starts;
    std::size_t affine_trace_len = 0; // boundary between the two stages
};

struct ImageLossTerms {
    double affine_term = 0.0; // 1 - NCC_affine
    double final_term = 0.0;  // 1 - NCC_final
    double smoothness = 0.0;
    double jd = 0.0;
    double total = 0.0;
};

// Full registration loss: (1 - NCC_affine) + (1 - NCC_final)
// + gamma * (smoothness + lambda * jd_penalty).
inline ImageLossTerms loss_image(const Image2D& fixed, const Image2D& warped_affine,
                                 const Image2D& warped_final, const DeformationField2D& field,
                                 const RegistrationConfig& cfg) {
    if (!fixed.same_shape(warped_affine) || !fixed.same_shape(warped_final) ||
        !field.same_shape(fixed))
        throw dimension_error("loss_image: shapes differ");
    ImageLossTerms t;
    t.affine_term = 1.0 - ncc(fixed, warped_affine);
    t.final_term = 1.0 - ncc(fixed, warped_final);
    t.smoothness = smoothness_energy(field, cfg.smoothness_reduction);
    t.jd = jd_penalty(field);
    t.total = t.affine_term + t.final_term + cfg.gamma * (t.smoothness + cfg.lambda_jd * t.jd);
    return t;
}

// ---------------------------------------------------------------------------
// Optimized objectives with hand-derived gradients. Both are exposed as
// plain structs so the finite-difference harness can probe them directly.
// ---------------------------------------------------------------------------

// 1 - NCC(fixed, warp(moving, affine)) over the 6 affine parameters
// (a, b, c, d, tx, ty) in normalized coordinates.
struct AffineObjective {
    const Image2D& fixed;
    const Image2D& moving;

    static AffineTransform2D to_affine(const std::vector<double>& p) {
        AffineTransform2D a;
        a.matrix = {p[0], p[1], p[2], p[3]};
        a.translation = {p[4], p[5]};
        return a;
    }

    double value(const std::vector<double>& p) const {
        const DeformationField2D field = affine_to_field(to_affine(p), fixed.height, fixed.width);
        return 1.0 - ncc(fixed, warp_bilinear(moving, field));
    }

    std::vector<double> gradient(const std::vector<double>& p) const {
        const int h = fixed.height, w = fixed.width;
        const DeformationField2D field = affine_to_field(to_affine(p), h, w);
        const Image2D warped = warp_bilinear(moving, field);
        std::vector<double> dncc_dw;
        ncc_with_grad(fixed, warped, dncc_dw);
        const double half_w = 0.5 * (w - 1);
        const double half_h = 0.5 * (h - 1);
        std::vector<double> g(6, 0.0);
        for (int y = 0; y < h; ++y) {
            const double yn = to_norm(y, h);
            for (int x = 0; x < w; ++x) {
                const double xn = to_norm(x, w);
                const std::size_t i = field.idx(y, x);
                double ix, iy; // image gradient of moving at the sample point
                sample_bilinear_grad(moving, x + field.u[i], y + field.v[i], ix, iy);
                const double du = -dncc_dw[i] * ix; // d(1-ncc) / d u_i
                const double dv = -dncc_dw[i] * iy;
                g[0] += du * xn * half_w;
                g[1] += du * yn * half_w;
                g[2] += dv * xn * half_h;
                g[3] += dv * yn * half_h;
                g[4] += du * half_w;
                g[5] += dv * half_h;
            }
        }
        return g;
    }
};

// 1 - NCC(fixed, warp(moving, field)) + gamma * (smoothness + lambda * jd)
// over the per-pixel displacement field, flattened as [u; v].
struct DeformableObjective {
    const Image2D& fixed;
    const Image2D& moving;
    double gamma = 1.0;
    double lambda_jd = 1e-5;
    SmoothnessReduction reduction = SmoothnessReduction::Mean;

    DeformationField2D to_field(const std::vector<double>& p) const {
        DeformationField2D f(fixed.height, fixed.width);
        const std::size_t n = f.size();
        std::copy(p.begin(), p.begin() + n, f.u.begin());
        std::copy(p.begin() + n, p.end(), f.v.begin());
        return f;
    }

    static std::vector<double> flatten(const DeformationField2D& f) {
        std::vector<double> p(2 * f.size());
        std::copy(f.u.begin(), f.u.end(), p.begin());
        std::copy(f.v.begin(), f.v.end(), p.begin() + f.size());
        return p;
    }

    double value(const DeformationField2D& field) const {
        const Image2D warped = warp_bilinear(moving, field);
        return 1.0 - ncc(fixed, warped) +
               gamma * (smoothness_energy(field, reduction) + lambda_jd * jd_penalty(field));
    }

    double value_flat(const std::vector<double>& p) const { return value(to_field(p)); }

    // Gradient with respect to (u, v), accumulated into gu/gv (resized+zeroed).
    void gradient(const DeformationField2D& field, std::vector<double>& gu,
                  std::vector<double>& gv) const {
        const int h = fixed.height, w = fixed.width;
        const Image2D warped = warp_bilinear(moving, field);
        std::vector<double> dncc_dw;
        ncc_with_grad(fixed, warped, dncc_dw);
        gu.assign(field.size(), 0.0);
        gv.assign(field.size(), 0.0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = field.idx(y, x);
                double ix, iy;
                sample_bilinear_grad(moving, x + field.u[i], y + field.v[i], ix, iy);
                gu[i] = -dncc_dw[i] * ix;
                gv[i] = -dncc_dw[i] * iy;
            }
        regularizer_grad(field, gamma, lambda_jd, gu, gv, reduction);
    }

    std::vector<double> grad_flat(const std::vector<double>& p) const {
        const DeformationField2D f = to_field(p);
        std::vector<double> gu, gv;
        gradient(f, gu, gv);
        std::vector<double> g(2 * f.size());
        std::copy(gu.begin(), gu.end(), g.begin());
        std::copy(gv.begin(), gv.end(), g.begin() + f.size());
        return g;
    }
};

struct OptTrace {
    std::vector<double> loss;
    std::vector<std::size_t> stage_starts;
};

namespace detail {

// Shared Adam loop with best-parameter tracking and the relative-change stop.
// Returns the best loss seen; params end at the best point. A warp that
// degenerates to a constant image mid-run counts as divergence.
template <typename ValueFn, typename GradFn>
double optimize_loop(std::vector<double>& params, ValueFn&& value, GradFn&& grad, int iters,
                     double lr, double stop_rel_tol, OptTrace& trace, const char* stage) {
    Adam opt(params.size(), lr);
    trace.stage_starts.push_back(trace.loss.size());
    std::vector<double> best = params;
    double best_loss = value(params); // iteration-0 failures propagate as-is
    if (!std::isfinite(best_loss))
        throw divergence_error(std::string(stage) + " stage diverged at iteration 0");
    trace.loss.push_back(best_loss);
    double prev = best_loss;
    for (int it = 1; it <= iters; ++it) {
        double loss;
        try {
            const std::vector<double> g = grad(params);
            opt.step(params, g);
            loss = value(params);
        } catch (const undefined_metric_error&) {
            throw divergence_error(std::string(stage) + " stage diverged at iteration " +
                                   std::to_string(it) + " (warp degenerated to constant)");
        }
        if (!std::isfinite(loss))
            throw divergence_error(std::string(stage) + " stage diverged at iteration " +
                                   std::to_string(it));
        trace.loss.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            best = params;
        }
        if (std::abs(prev - loss) < stop_rel_tol * std::max(std::abs(prev), 1e-12)) break;
        prev = loss;
    }
    params = best;
    trace.loss.push_back(best_loss); // the segment ends at its best point
    return best_loss;
}

} // namespace detail

// Gradient-based affine alignment, run at the coarsest pyramid level and
// refined at the next one. Parameters are resolution independent, so they
// transfer between levels unchanged.
inline AffineTransform2D optimize_affine(const Image2D& fixed, const Image2D& moving,
                                         const RegistrationConfig& cfg,
                                         OptTrace* trace_out = nullptr) {
    if (!fixed.same_shape(moving)) throw dimension_error("optimize_affine: shapes differ");
    cfg.validate();
    const Pyramid pf = build_pyramid(fixed, cfg.deformable_levels);
    const Pyramid pm = build_pyramid(moving, cfg.deformable_levels);
    std::vector<double> params = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};
    OptTrace trace;
    const int levels_to_run = std::min(2, pf.count());
    for (int l = 0; l < levels_to_run; ++l) {
        AffineObjective obj{pf.levels[l], pm.levels[l]};
        detail::optimize_loop(
            params, [&obj](const std::vector<double>& p) { return obj.value(p); },
            [&obj](const std::vector<double>& p) { return obj.gradient(p); }, cfg.affine_iters,
            cfg.affine_lr, cfg.stop_rel_tol, trace, "affine");
    }
    if (trace_out) *trace_out = std::move(trace);
    return AffineObjective::to_affine(params);
}

// Coarse-to-fine deformable refinement of the full registration objective.
// The returned field lives at the finest resolution, in pixels.
inline DeformationField2D optimize_deformable(const Image2D& fixed,
                                              const Image2D& moving_after_affine,
                                              const RegistrationConfig& cfg,
                                              OptTrace* trace_out = nullptr) {
    if (!fixed.same_shape(moving_after_affine))
        throw dimension_error("optimize_deformable: shapes differ");
    cfg.validate();
    const Pyramid pf = build_pyramid(fixed, cfg.deformable_levels);
    const Pyramid pm = build_pyramid(moving_after_affine, cfg.deformable_levels);
    DeformationField2D field(pf.levels[0].height, pf.levels[0].width);
    OptTrace trace;
    for (int l = 0; l < pf.count(); ++l) {
        const Image2D& f_l = pf.levels[l];
        const Image2D& m_l = pm.levels[l];
        if (l > 0) field = resize_field(field, f_l.height, f_l.width);
        DeformableObjective obj{f_l, m_l, cfg.gamma, cfg.lambda_jd, cfg.smoothness_reduction};
        std::vector<double> params = DeformableObjective::flatten(field);
        const double lr = cfg.deformable_lr * std::pow(0.5, l);
        detail::optimize_loop(
            params, [&obj](const std::vector<double>& p) { return obj.value_flat(p); },
            [&obj](const std::vector<double>& p) { return obj.grad_flat(p); },
            cfg.deformable_iters_per_level, lr, cfg.stop_rel_tol, trace, "deformable");
        field = obj.to_field(params);
    }
    if (trace_out) *trace_out = std::move(trace);
    return field;
}

// Full pipeline: affine stage, deformable refinement of the affine-warped
// moving image, field composition, warped outputs and the quality report.
// Each stage falls back to its initialization if it failed to improve the
// full-resolution NCC, so the reported NCC sequence never degrades.
inline RegistrationResult register_pair(const Image2D& fixed, const Image2D& moving,
                                        const RegistrationConfig& cfg) {
    if (!fixed.same_shape(moving)) throw dimension_error("register: shapes differ");
    cfg.validate();
    fixed.validate();
    moving.validate();

    RegistrationResult res;
    res.quality.ncc_before = ncc(fixed, moving);

    std::vector<double> affine_trace;
    res.affine = optimize_affine(fixed, moving, cfg, &affine_trace);
    DeformationField2D affine_field = affine_to_field(res.affine, fixed.height, fixed.width);
    res.warped_affine = warp_bilinear(moving, affine_field);
    res.quality.ncc_affine = ncc(fixed, res.warped_affine);
    if (res.quality.ncc_affine < res.quality.ncc_before) {
        res.affine = AffineTransform2D::identity();
        affine_field = DeformationField2D(fixed.height, fixed.width);
        res.warped_affine = warp_bilinear(moving, affine_field);
        res.quality.ncc_affine = ncc(fixed, res.warped_affine);
    }

    std::vector<double> deform_trace;
    DeformationField2D deform =
        optimize_deformable(fixed, res.warped_affine, cfg, &deform_trace);
    res.final_field = compose_fields(affine_field, deform);
    res.warped_final = warp_bilinear(moving, res.final_field);
    res.quality.ncc_final = ncc(fixed, res.warped_final);
    if (res.quality.ncc_final < res.quality.ncc_affine) {
        res.final_field = affine_field;
        res.warped_final = warp_bilinear(moving, res.final_field);
        res.quality.ncc_final = ncc(fixed, res.warped_final);
    }

    const JacobianMap jm = jacobian_map(res.final_field);
    res.quality.njd_percent = njd_percent(jm);
    res.quality.jacobian_std = jacobian_std(jm);

    res.loss_trace = std::move(affine_trace);
    res.affine_trace_len = res.loss_trace.size();
    res.loss_trace.insert(res.loss_trace.end(), deform_trace.begin(), deform_trace.end());
    return res;
}

} // namespace longalign
