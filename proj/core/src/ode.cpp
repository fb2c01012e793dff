#include "spectrace/ode.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "spectrace/error.hpp"

namespace spectrace {

namespace {

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 4th-order embedded weights.
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                 e6 = 187.0 / 2100, e7 = 1.0 / 40;

} // namespace

OdeResult ode_integrate(int dim, const VectorField& f, std::span<const double> y0,
                        double length, const OdeOptions& opts,
                        std::vector<double>* dense, int sample_count,
                        const std::function<void(double s, double* y)>& on_step) {
    if (opts.tol < 1e-14 || opts.tol > 1e-4)
        throw InvalidArgumentError(fmt::format("ode_integrate: tol {} outside [1e-14, 1e-4]", opts.tol));
    if (static_cast<int>(y0.size()) != dim)
        throw InvalidArgumentError("ode_integrate: y0 size does not match dim");
    if (dense && sample_count < 1)
        throw InvalidArgumentError("ode_integrate: dense output requires sample_count >= 1");
    // sample_count > 0 with dense == nullptr still clips steps to the sample
    // boundaries (the caller records states through on_step instead).
    const bool clip_to_samples = sample_count > 0;

    const double T = std::abs(length);
    const double dir = (length >= 0) ? 1.0 : -1.0;

    OdeResult res;
    res.y_final.assign(y0.begin(), y0.end());
    if (T == 0.0) {
        if (dense) {
            dense->assign(static_cast<size_t>(sample_count + 1) * dim, 0.0);
            for (int j = 0; j <= sample_count; ++j)
                std::copy(y0.begin(), y0.end(), dense->begin() + static_cast<size_t>(j) * dim);
        }
        return res;
    }

    std::vector<double> y(res.y_final), ytmp(dim), ynew(dim);
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);

    // Signed field: integrate in the positive parameter s in [0, T].
    auto eval = [&](const double* yy, double* dydt) {
        f(yy, dydt);
        if (dir < 0)
            for (int i = 0; i < dim; ++i) dydt[i] = -dydt[i];
    };

    if (dense) {
        dense->assign(static_cast<size_t>(sample_count + 1) * dim, 0.0);
        std::copy(y.begin(), y.end(), dense->begin());
    }

    double s = 0.0;
    int next_sample = 1;
    const double sample_ds = clip_to_samples ? T / sample_count : 0.0;

    eval(y.data(), k1.data());
    // h_prop tracks the accuracy-limited proposal; the used step may be
    // clipped shorter to land exactly on sample boundaries / the endpoint,
    // and such clipping never feeds back into the proposal.
    double h_prop = std::min(0.01 * T, std::pow(opts.tol, 0.25));
    const double h_min = 1e-12 * T;

    long accepted = 0, rejected = 0;
    while (s < T * (1.0 - 1e-16)) {
        if (h_prop < h_min)
            throw StiffnessError(fmt::format(
                "ode_integrate: step underflow (h = {:.3e} < {:.3e}) at parameter {:.12g}; state[0] = {:.12g}",
                h_prop, h_min, dir * s, y[0]));

        double s_target = T;
        if (clip_to_samples && next_sample <= sample_count)
            s_target = std::min(s_target, next_sample * sample_ds);
        const bool clipped = (s + h_prop > s_target);
        const double h = clipped ? (s_target - s) : h_prop;

        for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        eval(ytmp.data(), k2.data());
        for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(ytmp.data(), k3.data());
        for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(ytmp.data(), k4.data());
        for (int i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval(ytmp.data(), k5.data());
        for (int i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        eval(ytmp.data(), k6.data());
        for (int i = 0; i < dim; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        eval(ynew.data(), k7.data());

        double errnorm = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double y4 = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                          e6 * k6[i] + e7 * k7[i]);
            const double scale = opts.tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
            const double e = (ynew[i] - y4) / scale;
            errnorm += e * e;
        }
        errnorm = std::sqrt(errnorm / dim);

        const double fac = std::clamp(0.9 * std::pow(std::max(errnorm, 1e-10), -0.2), 0.2, 5.0);

        if (errnorm <= 1.0) {
            s += h;
            y.swap(ynew);
            k1.swap(k7); // FSAL
            ++accepted;
            if (on_step) {
                on_step(dir * s, y.data());
                eval(y.data(), k1.data()); // state may have been remapped; refresh derivative
            }
            if (clip_to_samples && next_sample <= sample_count &&
                std::abs(s - next_sample * sample_ds) < 1e-12 * T) {
                if (dense)
                    std::copy(y.begin(), y.end(),
                              dense->begin() + static_cast<size_t>(next_sample) * dim);
                ++next_sample;
            }
            // Grow from the accuracy-limited proposal, not the clipped step.
            h_prop = clipped ? std::max(h * fac, h_prop) : h * fac;
        } else {
            ++rejected;
            h_prop = h * fac; // shrink from the step that actually failed
        }
        if (accepted + rejected > opts.max_steps)
            throw StiffnessError(fmt::format(
                "ode_integrate: exceeded {} steps at parameter {:.12g}", opts.max_steps, dir * s));
        h_prop = std::min(h_prop, T);
    }

    res.y_final = y;
    res.steps_accepted = accepted;
    res.steps_rejected = rejected;
    if (dense)
        std::copy(y.begin(), y.end(),
                  dense->begin() + static_cast<size_t>(sample_count) * dim);
    return res;
}

} // namespace spectrace
