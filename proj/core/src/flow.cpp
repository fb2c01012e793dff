#include "spectrace/flow.hpp"

#include "spectrace/error.hpp"
#include "spectrace/ode.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spectrace {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSwitchBand = 0.3;  ///< leave own chart outside (0.3, pi - 0.3)
constexpr double kHardLimit = 0.05;  ///< pole approach limit without a rotated chart

/// Forward-mode 2-jet in two variables: value, both first partials and the
/// three second partials. Used to build the rotated chart's metric jets by
/// composition instead of hand-derived second partials.
struct Jet2 {
    double v = 0, d1 = 0, d2 = 0, d11 = 0, d12 = 0, d22 = 0;
};

Jet2 jconst(double c) { return {c, 0, 0, 0, 0, 0}; }

Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d11 + b.d11, a.d12 + b.d12, a.d22 + b.d22};
}

Jet2 operator-(const Jet2& a) { return {-a.v, -a.d1, -a.d2, -a.d11, -a.d12, -a.d22}; }

Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + a.v * b.d2,
            a.d11 * b.v + 2 * a.d1 * b.d1 + a.v * b.d11,
            a.d12 * b.v + a.d1 * b.d2 + a.d2 * b.d1 + a.v * b.d12,
            a.d22 * b.v + 2 * a.d2 * b.d2 + a.v * b.d22};
}

/// Chain rule for a scalar function given (f, f', f'') at u.v.
Jet2 chain(double f, double fp, double fpp, const Jet2& u) {
    return {f,
            fp * u.d1,
            fp * u.d2,
            fpp * u.d1 * u.d1 + fp * u.d11,
            fpp * u.d1 * u.d2 + fp * u.d12,
            fpp * u.d2 * u.d2 + fp * u.d22};
}

/// Metric jet of the rotated polar chart (poles on the +-x axis):
///   X(theta', phi') = (cos theta', sin theta' sin phi', -sin theta' cos phi')
///   g = g_round + D(X3) dX3 (x) dX3,  D = eta * (2 + p),
/// which is smooth across the chart-0 poles because p(+-1) = 0.
MetricJet rotated_jet(const RevolutionProfile& pr, double t, double f) {
    const Jet2 th{t, 1, 0, 0, 0, 0};
    const Jet2 ph{f, 0, 1, 0, 0, 0};
    const double st = std::sin(t), ct = std::cos(t);
    const double sf = std::sin(f), cf = std::cos(f);
    const Jet2 s = chain(st, ct, -st, th);
    const Jet2 c = chain(ct, -st, -ct, th);
    const Jet2 sp = chain(sf, cf, -sf, ph);
    const Jet2 cp = chain(cf, -sf, -cf, ph);

    const Jet2 x3 = -(s * cp);
    const Jet2 a = -(c * cp); // d X3 / d theta' as an analytic function
    const Jet2 b = s * sp;    // d X3 / d phi'

    const double x = x3.v;
    const double p = pr.p(x), p1 = pr.dp(x), p2 = pr.d2p(x);
    const double et = pr.eta(x), et1 = pr.deta(x), et2 = pr.d2eta(x);
    const double dv = et * (2 + p);
    const double dv1 = et1 * (2 + p) + et * p1;
    const double dv2 = et2 * (2 + p) + 2 * et1 * p1 + et * p2;
    const Jet2 d = chain(dv, dv1, dv2, x3);

    const Jet2 aj = jconst(1.0) + d * a * a;
    const Jet2 bj = d * a * b;
    const Jet2 cj = s * s + d * b * b;

    MetricJet out;
    out.A = aj.v;
    out.A1 = aj.d1;
    out.A2 = aj.d2;
    out.A11 = aj.d11;
    out.A12 = aj.d12;
    out.A22 = aj.d22;
    out.B = bj.v;
    out.B1 = bj.d1;
    out.B2 = bj.d2;
    out.B11 = bj.d11;
    out.B12 = bj.d12;
    out.B22 = bj.d22;
    out.C = cj.v;
    out.C1 = cj.d1;
    out.C2 = cj.d2;
    out.C11 = cj.d11;
    out.C12 = cj.d12;
    out.C22 = cj.d22;
    return out;
}

/// Embedding of a chart into the ambient unit sphere: position and the two
/// coordinate tangent vectors.
void embed(int chart, double t, double f, std::array<double, 3>& x, std::array<double, 3>& xt,
           std::array<double, 3>& xf) {
    const double st = std::sin(t), ct = std::cos(t);
    const double sf = std::sin(f), cf = std::cos(f);
    if (chart == 0) {
        x = {st * cf, st * sf, ct};
        xt = {ct * cf, ct * sf, -st};
        xf = {-st * sf, st * cf, 0};
    } else {
        x = {ct, st * sf, -st * cf};
        xt = {-st, ct * sf, -ct * cf};
        xf = {0, st * cf, st * sf};
    }
}

/// Ambient cotangent representative of (p1, p2) at a chart point: pairing
/// with any tangent vector of the sphere reproduces the covector.
std::array<double, 3> ambient_covector(int chart, double t, double f, double p1, double p2) {
    const double st = std::sin(t);
    const double sf = std::sin(f), cf = std::cos(f);
    if (chart == 0)
        return {-p2 * sf / st, p2 * cf / st, -p1 / st};
    return {-p1 / st, p2 * cf / st, p2 * sf / st};
}

double dot(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

} // namespace

/// Hamilton equations in a fixed chart:
///   u1' = (C p1 - B p2)/det, u2' = (-B p1 + A p2)/det,
///   pi' = -(num_i - 2H det_i)/(2 det), num = C p1^2 - 2B p1 p2 + A p2^2.
void hamiltonian_field(const MetricPatch& patch, const double* y, double* dy) {
    const MetricJet j = patch.jet(y[0], y[1]);
    const double det = j.det();
    const double p1 = y[2], p2 = y[3];
    dy[0] = (j.C * p1 - j.B * p2) / det;
    dy[1] = (-j.B * p1 + j.A * p2) / det;
    const double num = j.C * p1 * p1 - 2 * j.B * p1 * p2 + j.A * p2 * p2;
    const double two_h = num / det;
    const double num1 = j.C1 * p1 * p1 - 2 * j.B1 * p1 * p2 + j.A1 * p2 * p2;
    const double num2 = j.C2 * p1 * p1 - 2 * j.B2 * p1 * p2 + j.A2 * p2 * p2;
    const double det1 = j.A1 * j.C + j.A * j.C1 - 2 * j.B * j.B1;
    const double det2 = j.A2 * j.C + j.A * j.C2 - 2 * j.B * j.B2;
    dy[2] = -(num1 - two_h * det1) / (2 * det);
    dy[3] = -(num2 - two_h * det2) / (2 * det);
}

GeodesicSystem::GeodesicSystem(const MetricPatch& metric) : chart0_(metric) {
    if (metric.has_profile()) {
        const RevolutionProfile pr = metric.profile();
        chart1_.emplace(fmt::format("polar-rotated:{}", pr.family),
                        MetricPatch::JetFn{[pr](double t, double f) { return rotated_jet(pr, t, f); }});
    }
}

const MetricPatch& GeodesicSystem::chart(int id) const {
    if (id == 0)
        return chart0_;
    if (id == 1 && chart1_)
        return *chart1_;
    throw InvalidArgumentError(fmt::format("GeodesicSystem: no chart {}", id));
}

double GeodesicSystem::hamiltonian(const PhasePoint& p) const {
    const MetricJet j = chart(p.chart).jet(p.u1, p.u2);
    const double num = j.C * p.p1 * p.p1 - 2 * j.B * p.p1 * p.p2 + j.A * p.p2 * p.p2;
    return num / (2 * j.det());
}

PhasePoint GeodesicSystem::lift(double u1, double u2, double alpha) const {
    const MetricJet j = chart0_.jet(u1, u2);
    const double sa = std::sqrt(j.A);
    PhasePoint p;
    p.u1 = u1;
    p.u2 = u2;
    p.p1 = sa * std::cos(alpha);
    p.p2 = (j.B / sa) * std::cos(alpha) + std::sqrt(j.det() / j.A) * std::sin(alpha);
    p.chart = 0;
    return p;
}

PhasePoint GeodesicSystem::to_chart(const PhasePoint& p, int target) const {
    if (target == p.chart)
        return p;
    std::array<double, 3> x, xt, xf;
    embed(p.chart, p.u1, p.u2, x, xt, xf);
    const std::array<double, 3> cov = ambient_covector(p.chart, p.u1, p.u2, p.p1, p.p2);
    PhasePoint out;
    out.chart = target;
    if (target == 0) {
        out.u1 = std::acos(std::clamp(x[2], -1.0, 1.0));
        out.u2 = std::atan2(x[1], x[0]);
    } else {
        if (!chart1_)
            throw InvalidArgumentError("GeodesicSystem: rotated chart unavailable "
                                       "(metric has no revolution profile)");
        out.u1 = std::acos(std::clamp(x[0], -1.0, 1.0));
        out.u2 = std::atan2(x[1], -x[2]);
    }
    std::array<double, 3> tx, txt, txf;
    embed(target, out.u1, out.u2, tx, txt, txf);
    out.p1 = dot(cov, txt);
    out.p2 = dot(cov, txf);
    return out;
}

void GeodesicSystem::ambient_phase(const PhasePoint& p, std::array<double, 3>& x,
                                   std::array<double, 3>& v) const {
    std::array<double, 3> xt, xf;
    embed(p.chart, p.u1, p.u2, x, xt, xf);
    const MetricJet j = chart(p.chart).jet(p.u1, p.u2);
    const double det = j.det();
    const double u1dot = (j.C * p.p1 - j.B * p.p2) / det;
    const double u2dot = (-j.B * p.p1 + j.A * p.p2) / det;
    for (int i = 0; i < 3; ++i)
        v[i] = u1dot * xt[i] + u2dot * xf[i];
}

std::array<double, 2> GeodesicSystem::chart0_coordinates(const PhasePoint& p) const {
    if (p.chart == 0)
        return {p.u1, p.u2};
    std::array<double, 3> x, xt, xf;
    embed(p.chart, p.u1, p.u2, x, xt, xf);
    return {std::acos(std::clamp(x[2], -1.0, 1.0)), std::atan2(x[1], x[0])};
}

GeodesicPath GeodesicSystem::flow(const PhasePoint& start, double length,
                                  const FlowOptions& opts) const {
    if (!(length > 0))
        throw InvalidArgumentError(fmt::format("geodesic_flow: length must be positive, got {}", length));
    const double h0 = hamiltonian(start);
    if (std::abs(h0 - 0.5) > 1e-8)
        throw InvalidArgumentError(fmt::format(
            "geodesic_flow: start not on the unit cosphere (H = {:.12g}, expected 0.5)", h0));

    const int count =
        std::max<int>(2, std::lround(opts.samples_per_turn * length / (2 * kPi)));
    const double ds = length / count;

    GeodesicPath path;
    path.total_length = length;
    path.r.resize(count + 1);
    path.samples.resize(count + 1);
    for (int jj = 0; jj <= count; ++jj)
        path.r[jj] = jj * ds;
    path.samples[0] = start;

    int chart_cur = start.chart;
    int next_sample = 1;
    int switches = 0;

    VectorField field = [this, &chart_cur](const double* y, double* dy) {
        hamiltonian_field(chart(chart_cur), y, dy);
    };

    auto on_step = [&](double s, double* y) {
        if (next_sample <= count && std::abs(s - next_sample * ds) < 1e-12 * length) {
            path.samples[next_sample] = {y[0], y[1], y[2], y[3], chart_cur};
            ++next_sample;
        }
        if (y[0] < kSwitchBand || y[0] > kPi - kSwitchBand) {
            if (chart1_) {
                const PhasePoint moved =
                    to_chart({y[0], y[1], y[2], y[3], chart_cur}, 1 - chart_cur);
                y[0] = moved.u1;
                y[1] = moved.u2;
                y[2] = moved.p1;
                y[3] = moved.p2;
                chart_cur = moved.chart;
                ++switches;
            } else if (y[0] < kHardLimit || y[0] > kPi - kHardLimit) {
                throw PoleProximityError(fmt::format(
                    "geodesic_flow: colatitude {:.6g} within {:.2g} of a pole and the metric "
                    "has no revolution profile to build the rotated chart from",
                    y[0], kHardLimit));
            }
        }
    };

    const double y0[4] = {start.u1, start.u2, start.p1, start.p2};
    OdeOptions ode_opts;
    ode_opts.tol = opts.tol;
    ode_integrate(4, field, std::span<const double>(y0, 4), length, ode_opts, nullptr, count,
                  on_step);

    if (next_sample <= count)
        throw DiscretizationError(fmt::format(
            "geodesic_flow: only {} of {} samples landed on the arc-length grid", next_sample - 1,
            count));

    path.chart_switches = switches;
    for (const PhasePoint& p : path.samples)
        path.h_drift = std::max(path.h_drift, std::abs(hamiltonian(p) - 0.5));

    // Closure residual against the sample at r = 2 pi, when the grid has one.
    for (int jj = 0; jj <= count; ++jj) {
        if (std::abs(path.r[jj] - 2 * kPi) < 1e-9) {
            std::array<double, 3> x0, v0, x1, v1;
            ambient_phase(path.samples[0], x0, v0);
            ambient_phase(path.samples[jj], x1, v1);
            double sq = 0;
            for (int i = 0; i < 3; ++i) {
                sq += (x1[i] - x0[i]) * (x1[i] - x0[i]);
                sq += (v1[i] - v0[i]) * (v1[i] - v0[i]);
            }
            path.closure_residual = std::sqrt(sq);
            break;
        }
    }
    return path;
}

PhasePoint lift_to_cosphere(const MetricPatch& metric, double u1, double u2,
                            double direction_angle) {
    return GeodesicSystem(metric).lift(u1, u2, direction_angle);
}

GeodesicPath geodesic_flow(const MetricPatch& metric, const PhasePoint& start, double length,
                           const FlowOptions& opts) {
    return GeodesicSystem(metric).flow(start, length, opts);
}

} // namespace spectrace
