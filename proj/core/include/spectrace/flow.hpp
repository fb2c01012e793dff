#pragma once

#include "spectrace/metric.hpp"

#include <array>
#include <limits>
#include <optional>
#include <vector>

namespace spectrace {

/// A point of the unit cosphere bundle in chart coordinates: position
/// (u1, u2), cotangent components (p1, p2), and the chart the coordinates
/// refer to (0 = the metric's own polar chart, 1 = the rotated polar chart
/// with poles on the equator of chart 0, used to integrate through the
/// chart-0 poles).
struct PhasePoint {
    double u1 = 0, u2 = 0;
    double p1 = 0, p2 = 0;
    int chart = 0;
};

struct FlowOptions {
    double tol = 1e-11;          ///< per-step local error tolerance
    int samples_per_turn = 2048; ///< dense samples per arc length 2 pi
};

/// A geodesic integrated over [0, total_length] with dense samples at uniform
/// arc length. Samples are genuine integration endpoints (the adaptive
/// stepper clips to the grid), each tagged with the chart it was recorded in.
struct GeodesicPath {
    std::vector<double> r;           ///< arc-length grid, r.front() = 0
    std::vector<PhasePoint> samples; ///< one per grid entry
    double total_length = 0;
    /// Ambient phase-space distance between the start and the point at
    /// r = 2 pi: sqrt(|X(0)-X(2pi)|^2 + |V(0)-V(2pi)|^2) with X the unit-sphere
    /// position and V the velocity pushed to ambient coordinates. NaN when
    /// 2 pi is not on the sample grid.
    double closure_residual = std::numeric_limits<double>::quiet_NaN();
    double h_drift = 0; ///< max |H - 1/2| over the samples
    int chart_switches = 0;
};

/// The metric together with its rotated polar chart (built from the ambient
/// form g = g_round + D(X3) dX3 (x) dX3, available whenever the metric is a
/// builtin surface of revolution) and the exact cotangent transition maps
/// between the two charts. All geodesic operations go through this system so
/// paths can cross the chart-0 poles.
class GeodesicSystem {
public:
    explicit GeodesicSystem(const MetricPatch& metric);

    const MetricPatch& chart(int id) const;
    bool has_rotated_chart() const { return chart1_.has_value(); }

    /// H = (1/2) g^{ij} p_i p_j at the point, in its own chart.
    double hamiltonian(const PhasePoint& p) const;

    /// Unit covector at (u1, u2) in chart 0 with direction angle alpha
    /// measured from the normalized du1 direction: H = 1/2 exactly.
    PhasePoint lift(double u1, double u2, double alpha) const;

    /// Exact cotangent transition of the point into the target chart
    /// (through the ambient cotangent representative).
    PhasePoint to_chart(const PhasePoint& p, int target) const;

    /// Ambient unit-sphere position X and velocity V = u1dot dX/du1 +
    /// u2dot dX/du2 with udot = g^{ij} p_j (chart-independent up to rounding).
    void ambient_phase(const PhasePoint& p, std::array<double, 3>& x,
                       std::array<double, 3>& v) const;

    /// Chart-0 spherical coordinates (theta, phi) of the point, for
    /// evaluating scalar fields defined on chart 0.
    std::array<double, 2> chart0_coordinates(const PhasePoint& p) const;

    /// Integrates Hamilton's equations over the given positive length with
    /// per-step tolerance opts.tol, switching charts whenever the current
    /// colatitude leaves (0.3, pi - 0.3). Without a rotated chart, approach
    /// within 0.05 rad of a pole raises PoleProximityError.
    GeodesicPath flow(const PhasePoint& start, double length,
                      const FlowOptions& opts = {}) const;

private:
    MetricPatch chart0_;
    std::optional<MetricPatch> chart1_;
};

/// Hamilton's right-hand side for the geodesic flow in a fixed chart,
/// y = (u1, u2, p1, p2). Exposed for joint integrations (Jacobi fields) and
/// for independent oracles in the test-suite.
void hamiltonian_field(const MetricPatch& patch, const double* y, double* dy);

/// Unit-cosphere lift in the metric's own chart; direction_angle 0 is the
/// normalized du1 direction, pi/2 the du2 side of the orthogonal complement.
PhasePoint lift_to_cosphere(const MetricPatch& metric, double u1, double u2,
                            double direction_angle);

/// One-shot geodesic integration (builds the GeodesicSystem internally).
GeodesicPath geodesic_flow(const MetricPatch& metric, const PhasePoint& start, double length,
                           const FlowOptions& opts = {});

} // namespace spectrace
