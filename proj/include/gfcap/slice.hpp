#pragma once

#include <memory>
#include <vector>

#include "gfcap/family.hpp"

namespace gfcap {

// A point of Sigma_{F_a}: fiber-critical, with dF/dx_n = a.
struct FiberCriticalPoint {
    Vec z;  // (x, x_n, e)
    Vec y;  // dF/dx at z

    int n() const { return static_cast<int>(y.size()) + 1; }
    double xn() const { return z(n() - 1); }
    Vec x() const { return z.head(n() - 1); }
    Vec e() const { return z.tail(z.size() - n()); }
    Vec projection() const;  // (x, y) in R^{2n-2}
};

struct SliceVertex {
    FiberCriticalPoint p;
    double s = 0;  // arclength in (x, x_n, e) space from the component start
    Vec t;         // unit tangent in (x, x_n, e) space, following the orientation
};

struct SliceComponent {
    std::vector<SliceVertex> verts;  // closed: verts.back() connects to verts.front()
};

// Position along a component: segment index plus fraction in [0,1).
struct CurveParam {
    int comp = 0;
    int seg = 0;
    double frac = 0;
    double key() const { return seg + frac; }
};

struct Crossing {
    Vec position;             // in the projection
    int sign = 0;             // +1/-1, 0 for n > 2 where no sign is defined
    FiberCriticalPoint over;  // larger x_n
    FiberCriticalPoint under;
    CurveParam over_at, under_at;
    double angle = 0;  // angle between the projected tangent lines, radians in (0, pi/2]
};

struct Lobe {
    int comp = 0;
    CurveParam from, to;   // consecutive crossing passages along the component
    int crossing = -1;     // index into double_points when the arc closes up, else -1
    double signed_area = 0;  // (1/2) \oint (x dy - y dx), with the closing chord if not a loop
    bool loop = false;
};

struct SliceDiagram {
    int n = 2;
    int N = 0;
    double height = 0;
    double step = 0;  // tracing step actually used
    std::vector<SliceComponent> components;
    std::vector<Crossing> double_points;
    std::vector<Lobe> lobes;
    std::vector<double> lobe_areas;  // signed areas of closed lobes
    int writhe = 0;
    int winding = 0;
    double total_signed_area = 0;
    std::vector<FiberCriticalPoint> surface;  // n = 3 only: the sampled sphere

    bool empty() const { return components.empty() && surface.empty(); }
};

struct GridSpec {
    int cells = 160;         // seed scan cells per axis
    double half_width = 0;   // 0: support radius of the family
    double step = 0;         // tracing step, 0: 0.01 * scale
    double degenerate_sine = 1e-3;
    int sphere_rings = 48;   // n = 3 parametrization
};

SliceDiagram extract_slice(std::shared_ptr<const GeneratingFamily> f, double a,
                           const GridSpec& grid = {});

// Recomputes crossings of the traced diagram (already filled by extract_slice).
std::vector<Crossing> double_points(std::shared_ptr<const GeneratingFamily> f,
                                    const SliceDiagram& d, const GridSpec& grid = {});

int writhe(const SliceDiagram& d);
bool euler_obstruction(const SliceDiagram& low, const SliceDiagram& high, int chi);
// writhe-only variant used when diagrams are described rather than traced
bool euler_obstruction(int writhe_low, int writhe_high, int chi);

// Quadrature of \int y dx along a component between two params (forward direction),
// with the exact endpoint preimages used at the ends.  n = 2.
double integrate_ydx(std::shared_ptr<const GeneratingFamily> f, const SliceDiagram& d,
                     const CurveParam& from, const FiberCriticalPoint& p_from,
                     const CurveParam& to, const FiberCriticalPoint& p_to);

// Tangent of the projected curve at a point, given the (x, x_n, e) tangent.
Vec projected_tangent(std::shared_ptr<const GeneratingFamily> f, const FiberCriticalPoint& p,
                      const Vec& t);

// A sample of a path on the slice with d(projection)/ds, s the arclength in (x, x_n, e).
// dP may be empty, then the segment is treated as straight.
struct PathSample {
    FiberCriticalPoint p;
    Vec dP;
};

// Samples along a component from one param to another (forward); equal params give the full loop.
std::vector<PathSample> arc_samples(std::shared_ptr<const GeneratingFamily> f, const SliceDiagram& d,
                                    const CurveParam& from, const FiberCriticalPoint& p_from,
                                    const CurveParam& to, const FiberCriticalPoint& p_to);

double path_ydx(const std::vector<PathSample>& path);
void path_integrals(const std::vector<PathSample>& path, double& ydx, double& xdy);

// Simple synthetic diagrams for tests and the euler suite.
SliceDiagram circle_diagram(double r, int samples = 256);

} // namespace gfcap
