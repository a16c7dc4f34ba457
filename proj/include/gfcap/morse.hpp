#pragma once

#include <vector>

#include "gfcap/difference.hpp"
#include "gfcap/slice.hpp"

namespace gfcap {

// P_plus: x_n <= x~_n, P_minus: x_n >= x~_n, P_zero: on the diagonal hyperplane.
enum class HalfSpace { Plus, Minus, Zero };
enum class CriticalKind { Isolated, Bott };

const char* half_space_name(HalfSpace h);
const char* critical_kind_name(CriticalKind k);

struct CriticalDatum {
    Vec point;  // w = (x, x_n, e, x~_n, e~)
    double value = 0;
    int index = 0;
    int manifold_dim = 0;  // Bott only
    HalfSpace half_space = HalfSpace::Zero;
    CriticalKind kind = CriticalKind::Isolated;
    int source_crossing = -1;
    std::vector<Vec> bott_samples;  // diagonal points taken from the slice trace
};

// Path on Sigma_{F_a} from (x, x~_n, e~) to (x, x_n, e) for one isolated critical point.
struct CrossingPath {
    std::vector<PathSample> samples;
    int crossing = -1;
    int maslov_closed = 0;
};

struct BottCheck {
    double max_grad = 0;
    int min_kernel = 0, max_kernel = 0;
    int samples = 0;
    bool ok = false;
};

// |lambda| below this counts as zero
double degeneracy_threshold(const Eigen::VectorXd& eigenvalues);

std::vector<CriticalDatum> critical_points(const DifferenceFunction& delta, const SliceDiagram& d);

int morse_index_hessian(const DifferenceFunction& delta, const CriticalDatum& cd);

CrossingPath crossing_path(std::shared_ptr<const GeneratingFamily> f, const SliceDiagram& d,
                           const CriticalDatum& cd);

double critical_value_via_path(const CrossingPath& path);

// Tangent-line rotation along the path, closed clockwise; returns -mu + (N+1).
int morse_index_maslov(CrossingPath& path, int N);

BottCheck verify_bott(const DifferenceFunction& delta, const CriticalDatum& bott, int samples = 12);

} // namespace gfcap
