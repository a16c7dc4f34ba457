#pragma once

#include <limits>
#include <string>
#include <vector>

#include "gfcap/morse.hpp"

namespace gfcap {

// Delta_a sampled on a tensor grid in w = (x, x_n, x~_n).  x_n and x~_n share one
// axis, so the diagonal P_0 runs through grid vertices.  The cell complex is the
// product of the cubical grid in x with the (x_n, x~_n) grid, whose squares are cut
// along the diagonal direction into two triangles; P_0, P_+ and P_- are then exact
// subcomplexes.  Only N = 0 is supported (domain dimension n + 1 <= 4).
struct CubicalField {
    int dim = 0;                             // domain dimension
    std::vector<std::vector<double>> axes;   // node coordinates; axes[dim-2] == axes[dim-1]
    std::vector<double> values;              // vertex values, last axis fastest
    double height = 0;
    double min_value = 0, max_value = 0;
    double theta = 0;           // sweep half-width, beyond all critical values
    double reliable_level = 0;  // events with |value| beyond this may come from the box
    int resolution = 0;
    std::vector<int> core_begin, core_end;   // node range of the uniform core per axis

    int nodes(int axis) const { return static_cast<int>(axes[axis].size()); }
    long long vertex_count() const;
    double vertex_value(const std::vector<int>& idx) const;
    // max - min of Delta over the vertices of the cells touching the vertex nearest to w
    double cell_variation(const Vec& w) const;
};

enum class Region { Full, Plus, Minus };
const char* region_name(Region r);

struct PersistencePair {
    int dim = 0;
    double birth = 0;
    double death = std::numeric_limits<double>::infinity();
    bool essential() const { return death == std::numeric_limits<double>::infinity(); }
};

struct PersistenceDiagram {
    Region region = Region::Full;
    std::vector<PersistencePair> pairs;  // zero-persistence pairs dropped
    long long cells = 0;
};

CubicalField build_field(const DifferenceFunction& delta, int resolution,
                         const SliceDiagram* diagram = nullptr);

// Z/2 sublevel persistence of the lower-star cubical filtration restricted to a region.
PersistenceDiagram persistence(const CubicalField& field, Region region);

// rank H_k(X_tau, X_sigma) for sublevel sets X_s = {value <= s}, sigma < tau
int relative_rank(const PersistenceDiagram& pd, double sigma, double tau, int k);

enum class PairKind { Lower, Upper, Trivial };
const char* pair_kind_name(PairKind k);

struct RankRow {
    double level = 0;
    PairKind pair = PairKind::Lower;
    Region region = Region::Full;
    int degree = 0;
    int rank = 0;
};

struct RankSweep {
    double height = 0;
    double eta = 0;
    double theta = 0;
    double reliable_level = 0;
    int domain_dim = 0;
    std::vector<double> levels;  // negative levels for lower pairs, positive for upper
    std::vector<RankRow> rows;
    PersistenceDiagram full, plus, minus;

    const PersistenceDiagram& diagram(Region r) const;
    // rank of the pair at an arbitrary level, straight from the diagrams
    int rank(PairKind kind, Region r, double level, int degree) const;
    // levels in (lo, hi) at which that rank can change
    std::vector<double> events(PairKind kind, Region r, int degree, double lo, double hi) const;
};

// Default eta: a quarter of the smallest nonzero |critical value| (or of theta when none).
double default_eta(const CubicalField& field, const std::vector<CriticalDatum>* morse);

std::vector<double> default_levels(const CubicalField& field, double eta, int per_side = 24);

RankSweep rank_sweep(const CubicalField& field, double eta, const std::vector<double>& levels,
                     const std::vector<CriticalDatum>* morse = nullptr);

// Filtered groups: lower ranks in slice degree k = absolute - (N+1), upper ranks in
// slice degree k = absolute - (N+2).  Slice degrees may be negative (an index-N
// point shows up in lower degree -1).  Only the split regions are reported.
struct FilteredRow {
    double level = 0;
    bool lower = true;
    Region region = Region::Plus;
    int degree = 0;
    int rank = 0;
};
std::vector<FilteredRow> filtered_groups(const RankSweep& sweep, int N);

} // namespace gfcap
