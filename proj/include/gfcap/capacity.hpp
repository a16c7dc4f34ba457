#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gfcap/homology.hpp"

namespace gfcap {

enum class CapacityMethod { SingleCrossingRule, RankSweep };
const char* method_name(CapacityMethod m);

// One slice degree k.  Lower entries belong to classes u in degree k, upper
// entries to classes v in degree k; c <= 0 <= C.
struct CapacityRow {
    int degree = 0;
    double c_plus = 0, c_minus = 0, C_plus = 0, C_minus = 0;
    bool ambiguous = false;  // several thresholds compete for one entry

    double entry(int which) const;  // 0: c+, 1: c-, 2: C+, 3: C-
    double& entry(int which);
};
const char* entry_name(int which);

struct CapacityTable {
    double height = 0;
    CapacityMethod method = CapacityMethod::SingleCrossingRule;
    std::vector<CapacityRow> rows;        // degrees 0 .. n-1
    std::vector<std::string> provenance;
    double tolerance = 0;                 // one-cell value variation for sweep tables

    const CapacityRow& row(int degree) const;
    bool all_zero() const;
    double max_abs() const;
};

CapacityTable zero_table(double height, int n, CapacityMethod m);

// Fast rule for a diagram with exactly one signed double point.
CapacityTable capacities_single_crossing(const SliceDiagram& d, const std::vector<CriticalDatum>& morse);

// Thresholds read off the rank functions.  n = base dimension, N = fiber dimension.
CapacityTable capacities_from_sweep(const RankSweep& sweep, int n, int N = 0,
                                    const std::vector<CriticalDatum>* morse = nullptr);

// Everything computed at one height.
struct PipelineOptions {
    bool fast = true;
    bool sweep = false;
    int resolution = 64;
    int levels_per_side = 24;
    GridSpec grid;
};

struct HeightAnalysis {
    double height = 0;
    SliceDiagram diagram;
    std::vector<CriticalDatum> critical;
    std::vector<double> variation;  // cell variation at each isolated critical point (sweep only)
    std::optional<RankSweep> sweep;
    std::optional<CapacityTable> fast, swept;
    std::vector<std::string> notes;

    // the table to report: fast when present, else the sweep one
    const CapacityTable& table() const;
};

HeightAnalysis analyze_height(std::shared_ptr<const GeneratingFamily> f, double a,
                              const PipelineOptions& opt = {});

// max |x_n - x~_n| over the isolated critical points, 0 without crossings
double crossing_gap(const DifferenceFunction& delta, const std::vector<CriticalDatum>& morse);

struct DerivativeSample {
    double height = 0;
    int degree = 0;
    int which = 0;
    double numeric = 0;    // central difference of the capacity in t
    double predicted = 0;  // x~_n - x_n at the matching critical point
};

struct CapacityCurve {
    std::vector<double> heights;
    std::vector<CapacityTable> tables;
    std::vector<double> gaps;  // crossing_gap per height
    std::vector<DerivativeSample> derivatives;
    std::vector<std::string> warnings;  // skipped heights
};

struct ScanOptions {
    PipelineOptions pipeline;
    bool derivatives = true;
    double fd_step = 1e-3;
};

CapacityCurve monotonicity_scan(std::shared_ptr<const GeneratingFamily> f, const std::vector<double>& heights,
                                const ScanOptions& opt = {});

struct CheckReport {
    bool ok = true;
    double worst = 0;  // largest violation, or largest deviation for tolerance checks
    std::vector<std::string> failures;
};

// Capacity inequalities between consecutive same-sign heights, strict at nonzero values.
CheckReport check_monotonicity(const CapacityCurve& curve);
// |jump| <= l * dt with l the larger crossing gap of the two heights.
CheckReport check_continuity(const CapacityCurve& curve);
CheckReport check_derivatives(const CapacityCurve& curve, double tol);

struct Verdict {
    bool obstructed = false;
    std::vector<std::string> reasons;
    std::string label() const { return obstructed ? "OBSTRUCTED" : "NOT-OBSTRUCTED"; }
};

// bottom below top, same-sign heights.  A missing obstruction never claims existence.
Verdict cobordism_obstruction(const CapacityTable& bottom, const CapacityTable& top, int chi,
                              int writhe_bottom, int writhe_top);

// Figure-eight slice with a negative crossing: the example family with K = r^2 + a,
// sliced at height a.  Lobe area (4/3) r^3.
std::shared_ptr<const GeneratingFamily> fig8_neg_family(double r, double a);

struct Box {
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
    double length() const { return x_hi - x_lo; }
    double width() const { return y_hi - y_lo; }
};

struct SqueezeVerdict {
    bool excluded = false;
    double box_area = 0;  // l * w
    double capacity = 0;  // max |entry|
    std::string reason;
    std::string label() const { return excluded ? "EXCLUDED" : "SQUEEZABLE-NOT-EXCLUDED"; }
};

SqueezeVerdict nonsqueezing_check(std::shared_ptr<const GeneratingFamily> f, double a, const Box& box,
                                  const PipelineOptions& opt = {});

// (x_n, y_n) extents of L above a, traced slice by slice with step dt until the slices vanish.
// The top is the last nonempty height, so the box can only be underestimated.
Box measured_disk_box(std::shared_ptr<const GeneratingFamily> f, double a, double dt = 0.05,
                      int* slices = nullptr);

} // namespace gfcap
