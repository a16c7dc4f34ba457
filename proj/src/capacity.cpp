#include "gfcap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gfcap {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string num(double v) { return fmt("%.10g", v); }

bool skippable(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::NonTransverseSlice:
    case ErrorKind::DegenerateCrossing:
    case ErrorKind::MissingCriticalPoint:
    case ErrorKind::NonGenericFamily:
        return true;
    default:
        return false;
    }
}

} // namespace

const char* method_name(CapacityMethod m) {
    return m == CapacityMethod::SingleCrossingRule ? "single_crossing_rule" : "rank_sweep";
}

const char* entry_name(int which) {
    static const char* names[] = {"c_plus", "c_minus", "C_plus", "C_minus"};
    return which >= 0 && which < 4 ? names[which] : "?";
}

double CapacityRow::entry(int which) const {
    switch (which) {
    case 0: return c_plus;
    case 1: return c_minus;
    case 2: return C_plus;
    default: return C_minus;
    }
}

double& CapacityRow::entry(int which) {
    switch (which) {
    case 0: return c_plus;
    case 1: return c_minus;
    case 2: return C_plus;
    default: return C_minus;
    }
}

const CapacityRow& CapacityTable::row(int degree) const {
    for (const auto& r : rows)
        if (r.degree == degree) return r;
    throw Error(ErrorKind::InvalidParams, "no capacity row for degree " + std::to_string(degree));
}

bool CapacityTable::all_zero() const { return max_abs() == 0; }

double CapacityTable::max_abs() const {
    double m = 0;
    for (const auto& r : rows)
        for (int w = 0; w < 4; ++w) m = std::max(m, std::abs(r.entry(w)));
    return m;
}

CapacityTable zero_table(double height, int n, CapacityMethod m) {
    CapacityTable t;
    t.height = height;
    t.method = m;
    for (int k = 0; k < n; ++k) t.rows.push_back({k});
    return t;
}

CapacityTable capacities_single_crossing(const SliceDiagram& d, const std::vector<CriticalDatum>& morse) {
    if (d.n != 2)
        throw Error(ErrorKind::RuleNotApplicable, "crossing signs are only defined for n = 2");
    if (d.double_points.size() != 1)
        throw Error(ErrorKind::RuleNotApplicable,
                    "single-crossing rule needs exactly one double point, found " +
                        std::to_string(d.double_points.size()));
    const int sign = d.double_points[0].sign;
    if (sign == 0) throw Error(ErrorKind::RuleNotApplicable, "unsigned crossing");
    if (d.lobe_areas.empty()) throw Error(ErrorKind::RuleNotApplicable, "no closed lobe at the crossing");
    double A = 0;
    for (double s : d.lobe_areas) A += std::abs(s);
    A /= static_cast<double>(d.lobe_areas.size());

    CapacityTable t = zero_table(d.height, 2, CapacityMethod::SingleCrossingRule);
    if (sign < 0) {
        t.rows[0].c_plus = -A;
        t.rows[1].C_minus = A;
    } else {
        t.rows[0].c_minus = -A;
        t.rows[1].C_plus = A;
    }
    t.provenance.push_back(std::string("crossing 0 sign ") + (sign < 0 ? "-1" : "+1"));
    t.provenance.push_back("lobe area " + num(A) + " from quadrature over " +
                           std::to_string(d.lobe_areas.size()) + " lobes");
    for (size_t i = 0; i < morse.size(); ++i) {
        const auto& c = morse[i];
        if (c.kind != CriticalKind::Isolated) continue;
        t.provenance.push_back("critical point " + std::to_string(i) + " " + half_space_name(c.half_space) +
                               " value " + num(c.value) + " index " + std::to_string(c.index));
    }
    return t;
}

CapacityTable capacities_from_sweep(const RankSweep& sweep, int n, int N, const std::vector<CriticalDatum>* morse) {
    int isolated = 0;
    if (morse)
        for (const auto& c : *morse) {
            if (c.kind != CriticalKind::Isolated) continue;
            ++isolated;
            if (std::abs(c.value) >= sweep.theta)
                throw Error(ErrorKind::InsufficientSweep, "critical value " + num(c.value) +
                                                              " lies outside the swept window +-" +
                                                              num(sweep.theta));
        }
    for (int k = 0; k <= sweep.domain_dim; ++k)
        if (sweep.rank(PairKind::Trivial, Region::Full, sweep.theta, k) != 0)
            throw Error(ErrorKind::InsufficientSweep,
                        "rank of the window pair is nonzero in degree " + std::to_string(k) +
                            "; the window misses critical values");

    CapacityTable t = zero_table(sweep.height, n, CapacityMethod::RankSweep);
    const double th = sweep.theta, eta = sweep.eta;
    for (int k = 0; k < n; ++k) {
        CapacityRow& row = t.rows[k];
        for (int side = 0; side < 2; ++side) {
            const Region reg = side == 0 ? Region::Plus : Region::Minus;
            const char* rn = side == 0 ? "P+" : "P-";
            // lower: the largest level below which the rank in degree k+N changes
            std::vector<double> ev = sweep.events(PairKind::Lower, reg, k + N, -th, -eta);
            if (!ev.empty()) {
                row.entry(side) = ev.back();
                t.provenance.push_back(std::string(rn) + " lower degree " + std::to_string(k + N) +
                                       " event at " + num(ev.back()));
            }
            if (ev.size() > 1) row.ambiguous = true;
            // upper: the smallest level at which the rank in degree k+N+2 becomes nonzero
            ev = sweep.events(PairKind::Upper, reg, k + N + 2, eta, th);
            for (double v : ev)
                if (sweep.rank(PairKind::Upper, reg, v, k + N + 2) > 0) {
                    row.entry(2 + side) = v;
                    t.provenance.push_back(std::string(rn) + " upper degree " + std::to_string(k + N + 2) +
                                           " event at " + num(v));
                    break;
                }
            if (ev.size() > 1) row.ambiguous = true;
        }
        if (isolated > 2) {
            bool nonzero = false;
            for (int w = 0; w < 4; ++w) nonzero = nonzero || row.entry(w) != 0;
            if (nonzero) row.ambiguous = true;
        }
    }
    return t;
}

const CapacityTable& HeightAnalysis::table() const {
    if (fast) return *fast;
    if (swept) return *swept;
    throw Error(ErrorKind::RuleNotApplicable, "no capacity table at height " + num(height));
}

HeightAnalysis analyze_height(std::shared_ptr<const GeneratingFamily> f, double a, const PipelineOptions& opt) {
    HeightAnalysis h;
    h.height = a;
    h.diagram = extract_slice(f, a, opt.grid);
    DifferenceFunction delta(f, a);
    h.critical = critical_points(delta, h.diagram);
    const int n = f->base_dim, N = f->fiber_dim;

    if (opt.fast) {
        if (h.diagram.empty()) {
            h.fast = zero_table(a, n, CapacityMethod::SingleCrossingRule);
            h.fast->provenance.push_back("empty slice");
            h.notes.push_back("empty slice");
        } else {
            try {
                h.fast = capacities_single_crossing(h.diagram, h.critical);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::RuleNotApplicable) throw;
                h.notes.push_back(e.what());
            }
        }
    }
    if (opt.sweep || !h.fast) {
        if (N != 0 || delta.dim() > 4) {
            h.notes.push_back("rank sweep unsupported for domain dimension " + std::to_string(delta.dim()));
        } else {
            CubicalField field = build_field(delta, opt.resolution, &h.diagram);
            double eta = default_eta(field, &h.critical);
            h.sweep = rank_sweep(field, eta, default_levels(field, eta, opt.levels_per_side), &h.critical);
            h.swept = capacities_from_sweep(*h.sweep, n, N, &h.critical);
            double tol = 0;
            for (const auto& c : h.critical) {
                double v = c.kind == CriticalKind::Isolated ? field.cell_variation(c.point) : 0.0;
                h.variation.push_back(v);
                tol = std::max(tol, v);
            }
            h.swept->tolerance = tol;
        }
    }
    if (!h.fast && !h.swept)
        throw Error(ErrorKind::RuleNotApplicable, "no capacity method applies at height " + num(a));
    return h;
}

double crossing_gap(const DifferenceFunction& delta, const std::vector<CriticalDatum>& morse) {
    double g = 0;
    for (const auto& c : morse)
        if (c.kind == CriticalKind::Isolated)
            g = std::max(g, std::abs(delta.xn(c.point) - delta.xn_tilde(c.point)));
    return g;
}

CapacityCurve monotonicity_scan(std::shared_ptr<const GeneratingFamily> f, const std::vector<double>& heights,
                                const ScanOptions& opt) {
    CapacityCurve curve;
    std::vector<double> hs = heights;
    std::sort(hs.begin(), hs.end());
    PipelineOptions fast_only = opt.pipeline;
    fast_only.fast = true;
    fast_only.sweep = false;
    for (double t : hs) {
        if (t == 0) {
            curve.warnings.push_back("height 0 skipped: not generic");
            continue;
        }
        HeightAnalysis h;
        try {
            h = analyze_height(f, t, opt.pipeline);
        } catch (const Error& e) {
            if (!skippable(e)) throw;
            curve.warnings.push_back("height " + num(t) + " skipped: " + e.what());
            continue;
        }
        const CapacityTable& tab = h.table();
        curve.heights.push_back(t);
        curve.tables.push_back(tab);
        DifferenceFunction delta(f, t);
        curve.gaps.push_back(crossing_gap(delta, h.critical));

        if (!opt.derivatives || !h.fast || h.fast->all_zero()) continue;
        try {
            const double dt = opt.fd_step;
            HeightAnalysis lo = analyze_height(f, t - dt, fast_only);
            HeightAnalysis hi = analyze_height(f, t + dt, fast_only);
            if (!lo.fast || !hi.fast) continue;
            for (const auto& row : h.fast->rows)
                for (int w = 0; w < 4; ++w) {
                    double v = row.entry(w);
                    if (v == 0) continue;
                    const HalfSpace want = (w % 2 == 0) ? HalfSpace::Plus : HalfSpace::Minus;
                    const CriticalDatum* best = nullptr;
                    for (const auto& c : h.critical)
                        if (c.kind == CriticalKind::Isolated && c.half_space == want &&
                            (!best || std::abs(c.value - v) < std::abs(best->value - v)))
                            best = &c;
                    if (!best) continue;
                    DerivativeSample s;
                    s.height = t;
                    s.degree = row.degree;
                    s.which = w;
                    s.numeric = (hi.fast->row(row.degree).entry(w) - lo.fast->row(row.degree).entry(w)) / (2 * dt);
                    s.predicted = delta.xn_tilde(best->point) - delta.xn(best->point);
                    curve.derivatives.push_back(s);
                }
        } catch (const Error& e) {
            if (!skippable(e)) throw;
            curve.warnings.push_back("derivative at " + num(t) + " skipped: " + e.what());
        }
    }
    return curve;
}

namespace {

// +1: entry must not decrease with the height, -1: must not increase
int direction(int which) { return which == 0 || which == 2 ? 1 : -1; }

} // namespace

CheckReport check_monotonicity(const CapacityCurve& curve) {
    CheckReport r;
    for (size_t i = 0; i + 1 < curve.heights.size(); ++i) {
        const double t1 = curve.heights[i], t2 = curve.heights[i + 1];
        if (t1 * t2 <= 0) continue;
        const CapacityTable &A = curve.tables[i], &B = curve.tables[i + 1];
        const double slack = A.tolerance + B.tolerance;
        for (const auto& ra : A.rows) {
            const CapacityRow* rb = nullptr;
            for (const auto& x : B.rows)
                if (x.degree == ra.degree) rb = &x;
            if (!rb) continue;
            for (int w = 0; w < 4; ++w) {
                const double v1 = ra.entry(w), v2 = rb->entry(w);
                const double d = direction(w) * (v2 - v1);
                const double tiny = 1e-12 * (1 + std::abs(v1) + std::abs(v2));
                const bool nonzero = v1 != 0 || v2 != 0;
                bool bad = nonzero ? d <= tiny - slack : d < -tiny - slack;
                if (bad) {
                    r.ok = false;
                    r.worst = std::max(r.worst, -d);
                    r.failures.push_back(std::string(entry_name(w)) + " degree " + std::to_string(ra.degree) +
                                         " from t=" + num(t1) + " to t=" + num(t2) + ": " + num(v1) +
                                         " -> " + num(v2));
                }
            }
        }
    }
    return r;
}

CheckReport check_continuity(const CapacityCurve& curve) {
    CheckReport r;
    for (size_t i = 0; i + 1 < curve.heights.size(); ++i) {
        const double dt = curve.heights[i + 1] - curve.heights[i];
        const double l = std::max(curve.gaps[i], curve.gaps[i + 1]);
        const CapacityTable &A = curve.tables[i], &B = curve.tables[i + 1];
        for (const auto& ra : A.rows) {
            const CapacityRow* rb = nullptr;
            for (const auto& x : B.rows)
                if (x.degree == ra.degree) rb = &x;
            if (!rb) continue;
            for (int w = 0; w < 4; ++w) {
                const double jump = std::abs(rb->entry(w) - ra.entry(w));
                const double bound = l * dt + A.tolerance + B.tolerance + 1e-9 * (1 + jump);
                r.worst = std::max(r.worst, bound > 0 ? jump / bound : 0.0);
                if (jump > bound) {
                    r.ok = false;
                    r.failures.push_back(std::string(entry_name(w)) + " degree " + std::to_string(ra.degree) +
                                         " jumps by " + num(jump) + " > " + num(l) + " * " + num(dt));
                }
            }
        }
    }
    return r;
}

CheckReport check_derivatives(const CapacityCurve& curve, double tol) {
    CheckReport r;
    for (const auto& s : curve.derivatives) {
        const double e = std::abs(s.numeric - s.predicted);
        r.worst = std::max(r.worst, e);
        if (e > tol) {
            r.ok = false;
            r.failures.push_back(std::string(entry_name(s.which)) + " at t=" + num(s.height) + ": d/dt " +
                                 num(s.numeric) + " vs x~_n - x_n " + num(s.predicted));
        }
    }
    if (curve.derivatives.empty()) {
        r.ok = false;
        r.failures.push_back("no derivative samples");
    }
    return r;
}

Verdict cobordism_obstruction(const CapacityTable& bottom, const CapacityTable& top, int chi, int writhe_bottom,
                              int writhe_top) {
    if (bottom.height * top.height <= 0)
        throw Error(ErrorKind::InvalidParams, "cobordism ends must sit at nonzero heights of one sign");
    if (!(bottom.height < top.height))
        throw Error(ErrorKind::InvalidParams, "bottom height must lie below the top height");
    Verdict v;
    if (!euler_obstruction(writhe_bottom, writhe_top, chi)) {
        v.obstructed = true;
        v.reasons.push_back("writhe balance fails: " + std::to_string(writhe_top) + " - (" +
                            std::to_string(writhe_bottom) + ") != chi = " + std::to_string(chi));
    }
    const double slack = bottom.tolerance + top.tolerance;
    for (const auto& rb : bottom.rows) {
        const CapacityRow* rt = nullptr;
        for (const auto& x : top.rows)
            if (x.degree == rb.degree) rt = &x;
        if (!rt) continue;
        for (int w = 0; w < 4; ++w) {
            const double lo = rb.entry(w), hi = rt->entry(w);
            if (lo == 0 && hi == 0) continue;
            const double d = direction(w) * (hi - lo);
            const double tol = 1e-6 * (1 + std::abs(lo) + std::abs(hi)) + slack;
            const std::string what = std::string(entry_name(w)) + " degree " + std::to_string(rb.degree);
            if (std::abs(d) <= tol) {
                v.obstructed = true;
                v.reasons.push_back(what + " equal and nonzero at both ends (" + num(lo) +
                                    "); equality needs both to vanish");
            } else if (d < 0) {
                v.obstructed = true;
                v.reasons.push_back(what + (direction(w) > 0 ? " must not decrease" : " must not increase") +
                                    " upward: bottom " + num(lo) + ", top " + num(hi));
            }
        }
    }
    if (!v.obstructed) v.reasons.push_back("no obstruction found");
    return v;
}

std::shared_ptr<const GeneratingFamily> fig8_neg_family(double r, double a) {
    if (!(r > 0) || !(a > 0)) throw Error(ErrorKind::InvalidParams, "fig8-neg needs r > 0 and a > 0");
    ExampleFamilyParams p;
    p.K = r * r + a;
    p.beta = std::min(1.0, 0.5 * a);
    p.eps = std::min(0.25, 0.5 * p.beta);
    p.tau = a + 0.5 * r * r;
    return build_example_family(p, -1);
}

SqueezeVerdict nonsqueezing_check(std::shared_ptr<const GeneratingFamily> f, double a, const Box& box,
                                  const PipelineOptions& opt) {
    if (!(box.length() > 0) || !(box.width() > 0))
        throw Error(ErrorKind::InvalidBox, "box intervals must have positive length");
    HeightAnalysis h = analyze_height(f, a, opt);
    const int n = f->base_dim;
    if (a < box.y_lo || a > box.y_hi)
        throw Error(ErrorKind::InvalidBox, "height " + num(a) + " outside the y_n interval");
    auto check = [&](const Vec& z) {
        double xn = z(n - 1);
        if (xn < box.x_lo || xn > box.x_hi)
            throw Error(ErrorKind::InvalidBox, "slice point with x_n = " + num(xn) + " lies outside the box");
    };
    for (const auto& c : h.diagram.components)
        for (const auto& v : c.verts) check(v.p.z);
    for (const auto& p : h.diagram.surface) check(p.z);

    SqueezeVerdict s;
    s.box_area = box.length() * box.width();
    s.capacity = h.table().max_abs();
    s.excluded = s.box_area < s.capacity;
    s.reason = "l*w = " + num(s.box_area) + (s.excluded ? " < " : " >= ") + "max |capacity| = " + num(s.capacity);
    return s;
}

Box measured_disk_box(std::shared_ptr<const GeneratingFamily> f, double a, double dt, int* slices) {
    if (!(dt > 0)) throw Error(ErrorKind::InvalidParams, "dt must be positive");
    const int n = f->base_dim;
    Box b{INFINITY, -INFINITY, a, a};
    int count = 0;
    for (int i = 0; i < 100000; ++i) {
        const double t = a + i * dt;
        SliceDiagram d;
        try {
            d = extract_slice(f, t);
        } catch (const Error& e) {
            if (!skippable(e)) throw;
            break;
        }
        if (d.empty()) break;
        auto grow = [&](const Vec& z) {
            b.x_lo = std::min(b.x_lo, z(n - 1));
            b.x_hi = std::max(b.x_hi, z(n - 1));
        };
        for (const auto& c : d.components)
            for (const auto& v : c.verts) grow(v.p.z);
        for (const auto& p : d.surface) grow(p.z);
        b.y_hi = t;
        ++count;
    }
    if (count == 0) throw Error(ErrorKind::InvalidBox, "no slice at height " + num(a));
    if (slices) *slices = count;
    return b;
}

} // namespace gfcap
