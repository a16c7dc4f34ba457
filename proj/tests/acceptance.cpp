// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gfcap/capacity.hpp"
#include "gfcap/suites.hpp"

using namespace gfcap;

namespace {

constexpr double K = 5.0;

// Simpson quadrature of one lobe of x^2 + x_n^2 = rho^2, y = -2 x x_n
double lobe_quadrature(double t) {
    const double rho = std::sqrt(K - std::abs(t));
    const int n = 2000;
    const double h = (M_PI / 2) / n;
    auto g = [&](double phi) { return 4 * rho * rho * rho * std::sin(phi) * std::cos(phi) * std::cos(phi); };
    double s = g(0) + g(M_PI / 2);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * g(i * h);
    return s * h / 3;
}

struct Check {
    bool ok = true;
    std::ostringstream why;
    void expect(bool c, const std::string& msg) {
        if (!c && ok) why << msg;
        ok = ok && c;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const CriticalDatum* find(const std::vector<CriticalDatum>& cps, CriticalKind k, HalfSpace h) {
    for (const auto& c : cps)
        if (c.kind == k && c.half_space == h) return &c;
    return nullptr;
}

void example_point(Check& c) {
    auto t0 = std::chrono::steady_clock::now();
    auto f = example_family(-1);
    SliceDiagram d = extract_slice(f, 1.0);
    DifferenceFunction delta(f, 1.0);
    auto cps = critical_points(delta, d);
    const double v = 32.0 / 3;
    const CriticalDatum* qp = find(cps, CriticalKind::Isolated, HalfSpace::Plus);
    const CriticalDatum* qm = find(cps, CriticalKind::Isolated, HalfSpace::Minus);
    const CriticalDatum* bott = find(cps, CriticalKind::Bott, HalfSpace::Zero);
    c.expect(qp && qm && bott, "missing critical point");
    if (!c.ok) return;
    c.expect((qp->point - (Vec(3) << 0, -2, 2).finished()).norm() < 1e-6, "q+ location");
    c.expect((qm->point - (Vec(3) << 0, 2, -2).finished()).norm() < 1e-6, "q- location");
    c.expect(std::abs(qp->value + v) < 1e-6 * v, "q+ value");
    c.expect(std::abs(qm->value - v) < 1e-6 * v, "q- value");
    c.expect(qp->index == 0 && qm->index == 3, "isolated indices");
    c.expect(std::abs(bott->value) < 1e-8 && bott->index == 1, "Bott value or index");
    double radius = 0;
    for (const auto& w : bott->bott_samples) radius = std::max(radius, std::abs(w.head(2).norm() - 2));
    c.expect(!bott->bott_samples.empty() && radius < 1e-6, "Bott circle radius");
    c.expect(verify_bott(delta, *bott).ok, "Bott nondegeneracy");
    const double s = seconds_since(t0);
    c.expect(s < 5, "runtime");
    c.why << "time " << s << " s";
}

void path_integral(Check& c) {
    double worst = 0;
    for (double t : {1.0, 1.75, 2.5, 3.25}) {
        auto f = example_family(-1);
        SliceDiagram d = extract_slice(f, t);
        DifferenceFunction delta(f, t);
        auto cps = critical_points(delta, d);
        int n = 0;
        for (const auto& q : cps) {
            if (q.kind != CriticalKind::Isolated) continue;
            ++n;
            const double v = critical_value_via_path(crossing_path(f, d, q));
            worst = std::max(worst, std::abs(v - q.value) / std::abs(q.value));
        }
        c.expect(n == 2, "expected two isolated points");
    }
    c.expect(worst < 1e-5, "relative error");
    c.why << "max rel err " << worst;
}

void maslov(Check& c) {
    struct Case {
        std::shared_ptr<const GeneratingFamily> f;
        double a;
    };
    std::vector<Case> corpus;
    // below |a| ~ 0.6 the tails of the family enter the slice; those heights are not figure eights
    for (int sign : {-1, 1})
        for (double t : {0.75, 1.0, 1.75, 2.5, 3.25, 4.5}) corpus.push_back({example_family(sign), -sign * t});
    auto F = example_family(-1);
    for (double q : {1.0, -1.0}) corpus.push_back({stabilize(F, Mat::Constant(1, 1, q)), 1.0});
    corpus.push_back({stabilize(F, -Mat::Identity(2, 2)), 1.0});
    for (double beta : {0.5, 2.0}) corpus.push_back({dilate(F, beta), beta});
    for (double r : {2.0, 3.0})
        for (double a : {1.5, 2.5}) corpus.push_back({fig8_neg_family(r, a), a});
    int compared = 0;
    for (const auto& cs : corpus) {
        SliceDiagram d = extract_slice(cs.f, cs.a);
        DifferenceFunction delta(cs.f, cs.a);
        for (const auto& q : critical_points(delta, d)) {
            if (q.kind != CriticalKind::Isolated) continue;
            const int h = morse_index_hessian(delta, q);
            CrossingPath path = crossing_path(cs.f, d, q);
            const int m = morse_index_maslov(path, cs.f->fiber_dim);
            c.expect(h == m, "index mismatch");
            ++compared;
        }
    }
    c.expect(compared == 2 * static_cast<int>(corpus.size()), "missing crossings");
    c.why << compared << " critical points over " << corpus.size() << " slices";
}

void capacity_table(Check& c) {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0, tol = 0;
    for (int sign : {-1, 1}) {
        PipelineOptions opt;
        opt.sweep = true;
        opt.resolution = 64;
        const double a = sign < 0 ? 1.0 : -1.0;
        HeightAnalysis h = analyze_height(example_family(sign), a, opt);
        c.expect(h.fast && h.swept, "missing table");
        if (!c.ok) return;
        const double A = lobe_quadrature(a);
        const double want0[4] = {sign < 0 ? -A : 0, sign < 0 ? 0 : -A, 0, 0};
        const double want1[4] = {0, 0, sign < 0 ? 0 : A, sign < 0 ? A : 0};
        double var = 0;
        for (double v : h.variation) var = std::max(var, v);
        tol = std::max(tol, var);
        for (int w = 0; w < 4; ++w) {
            const double e0 = want0[w], e1 = want1[w];
            c.expect(std::abs(h.fast->row(0).entry(w) - e0) < 1e-6 * A, "fast degree 0");
            c.expect(std::abs(h.fast->row(1).entry(w) - e1) < 1e-6 * A, "fast degree 1");
            for (auto [deg, e] : {std::pair{0, e0}, std::pair{1, e1}}) {
                const double got = h.swept->row(deg).entry(w);
                if (e == 0) {
                    c.expect(got == 0, "sweep nonzero where the rule gives 0");
                } else {
                    worst = std::max(worst, std::abs(got - e));
                    c.expect(std::abs(got - e) <= var, "sweep outside cell variation");
                }
            }
        }
    }
    const double s = seconds_since(t0);
    c.expect(s < 120, "runtime");
    c.why << "sweep err " << worst << " vs variation " << tol << ", time " << s << " s";
}

void suites(Check& c) {
    for (const char* name : {"monotonicity", "continuity", "invariance", "nonvanishing", "conformality"}) {
        auto t0 = std::chrono::steady_clock::now();
        SuiteReport r = run_suite(name);
        const double s = seconds_since(t0);
        c.expect(r.pass, std::string(name) + " failed");
        c.expect(s < 120, std::string(name) + " too slow");
        for (const auto& l : r.lines)
            if (l.rfind("FAIL", 0) == 0) c.why << "[" << l << "] ";
        c.why << name << " " << s << " s; ";
    }
}

void derivative_law(Check& c) {
    CapacityCurve curve = monotonicity_scan(example_family(-1), height_range(1.0, 3.5, 0.25));
    CheckReport r = check_derivatives(curve, 1e-3);
    double worst = 0;
    for (const auto& d : curve.derivatives) worst = std::max(worst, std::abs(d.numeric - d.predicted));
    c.expect(r.ok, "check_derivatives");
    c.expect(!curve.derivatives.empty(), "no samples");
    c.expect(worst < 1e-3, "mismatch");
    c.why << curve.derivatives.size() << " samples, max err " << worst;
}

void cobordism(Check& c) {
    auto analyze = [](double r, double a) { return analyze_height(fig8_neg_family(r, a), a); };
    HeightAnalysis b2 = analyze(2, 1.5), b3 = analyze(3, 1.5), t2 = analyze(2, 2.5), t3 = analyze(3, 2.5);
    auto verdict = [](const HeightAnalysis& lo, const HeightAnalysis& hi) {
        return cobordism_obstruction(lo.table(), hi.table(), 0, lo.diagram.writhe, hi.diagram.writhe).label();
    };
    const std::string v1 = verdict(b2, t3), v2 = verdict(b2, t2), v3 = verdict(b3, t3), v4 = verdict(b3, t2);
    c.expect(b2.diagram.writhe == -1 && t3.diagram.writhe == -1, "crossings not negative");
    c.expect(v1 == "OBSTRUCTED", "r=2 -> R=3");
    c.expect(v2 == "OBSTRUCTED" && v3 == "OBSTRUCTED", "r=R");
    c.expect(v4 == "NOT-OBSTRUCTED", "r=3 -> r=2");
    c.why << "2->3 " << v1 << ", 2->2 " << v2 << ", 3->3 " << v3 << ", 3->2 " << v4;
}

void nonsqueezing(Check& c) {
    auto f = example_family(-1);
    const double A = 32.0 / 3;
    Box box = measured_disk_box(f, 1.0, 0.05);
    const double lw = box.length() * box.width();
    c.expect(lw >= A, "measured box smaller than A");
    SqueezeVerdict ten = nonsqueezing_check(f, 1.0, {-2.5, 2.5, 1, 3});
    c.expect(std::abs(ten.box_area - 10) < 1e-12, "synthetic box area");
    c.expect(ten.label() == "EXCLUDED", "box of area 10 not excluded");
    c.why << "measured l*w " << lw << ", synthetic " << ten.label();
}

void homology(Check& c) {
    const double A = 32.0 / 3;
    for (int sign : {-1, 1})
        for (int res : {32, 64}) {
            const double a = sign < 0 ? 1.0 : -1.0;
            auto f = example_family(sign);
            SliceDiagram d = extract_slice(f, a);
            DifferenceFunction delta(f, a);
            auto cps = critical_points(delta, d);
            CubicalField field = build_field(delta, res, &d);
            const double eta = default_eta(field, &cps);
            RankSweep sw = rank_sweep(field, eta, default_levels(field, eta), &cps);
            double var = 0;
            for (const auto& q : cps)
                if (q.kind == CriticalKind::Isolated) var = std::max(var, field.cell_variation(q.point));
            for (const auto& row : sw.rows) {
                if (row.pair == PairKind::Trivial && row.region == Region::Full)
                    c.expect(row.rank == 0, "trivial pair not zero");
                if (row.pair != PairKind::Trivial && row.region == Region::Full)
                    c.expect(row.rank == sw.rank(row.pair, Region::Plus, row.level, row.degree) +
                                             sw.rank(row.pair, Region::Minus, row.level, row.degree),
                             "additivity");
            }
            int events = 0;
            for (Region r : {Region::Full, Region::Plus, Region::Minus})
                for (int k = 0; k <= field.dim; ++k) {
                    for (double e : sw.events(PairKind::Lower, r, k, -sw.theta, -sw.eta)) {
                        c.expect(std::abs(e + A) <= var, "lower event away from -A");
                        ++events;
                    }
                    for (double e : sw.events(PairKind::Upper, r, k, sw.eta, sw.theta)) {
                        c.expect(std::abs(e - A) <= var, "upper event away from A");
                        ++events;
                    }
                }
            c.expect(events > 0, "no rank changes");
            c.why << "sign " << sign << " res " << res << ": " << events << " events, variation " << var << "; ";
        }
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
        {"example point reproduction", example_point},
        {"path integral cross-check", path_integral},
        {"Maslov index cross-check", maslov},
        {"capacity table, rule and sweep", capacity_table},
        {"property suites", suites},
        {"derivative law", derivative_law},
        {"cobordism checker", cobordism},
        {"non-squeezing", nonsqueezing},
        {"homology sanity", homology},
    };
    int failed = 0, i = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.why << "threw: " << e.what();
        }
        failed += !c.ok;
        std::printf("%s %d %s: %s\n", c.ok ? "PASS" : "FAIL", ++i, name, c.why.str().c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
