#include "gfcap/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace gfcap {

namespace {

std::string g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Ctx {
    SuiteReport& rep;
    void ok(const std::string& s) { rep.lines.push_back("ok   " + s); }
    void fail(const std::string& s) {
        rep.pass = false;
        rep.lines.push_back("FAIL " + s);
    }
    void check(bool cond, const std::string& s) { cond ? ok(s) : fail(s); }
};

double rel_dev(double a, double b) {
    if (a == b) return 0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// largest relative deviation between two tables, expected = scale * reference
double table_dev(const CapacityTable& got, const CapacityTable& ref, double scale) {
    double worst = 0;
    for (const auto& r : ref.rows) {
        const CapacityRow& q = got.row(r.degree);
        for (int w = 0; w < 4; ++w) worst = std::max(worst, rel_dev(q.entry(w), scale * r.entry(w)));
    }
    return worst;
}

void report_curve(Ctx& c, const std::string& label, const CapacityCurve& curve) {
    for (const auto& w : curve.warnings) c.fail(label + ": " + w);
}

void suite_monotonicity(Ctx& c) {
    const double K = 5;
    for (int sign : {-1, 1}) {
        auto f = example_family(sign);
        const auto hs = sign < 0 ? height_range(1, 3.5, 0.25) : height_range(-3.5, -1, 0.25);
        ScanOptions opt;
        opt.derivatives = false;
        CapacityCurve curve = monotonicity_scan(f, hs, opt);
        const std::string label = sign < 0 ? "F, t in [1, 3.5]" : "G, t in [-3.5, -1]";
        report_curve(c, label, curve);
        CheckReport m = check_monotonicity(curve);
        for (const auto& s : m.failures) c.fail(label + ": " + s);
        int strict = 0;
        for (size_t i = 0; i + 1 < curve.tables.size(); ++i)
            for (const auto& r : curve.tables[i].rows)
                for (int w = 0; w < 4; ++w)
                    if (r.entry(w) != 0 || curve.tables[i + 1].row(r.degree).entry(w) != 0) ++strict;
        c.check(m.ok && strict > 0, label + ": " + std::to_string(curve.heights.size()) + " heights, " +
                                        std::to_string(strict) + " nonzero steps, all strictly monotone");
        // closed form of the lobe area: (4/3)(K - |t|)^{3/2}
        double worst = 0;
        for (size_t i = 0; i < curve.tables.size(); ++i) {
            const double A = 4.0 / 3.0 * std::pow(K - std::abs(curve.heights[i]), 1.5);
            const CapacityRow& r = curve.tables[i].row(0);
            worst = std::max(worst, rel_dev(sign < 0 ? r.c_plus : r.c_minus, -A));
        }
        c.check(worst < 1e-6, label + ": lower entry vs -(4/3)(K-|t|)^(3/2), max rel dev " + g(worst));
    }
}

void suite_continuity(Ctx& c) {
    for (int sign : {-1, 1}) {
        auto f = example_family(sign);
        const auto hs = sign < 0 ? height_range(1, 3.5, 0.25) : height_range(-3.5, -1, 0.25);
        ScanOptions opt;
        opt.derivatives = false;
        CapacityCurve curve = monotonicity_scan(f, hs, opt);
        const std::string label = sign < 0 ? "F" : "G";
        report_curve(c, label, curve);
        CheckReport r = check_continuity(curve);
        for (const auto& s : r.failures) c.fail(label + ": " + s);
        c.check(r.ok, label + ": jumps within l*dt, worst ratio " + g(r.worst));
    }
}

void suite_invariance(Ctx& c) {
    auto f = example_family(-1);
    for (double q : {1.0, -1.0}) {
        auto s = stabilize(f, Mat::Constant(1, 1, q));
        double worst = 0;
        for (double t : {1.0, 2.0, 3.0}) {
            CapacityTable a = analyze_height(f, t).table();
            CapacityTable b = analyze_height(s, t).table();
            worst = std::max(worst, table_dev(b, a, 1.0));
        }
        c.check(worst < 1e-6, std::string("stabilized by ") + (q > 0 ? "+" : "-") +
                                  "e'^2 at t = 1, 2, 3: max rel dev " + g(worst));
    }
}

void suite_nonvanishing(Ctx& c) {
    struct Case {
        std::string name;
        std::shared_ptr<const GeneratingFamily> f;
        double a;
        PipelineOptions opt;
    };
    std::vector<Case> cases;
    auto F = example_family(-1), G = example_family(1);
    for (double t : {1.0, 2.0, 3.0}) cases.push_back({"F", F, t, {}});
    for (double t : {-1.0, -2.0, -3.0}) cases.push_back({"G", G, t, {}});
    cases.push_back({"fig8-neg r=2", fig8_neg_family(2, 1.5), 1.5, {}});
    cases.push_back({"fig8-neg r=3", fig8_neg_family(3, 2.5), 2.5, {}});
    cases.push_back({"F dilated by 2", dilate(F, 2), 2.0, {}});
    cases.push_back({"F stabilized", stabilize(F, Mat::Constant(1, 1, -1.0)), 1.0, {}});
    PipelineOptions n3;
    n3.sweep = true;
    n3.resolution = 16;
    cases.push_back({"F, n = 3 (rank sweep)", example_family(-1, 3), 1.0, n3});
    for (const auto& k : cases) {
        HeightAnalysis h = analyze_height(k.f, k.a, k.opt);
        const std::string label = k.name + " at t = " + g(k.a);
        if (h.diagram.empty()) {
            c.ok(label + ": empty slice, skipped");
            continue;
        }
        const CapacityTable& t = h.table();
        c.check(t.max_abs() > 0, label + " [" + method_name(t.method) + "]: max |entry| " + g(t.max_abs()));
    }
    // past the top of the Lagrangian the slice is empty and the table vanishes
    HeightAnalysis top = analyze_height(F, 6.0);
    c.check(top.diagram.empty() && top.table().all_zero(), "F at t = 6: empty slice, all-zero table");
}

void suite_conformality(Ctx& c) {
    auto f = example_family(-1);
    for (double beta : {0.5, 2.0}) {
        auto fb = dilate(f, beta);
        double worst = 0;
        for (double t : {1.0, 2.0, 3.0}) {
            CapacityTable a = analyze_height(f, t).table();
            CapacityTable b = analyze_height(fb, beta * t).table();
            worst = std::max(worst, table_dev(b, a, beta * beta));
        }
        c.check(worst < 1e-6, "beta = " + g(beta) + ", t = 1, 2, 3: entries scale by beta^2, max rel dev " + g(worst));
    }
}

void suite_nonsqueezing(Ctx& c) {
    auto f = example_family(-1);
    const double a = 1.0, A = 32.0 / 3.0;
    int slices = 0;
    Box box = measured_disk_box(f, a, 0.05, &slices);
    SqueezeVerdict m = nonsqueezing_check(f, a, box);
    c.check(!m.excluded && m.box_area >= A,
            "measured box x_n [" + g(box.x_lo) + ", " + g(box.x_hi) + "] y_n [" + g(box.y_lo) + ", " +
                g(box.y_hi) + "] over " + std::to_string(slices) + " slices: " + m.label() + ", " + m.reason);
    SqueezeVerdict s10 = nonsqueezing_check(f, a, {-2.5, 2.5, 1, 3});
    c.check(s10.excluded, "box 5 x 2: " + s10.label() + ", " + s10.reason);
    SqueezeVerdict s20 = nonsqueezing_check(f, a, {-2.5, 2.5, 1, 5});
    c.check(!s20.excluded, "box 5 x 4: " + s20.label() + ", " + s20.reason);
}

void suite_euler(Ctx& c) {
    SliceDiagram small = extract_slice(fig8_neg_family(2, 1.5), 1.5);
    SliceDiagram large = extract_slice(fig8_neg_family(3, 2.5), 2.5);
    SliceDiagram circle = circle_diagram(1.0);
    c.check(small.writhe == -1 && large.writhe == -1 && circle.writhe == 0,
            "writhes: fig8 r=2 " + std::to_string(small.writhe) + ", fig8 r=3 " + std::to_string(large.writhe) +
                ", circle " + std::to_string(circle.writhe));
    c.check(euler_obstruction(small, large, 0), "annulus between two negative figure-eights: balance holds");
    c.check(euler_obstruction(small, circle, 1), "figure-eight below a circle, chi = 1: balance holds");
    c.check(!euler_obstruction(small, large, 1), "two figure-eights with chi = 1: balance fails as expected");
    c.check(!euler_obstruction(circle, small, 1), "circle below a figure-eight with chi = 1: balance fails");
}

const std::map<std::string, std::function<void(Ctx&)>>& table() {
    static const std::map<std::string, std::function<void(Ctx&)>> t = {
        {"monotonicity", suite_monotonicity}, {"continuity", suite_continuity},
        {"invariance", suite_invariance},     {"nonvanishing", suite_nonvanishing},
        {"conformality", suite_conformality}, {"nonsqueezing", suite_nonsqueezing},
        {"euler", suite_euler},
    };
    return t;
}

} // namespace

std::shared_ptr<const GeneratingFamily> example_family(int sign, int dim) {
    ExampleFamilyParams p;
    p.dim = dim;
    return build_example_family(p, sign);
}

std::vector<double> height_range(double from, double to, double step) {
    std::vector<double> out;
    const long long m = std::llround(std::floor((to - from) / step + 1e-9));
    for (long long i = 0; i <= m; ++i) out.push_back(from + static_cast<double>(i) * step);
    return out;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"monotonicity", "continuity",   "invariance", "nonvanishing",
                                                   "conformality", "nonsqueezing", "euler"};
    return names;
}

SuiteReport run_suite(const std::string& name) {
    auto it = table().find(name);
    if (it == table().end()) throw Error(ErrorKind::Config, "unknown suite '" + name + "'");
    SuiteReport rep;
    rep.name = name;
    Ctx c{rep};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        it->second(c);
    } catch (const Error& e) {
        c.fail(std::string("error: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.lines.push_back("time " + g(s) + " s");
    return rep;
}

} // namespace gfcap
