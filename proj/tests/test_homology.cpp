#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "gfcap/homology.hpp"
#include "prop.hpp"

using namespace gfcap;

namespace {

// Synthetic field with random vertex values: nx nodes on one x axis (0 for none)
// and P nodes on the shared plane axis.
CubicalField random_field(int nx, int P, Rng& rng) {
    CubicalField f;
    f.dim = nx > 0 ? 3 : 2;
    std::vector<double> plane(P);
    for (int i = 0; i < P; ++i) plane[i] = i;
    if (nx > 0) {
        std::vector<double> x(nx);
        for (int i = 0; i < nx; ++i) x[i] = i;
        f.axes.push_back(x);
    }
    f.axes.push_back(plane);
    f.axes.push_back(plane);
    f.values.resize(f.vertex_count());
    // few distinct values, so ties between cells are common
    for (auto& v : f.values) v = rng.below(9) - 4;
    f.min_value = *std::min_element(f.values.begin(), f.values.end());
    f.max_value = *std::max_element(f.values.begin(), f.values.end());
    return f;
}

// Euler characteristic of {value <= level} restricted to a region, by listing cells.
// Plane cells: vertex, the three edge directions and the two triangles cut along
// the diagonal direction; x cells: vertices and edges.
long long chi_by_cells(const CubicalField& f, Region region, double level) {
    using Shape = std::vector<std::array<int, 2>>;
    const std::vector<Shape> plane_cells = {
        {{0, 0}}, {{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {{0, 0}, {1, 1}},
        {{0, 0}, {1, 0}, {1, 1}}, {{0, 0}, {0, 1}, {1, 1}},
    };
    const int P = f.nodes(f.dim - 1);
    const int nx = f.dim == 3 ? f.nodes(0) : 1;
    long long chi = 0;
    for (int xi = 0; xi < nx; ++xi)
        for (int xe = 0; xe < (f.dim == 3 ? 2 : 1); ++xe) {
            if (xi + xe >= nx) continue;
            for (int j = 0; j < P; ++j)
                for (int k = 0; k < P; ++k)
                    for (const auto& shape : plane_cells) {
                        bool ok = true, plus = true, minus = true;
                        double v = -INFINITY;
                        for (const auto& o : shape) {
                            const int jj = j + o[0], kk = k + o[1];
                            if (jj >= P || kk >= P) ok = false;
                            if (jj > kk) plus = false;
                            if (jj < kk) minus = false;
                            if (!ok) break;
                            for (int dx = 0; dx <= xe; ++dx) {
                                std::vector<int> idx;
                                if (f.dim == 3) idx.push_back(xi + dx);
                                idx.push_back(jj);
                                idx.push_back(kk);
                                v = std::max(v, f.vertex_value(idx));
                            }
                        }
                        if (!ok || v > level) continue;
                        if (region == Region::Plus && !plus) continue;
                        if (region == Region::Minus && !minus) continue;
                        const int d = static_cast<int>(shape.size()) - 1 + xe;
                        chi += d % 2 ? -1 : 1;
                    }
        }
    return chi;
}

long long chi_by_pairs(const PersistenceDiagram& pd, double level) {
    long long chi = 0;
    for (const auto& p : pd.pairs)
        if (p.birth <= level && level < p.death) chi += p.dim % 2 ? -1 : 1;
    return chi;
}

std::shared_ptr<const GeneratingFamily> example(int sign) { return build_example_family({}, sign); }

struct Sweep {
    CubicalField field;
    std::vector<CriticalDatum> cps;
    RankSweep sweep;
};

Sweep sweep_at(std::shared_ptr<const GeneratingFamily> f, double a, int res) {
    DifferenceFunction delta(f, a);
    SliceDiagram d = extract_slice(f, a);
    Sweep s{build_field(delta, res, &d), critical_points(delta, d), {}};
    const double eta = default_eta(s.field, &s.cps);
    s.sweep = rank_sweep(s.field, eta, default_levels(s.field, eta, 12), &s.cps);
    return s;
}

} // namespace

TEST_CASE("relative ranks from a hand-made diagram") {
    PersistenceDiagram pd;
    pd.pairs = {{0, -5, INFINITY}, {0, -3, 1}, {1, 2, 4}};
    CHECK(relative_rank(pd, -6, -4, 0) == 1);
    CHECK(relative_rank(pd, -4, -2, 0) == 1);
    CHECK(relative_rank(pd, -6, -2, 0) == 2);
    CHECK(relative_rank(pd, -2, 0, 0) == 0);
    // the class born at -3 dies at 1: rank in degree 1 of (X_1, X_-2)
    CHECK(relative_rank(pd, -2, 1, 1) == 1);
    CHECK(relative_rank(pd, 1.5, 3, 1) == 1);
    CHECK(relative_rank(pd, 3, 5, 2) == 1);
    CHECK(relative_rank(pd, -10, 10, 0) == 1);
}

TEST_CASE("Euler characteristic of sublevel sets matches a direct cell count") {
    Rng rng(7);
    for (int trial = 0; trial < 12; ++trial) {
        const int nx = trial % 3 == 0 ? 0 : 2 + rng.below(4);
        const int P = 3 + rng.below(6);
        CubicalField f = random_field(nx, P, rng);
        for (Region r : {Region::Full, Region::Plus, Region::Minus}) {
            PersistenceDiagram pd = persistence(f, r);
            for (double level = -4.5; level <= 4.5; level += 1.0)
                CHECK(chi_by_pairs(pd, level) == chi_by_cells(f, r, level));
            // every region is contractible
            int essential0 = 0, essential_other = 0;
            for (const auto& p : pd.pairs) {
                if (!p.essential()) continue;
                (p.dim == 0 ? essential0 : essential_other) += 1;
            }
            CHECK(essential0 == 1);
            CHECK(essential_other == 0);
        }
    }
}

TEST_CASE("field construction") {
    auto f = example(-1);
    DifferenceFunction delta(f, 1.0);
    SliceDiagram d = extract_slice(f, 1.0);
    auto cps = critical_points(delta, d);
    CubicalField fld = build_field(delta, 16, &d);
    CHECK(fld.dim == 3);
    CHECK(fld.axes[1] == fld.axes[2]);
    CHECK(fld.vertex_count() == static_cast<long long>(fld.values.size()));
    CHECK(fld.theta > 32.0 / 3);
    // the box reaches far enough that its rim lies beyond both sweep ends
    CHECK(fld.max_value > fld.theta);
    CHECK(fld.min_value < -fld.theta);
    for (int x = 0; x < fld.nodes(0); ++x)
        for (int j = 0; j < fld.nodes(1); ++j) CHECK(fld.vertex_value({x, j, j}) == 0.0);
    // critical points sit at least two nodes inside the box
    for (const auto& c : cps) {
        std::vector<Vec> pts = c.kind == CriticalKind::Isolated ? std::vector<Vec>{c.point} : c.bott_samples;
        for (const auto& w : pts)
            for (int i = 0; i < 3; ++i) {
                const auto& ax = fld.axes[i];
                auto it = std::lower_bound(ax.begin(), ax.end(), w(i));
                const long long below = it - ax.begin(), above = ax.end() - it;
                CHECK(below >= 2);
                CHECK(above >= 2);
            }
    }
    CHECK_THROWS_AS(build_field(delta, 8, &d), Error);
    DifferenceFunction stab(stabilize(f, Mat::Constant(1, 1, 1.0)), 1.0);
    try {
        build_field(stab, 16);
        FAIL("accepted a five-dimensional domain");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedDimension);
    }
}

TEST_CASE("rank sweep at a = 1") {
    for (int res : {16, 32}) {
        Sweep s = sweep_at(example(-1), 1.0, res);
        const RankSweep& sw = s.sweep;
        double var = 0;
        for (const auto& c : s.cps)
            if (c.kind == CriticalKind::Isolated) var = std::max(var, s.field.cell_variation(c.point));
        CAPTURE(res);
        CAPTURE(var);
        for (const auto& row : sw.rows) {
            if (row.pair == PairKind::Trivial) {
                // the unsplit pair is trivial; P+ alone keeps its degree-0 class since
                // Delta >= 0 there far from the diagonal
                if (row.region == Region::Full) CHECK(row.rank == 0);
                if (row.region == Region::Plus) CHECK(row.rank == (row.degree == 0 ? 1 : 0));
                continue;
            }
            if (row.region != Region::Full) continue;
            // splitting additivity
            CHECK(row.rank == sw.rank(row.pair, Region::Plus, row.level, row.degree) +
                                  sw.rank(row.pair, Region::Minus, row.level, row.degree));
        }
        const double A = 32.0 / 3;
        // lower P+ pair: the index-0 point at -A is the only change, in absolute degree 0
        CHECK(sw.rank(PairKind::Lower, Region::Plus, -A - var - 0.1, 0) == 1);
        CHECK(sw.rank(PairKind::Lower, Region::Plus, -A + var + 0.1, 0) == 0);
        for (int k = 0; k <= 3; ++k) {
            for (double e : sw.events(PairKind::Lower, Region::Plus, k, -sw.theta, -sw.eta))
                CHECK(std::abs(e + A) <= var);
            for (double e : sw.events(PairKind::Lower, Region::Minus, k, -sw.theta, -sw.eta)) CHECK(false);
            for (double e : sw.events(PairKind::Upper, Region::Minus, k, sw.eta, sw.theta))
                CHECK(std::abs(e - A) <= var);
            for (double e : sw.events(PairKind::Upper, Region::Plus, k, sw.eta, sw.theta)) CHECK(false);
        }
        // the index-3 point at +A shows up in absolute degree 3
        CHECK(sw.rank(PairKind::Upper, Region::Minus, A + var + 0.1, 3) == 1);
        CHECK(sw.rank(PairKind::Upper, Region::Minus, A - var - 0.1, 3) == 0);

        auto groups = filtered_groups(sw, 0);
        bool jump = false;
        for (const auto& g : groups) {
            CHECK(g.region != Region::Full);
            if (g.lower && g.region == Region::Plus && g.rank > 0) {
                CHECK(g.degree == -1);
                CHECK(g.level < -A + var);
                jump = true;
            }
        }
        CHECK(jump);
    }
}

TEST_CASE("no critical values crossed, constant ranks") {
    Sweep s = sweep_at(example(-1), 2.0, 16);
    const double A = 4.0 / 3 * std::pow(3.0, 1.5);
    const RankSweep& sw = s.sweep;
    for (Region r : {Region::Full, Region::Plus, Region::Minus})
        for (int k = 0; k <= 3; ++k) {
            // between eta and the nearest critical value nothing changes
            const int lo = sw.rank(PairKind::Lower, r, -0.5 * A, k);
            CHECK(sw.rank(PairKind::Lower, r, -0.4 * A, k) == lo);
            CHECK(sw.rank(PairKind::Lower, r, -0.3 * A, k) == lo);
            CHECK(sw.events(PairKind::Lower, r, k, -0.6 * A, -sw.eta).empty());
        }
}

TEST_CASE("sign-flipped family swaps the half-spaces") {
    Sweep s = sweep_at(example(1), -1.0, 16);
    const RankSweep& sw = s.sweep;
    int plus = 0, minus = 0;
    for (int k = 0; k <= 3; ++k) {
        plus += static_cast<int>(sw.events(PairKind::Lower, Region::Plus, k, -sw.theta, -sw.eta).size());
        minus += static_cast<int>(sw.events(PairKind::Lower, Region::Minus, k, -sw.theta, -sw.eta).size());
    }
    CHECK(plus == 0);
    CHECK(minus == 1);
}

TEST_CASE("empty slice: all ranks vanish") {
    auto f = example(-1);
    DifferenceFunction delta(f, 6.0);
    SliceDiagram d = extract_slice(f, 6.0);
    CubicalField fld = build_field(delta, 16, &d);
    const double eta = default_eta(fld, nullptr);
    RankSweep sw = rank_sweep(fld, eta, default_levels(fld, eta, 6));
    for (const auto& row : sw.rows)
        if (row.pair != PairKind::Trivial || row.region == Region::Full) CHECK(row.rank == 0);
    for (const auto& g : filtered_groups(sw, 0)) CHECK(g.rank == 0);
}

TEST_CASE("eta must separate the critical values from 0") {
    auto f = example(-1);
    DifferenceFunction delta(f, 1.0);
    SliceDiagram d = extract_slice(f, 1.0);
    auto cps = critical_points(delta, d);
    CubicalField fld = build_field(delta, 16, &d);
    CHECK_THROWS_AS(rank_sweep(fld, 0.0, {}, &cps), Error);
    try {
        rank_sweep(fld, 11.0, {}, &cps);
        FAIL("accepted eta above a critical value");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadEta);
    }
}
