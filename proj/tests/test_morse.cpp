#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gfcap/morse.hpp"
#include "prop.hpp"

using namespace gfcap;

namespace {

constexpr double K = 5.0;

// F_a(0, x_n) inside the cube, by hand
double fa_axis(double xn, double a) { return xn * K - xn * xn * xn / 3 - a * xn; }

std::shared_ptr<const GeneratingFamily> example(int sign, int dim = 2) {
    ExampleFamilyParams p;
    p.dim = dim;
    return build_example_family(p, sign);
}

const CriticalDatum* find(const std::vector<CriticalDatum>& cps, CriticalKind k, HalfSpace h) {
    for (const auto& c : cps)
        if (c.kind == k && c.half_space == h) return &c;
    return nullptr;
}

// negative eigenvalues of a finite-difference Hessian of Delta
int fd_index(const DifferenceFunction& delta, const Vec& w) {
    Mat H = fd_hessian([&](const Vec& v) { return delta.eval(v); }, w, 1e-3);
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    int neg = 0;
    for (int i = 0; i < H.rows(); ++i) neg += es.eigenvalues()(i) < -1e-6;
    return neg;
}

struct Run {
    std::shared_ptr<const GeneratingFamily> f;
    SliceDiagram d;
    DifferenceFunction delta;
    std::vector<CriticalDatum> cps;
};

Run run(std::shared_ptr<const GeneratingFamily> f, double a) {
    Run r{f, extract_slice(f, a), DifferenceFunction(f, a), {}};
    r.cps = critical_points(r.delta, r.d);
    return r;
}

} // namespace

TEST_CASE("critical points at a = 1") {
    Run r = run(example(-1), 1.0);
    const double v = fa_axis(-2, 1) - fa_axis(2, 1);
    CHECK(v == doctest::Approx(-32.0 / 3).epsilon(1e-14));
    const CriticalDatum* qp = find(r.cps, CriticalKind::Isolated, HalfSpace::Plus);
    const CriticalDatum* qm = find(r.cps, CriticalKind::Isolated, HalfSpace::Minus);
    const CriticalDatum* bott = find(r.cps, CriticalKind::Bott, HalfSpace::Zero);
    REQUIRE(qp);
    REQUIRE(qm);
    REQUIRE(bott);
    CHECK(r.cps.size() == 3);
    CHECK((qp->point - (Vec(3) << 0, -2, 2).finished()).norm() < 1e-9);
    CHECK((qm->point - (Vec(3) << 0, 2, -2).finished()).norm() < 1e-9);
    CHECK(qp->value == doctest::Approx(v).epsilon(1e-9));
    CHECK(qm->value == doctest::Approx(-v).epsilon(1e-9));
    CHECK(qp->index == 0);
    CHECK(qm->index == 3);
    CHECK(morse_index_hessian(r.delta, *qp) == 0);
    CHECK(morse_index_hessian(r.delta, *qm) == 3);
    CHECK(std::abs(bott->value) < 1e-8);
    CHECK(bott->index == 1);
    CHECK(bott->manifold_dim == 1);
    REQUIRE(!bott->bott_samples.empty());
    for (const auto& w : bott->bott_samples) {
        CHECK(std::abs(w(0) * w(0) + w(1) * w(1) - 4) < 1e-8);
        CHECK(w(1) == w(2));
    }
    BottCheck b = verify_bott(r.delta, *bott);
    CHECK(b.ok);
    CHECK(b.min_kernel == 1);
    CHECK(b.max_kernel == 1);
}

TEST_CASE("empty slice has no critical points") {
    Run r = run(example(-1), K + 1);
    CHECK(r.cps.empty());
}

TEST_CASE("crossing paths need a crossing") {
    Run r = run(example(-1), 1.0);
    const CriticalDatum* bott = find(r.cps, CriticalKind::Bott, HalfSpace::Zero);
    REQUIRE(bott);
    try {
        crossing_path(r.f, r.d, *bott);
        FAIL("accepted a Bott datum");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidPath);
    }
    SliceDiagram circle = circle_diagram(1.0);
    CriticalDatum fake = *find(r.cps, CriticalKind::Isolated, HalfSpace::Plus);
    CHECK_THROWS_AS(crossing_path(r.f, circle, fake), Error);
}

TEST_CASE("path integral and Maslov index agree with the Hessian") {
    for (int sign : {-1, 1})
        for (double t : {1.0, 1.75, 2.5, 3.25}) {
            const double a = -sign * t;
            Run r = run(example(sign), a);
            const double A = 4.0 / 3.0 * std::pow(K - t, 1.5);
            int isolated = 0;
            for (const auto& c : r.cps) {
                if (c.kind != CriticalKind::Isolated) continue;
                ++isolated;
                CHECK(std::abs(c.value) == doctest::Approx(A).epsilon(1e-9));
                CrossingPath p = crossing_path(r.f, r.d, c);
                const double v = critical_value_via_path(p);
                CHECK(std::abs(v - c.value) < 1e-5 * std::abs(c.value));
                const int h = morse_index_hessian(r.delta, c);
                CHECK(morse_index_maslov(p, r.f->fiber_dim) == h);
                CHECK(fd_index(r.delta, c.point) == h);
                CHECK(r.delta.grad(c.point).norm() < 1e-9);
            }
            CHECK(isolated == 2);
        }
}

TEST_CASE("stabilization keeps values and shifts indices") {
    auto F = example(-1);
    Run base = run(F, 1.0);
    for (double q : {1.0, -1.0}) {
        Run s = run(stabilize(F, Mat::Constant(1, 1, q)), 1.0);
        for (HalfSpace h : {HalfSpace::Plus, HalfSpace::Minus}) {
            const CriticalDatum* a = find(base.cps, CriticalKind::Isolated, h);
            const CriticalDatum* b = find(s.cps, CriticalKind::Isolated, h);
            REQUIRE(a);
            REQUIRE(b);
            CHECK(b->value == doctest::Approx(a->value).epsilon(1e-9));
            CHECK(b->index == a->index + 1);
            CrossingPath p = crossing_path(s.f, s.d, *b);
            CHECK(morse_index_maslov(p, 1) == b->index);
        }
        const CriticalDatum* bott = find(s.cps, CriticalKind::Bott, HalfSpace::Zero);
        REQUIRE(bott);
        CHECK(bott->index == 2);
    }
    Run two = run(stabilize(F, -Mat::Identity(2, 2)), 1.0);
    const CriticalDatum* qp = find(two.cps, CriticalKind::Isolated, HalfSpace::Plus);
    REQUIRE(qp);
    CHECK(two.delta.dim() == 7);
    CHECK(qp->index == 2);
    CHECK(fd_index(two.delta, qp->point) == 2);
}

TEST_CASE("dilation scales critical values by beta squared") {
    auto F = example(-1);
    for (double beta : {0.5, 2.0}) {
        Run r = run(dilate(F, beta), beta * 1.0);
        const CriticalDatum* qm = find(r.cps, CriticalKind::Isolated, HalfSpace::Minus);
        REQUIRE(qm);
        CHECK(qm->value == doctest::Approx(beta * beta * 32.0 / 3).epsilon(1e-9));
    }
}

TEST_CASE("Delta is antisymmetric under the swap") {
    Run r = run(example(-1), 1.5);
    Rng rng(2024);
    for (int it = 0; it < 300; ++it) {
        Vec w(3);
        for (int i = 0; i < 3; ++i) w(i) = rng.uniform(-6, 6);
        CHECK(r.delta.eval(r.delta.swap(w)) == doctest::Approx(-r.delta.eval(w)).epsilon(1e-13));
        // the diagonal is a zero set
        Vec d = w;
        d(2) = d(1);
        CHECK(r.delta.eval(d) == 0.0);
    }
}

TEST_CASE("n = 3: isolated points at the poles") {
    Run r = run(example(-1, 3), 1.0);
    const CriticalDatum* qp = find(r.cps, CriticalKind::Isolated, HalfSpace::Plus);
    const CriticalDatum* qm = find(r.cps, CriticalKind::Isolated, HalfSpace::Minus);
    REQUIRE(qp);
    REQUIRE(qm);
    CHECK(qp->value == doctest::Approx(-32.0 / 3).epsilon(1e-9));
    CHECK(qm->value == doctest::Approx(32.0 / 3).epsilon(1e-9));
    CHECK(qp->index == fd_index(r.delta, qp->point));
    CHECK(qm->index == fd_index(r.delta, qm->point));
    const CriticalDatum* bott = find(r.cps, CriticalKind::Bott, HalfSpace::Zero);
    REQUIRE(bott);
    CHECK(bott->manifold_dim == 2);
}
