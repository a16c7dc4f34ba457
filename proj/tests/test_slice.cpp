#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gfcap/slice.hpp"
#include "prop.hpp"

using namespace gfcap;

namespace {

constexpr double K = 5.0;

// Area of one lobe of the curve x^2 + x_n^2 = rho^2, y = -2 x x_n: twice the
// integral of 2 x sqrt(rho^2 - x^2) over [0, rho].  Simpson in x = rho sin(phi).
double lobe_oracle(double rho) {
    const int n = 2000;
    const double h = (M_PI / 2) / n;
    auto g = [&](double phi) { return 4 * rho * rho * rho * std::sin(phi) * std::cos(phi) * std::cos(phi); };
    double s = g(0) + g(M_PI / 2);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * g(i * h);
    return s * h / 3;
}

std::shared_ptr<const GeneratingFamily> example(int sign, int dim = 2) {
    ExampleFamilyParams p;
    p.dim = dim;
    return build_example_family(p, sign);
}

} // namespace

TEST_CASE("figure-eight at a = 1") {
    auto f = example(-1);
    SliceDiagram d = extract_slice(f, 1.0);
    REQUIRE(d.components.size() == 1);
    CHECK(d.components[0].verts.size() > 100);
    double worst_circle = 0, worst_y = 0;
    for (const auto& v : d.components[0].verts) {
        const double x = v.p.z(0), xn = v.p.z(1);
        worst_circle = std::max(worst_circle, std::abs(x * x + xn * xn - (K - 1)));
        worst_y = std::max(worst_y, std::abs(v.p.y(0) + 2 * x * xn));
    }
    CHECK(worst_circle < 1e-8);
    CHECK(worst_y < 1e-8);
    REQUIRE(d.double_points.size() == 1);
    const Crossing& c = d.double_points[0];
    CHECK(c.sign == -1);
    CHECK(d.writhe == -1);
    CHECK(writhe(d) == -1);
    CHECK(std::abs(c.position(0)) < 1e-8);
    CHECK(std::abs(c.position(1)) < 1e-8);
    CHECK(c.over.xn() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(c.under.xn() == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(c.angle > 0.1);
}

TEST_CASE("positive crossing for the sign-flipped family") {
    SliceDiagram d = extract_slice(example(1), -1.0);
    REQUIRE(d.double_points.size() == 1);
    CHECK(d.double_points[0].sign == 1);
    CHECK(d.writhe == 1);
}

TEST_CASE("empty slice above the Lagrangian") {
    SliceDiagram d = extract_slice(example(-1), K + 1);
    CHECK(d.empty());
    CHECK(d.double_points.empty());
    CHECK(d.writhe == 0);
}

TEST_CASE("lobe areas follow the closed form") {
    for (double a : {1.0, 1.75, 2.5, 3.25}) {
        SliceDiagram d = extract_slice(example(-1), a);
        const double A = lobe_oracle(std::sqrt(K - a));
        REQUIRE(d.lobe_areas.size() == 2);
        // the two lobes have opposite orientation
        CHECK(d.lobe_areas[0] * d.lobe_areas[1] < 0);
        for (double v : d.lobe_areas) CHECK(std::abs(v) == doctest::Approx(A).epsilon(1e-6));
        CHECK(std::abs(d.total_signed_area) < 1e-6 * A);
    }
    CHECK(lobe_oracle(2.0) == doctest::Approx(32.0 / 3).epsilon(1e-12));
    CHECK(lobe_oracle(std::sqrt(2.5)) == doctest::Approx(5.2705).epsilon(1e-4));
}

TEST_CASE("y dx along a closed lobe equals its area") {
    auto f = example(-1);
    for (double a : {1.0, 2.5}) {
        SliceDiagram d = extract_slice(f, a);
        const double A = lobe_oracle(std::sqrt(K - a));
        int checked = 0;
        for (const auto& lobe : d.lobes) {
            if (!lobe.loop) continue;
            const Crossing& c = d.double_points[lobe.crossing];
            auto at = [&](const CurveParam& q) {
                return std::abs(q.key() - c.over_at.key()) < 1e-12 && q.comp == c.over_at.comp ? c.over : c.under;
            };
            const double v = integrate_ydx(f, d, lobe.from, at(lobe.from), lobe.to, at(lobe.to));
            CHECK(std::abs(v) == doctest::Approx(A).epsilon(1e-6));
            ++checked;
        }
        CHECK(checked == 2);
    }
}

TEST_CASE("every vertex is fiber-critical and carries y = dF/dx") {
    for (int sign : {-1, 1}) {
        auto f = example(sign);
        Rng rng(41 + sign);
        for (int it = 0; it < 6; ++it) {
            const double a = -sign * rng.uniform(0.5, 4.5);
            SliceDiagram d = extract_slice(f, a);
            for (const auto& c : d.components)
                for (const auto& v : c.verts) {
                    Vec g = f->gradient(v.p.z);
                    CHECK(std::abs(g(1) - a) < 1e-8);
                    CHECK(std::abs(g(0) - v.p.y(0)) < 1e-12);
                }
            REQUIRE(d.double_points.size() == 1);
            CHECK(d.double_points[0].sign == sign);
        }
    }
}

TEST_CASE("tracing is deterministic") {
    auto f = example(-1);
    SliceDiagram a = extract_slice(f, 1.3), b = extract_slice(f, 1.3);
    REQUIRE(a.components.size() == b.components.size());
    REQUIRE(a.components[0].verts.size() == b.components[0].verts.size());
    for (size_t i = 0; i < a.components[0].verts.size(); ++i)
        CHECK((a.components[0].verts[i].p.z - b.components[0].verts[i].p.z).norm() == 0.0);
}

TEST_CASE("double points can be recomputed from the trace") {
    auto f = example(-1);
    SliceDiagram d = extract_slice(f, 2.0);
    auto again = double_points(f, d);
    REQUIRE(again.size() == 1);
    CHECK(again[0].sign == -1);
    CHECK((again[0].position - d.double_points[0].position).norm() < 1e-9);
}

TEST_CASE("sphere slice for n = 3") {
    auto f = example(-1, 3);
    SliceDiagram d = extract_slice(f, 1.0);
    CHECK(d.n == 3);
    REQUIRE(!d.surface.empty());
    double worst = 0;
    for (const auto& p : d.surface) {
        const double r2 = p.z.head(2).squaredNorm(), xn = p.z(2);
        worst = std::max(worst, std::abs(r2 + xn * xn - (K - 1)));
        worst = std::max(worst, (p.y + 2 * xn * p.z.head(2)).norm());
    }
    CHECK(worst < 1e-7);
    // the projection to (x, y) folds the poles x = 0 onto one point; no sign in 4 dimensions
    REQUIRE(d.double_points.size() == 1);
    CHECK(d.double_points[0].sign == 0);
}

TEST_CASE("circle diagram") {
    SliceDiagram c = circle_diagram(1.5);
    CHECK(c.double_points.empty());
    CHECK(c.writhe == 0);
    CHECK(std::abs(c.total_signed_area) == doctest::Approx(M_PI * 2.25).epsilon(1e-3));
}

TEST_CASE("writhe balance") {
    SliceDiagram small = extract_slice(example(-1), 1.0);
    SliceDiagram large = extract_slice(example(-1), 3.0);
    SliceDiagram circle = circle_diagram(1.0);
    CHECK(euler_obstruction(small, large, 0));
    CHECK(euler_obstruction(small, circle, 1));
    CHECK_FALSE(euler_obstruction(small, small, 1));
    CHECK(euler_obstruction(-1, -1, 0));
    CHECK_FALSE(euler_obstruction(0, 0, 1));
}
