#pragma once

#include "gfcap/family.hpp"

namespace gfcap {

// Delta_a(x, x_n, e, x~_n, e~) = F_a(x, x_n, e) - F_a(x, x~_n, e~).
// Layout of w: (x [n-1], x_n, e [N], x~_n, e~ [N]).
struct DifferenceFunction {
    ShearedFamily fa;

    DifferenceFunction() = default;
    DifferenceFunction(std::shared_ptr<const GeneratingFamily> f, double a) : fa{std::move(f), a} {}

    int n() const { return fa.base_dim(); }
    int N() const { return fa.fiber_dim(); }
    int dim() const { return (n() - 1) + 2 * (1 + N()); }
    double height() const { return fa.height; }
    const GeneratingFamily& family() const { return *fa.parent; }

    Vec first(const Vec& w) const {
        Vec z(n() + N());
        z.head(n() - 1) = w.head(n() - 1);
        z.tail(1 + N()) = w.segment(n() - 1, 1 + N());
        return z;
    }
    Vec second(const Vec& w) const {
        Vec z(n() + N());
        z.head(n() - 1) = w.head(n() - 1);
        z.tail(1 + N()) = w.tail(1 + N());
        return z;
    }
    // w from two points sharing x (x is taken from z1)
    Vec join(const Vec& z1, const Vec& z2) const {
        Vec w(dim());
        w.head(n() - 1) = z1.head(n() - 1);
        w.segment(n() - 1, 1 + N()) = z1.tail(1 + N());
        w.tail(1 + N()) = z2.tail(1 + N());
        return w;
    }
    Vec swap(const Vec& w) const {
        Vec s = w;
        s.segment(n() - 1, 1 + N()) = w.tail(1 + N());
        s.tail(1 + N()) = w.segment(n() - 1, 1 + N());
        return s;
    }
    double xn(const Vec& w) const { return w(n() - 1); }
    double xn_tilde(const Vec& w) const { return w(n() + N()); }

    double eval(const Vec& w) const { return fa.eval(first(w)) - fa.eval(second(w)); }

    Vec grad(const Vec& w) const {
        const int m = n() - 1, t = 1 + N();
        Vec g1 = fa.grad(first(w)), g2 = fa.grad(second(w));
        Vec g(dim());
        g.head(m) = g1.head(m) - g2.head(m);
        g.segment(m, t) = g1.tail(t);
        g.tail(t) = -g2.tail(t);
        return g;
    }

    Mat hess(const Vec& w) const {
        const int m = n() - 1, t = 1 + N();
        Mat h1 = fa.hess(first(w)), h2 = fa.hess(second(w));
        Mat H = Mat::Zero(dim(), dim());
        H.topLeftCorner(m, m) = h1.topLeftCorner(m, m) - h2.topLeftCorner(m, m);
        H.block(0, m, m, t) = h1.topRightCorner(m, t);
        H.block(m, 0, t, m) = h1.bottomLeftCorner(t, m);
        H.block(0, m + t, m, t) = -h2.topRightCorner(m, t);
        H.block(m + t, 0, t, m) = -h2.bottomLeftCorner(t, m);
        H.block(m, m, t, t) = h1.bottomRightCorner(t, t);
        H.block(m + t, m + t, t, t) = -h2.bottomRightCorner(t, t);
        return H;
    }
};

} // namespace gfcap
