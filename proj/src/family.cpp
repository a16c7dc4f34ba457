#include "gfcap/family.hpp"

#include <array>
#include <cmath>

namespace gfcap {

namespace {

constexpr std::array<double, 5> kOff = {-2, -1, 0, 1, 2};
constexpr std::array<double, 5> kD1 = {1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12};

// Polynomial on [t0, t0+len] matching value and derivatives up to `order` at both ends.
class Hermite {
public:
    Hermite() = default;
    Hermite(double t0, double len, const std::vector<double>& left, const std::vector<double>& right)
        : t0_(t0), len_(len) {
        const int m = static_cast<int>(left.size());
        const int deg = 2 * m;
        Mat A = Mat::Zero(deg, deg);
        Vec b(deg);
        // row for derivative k at u=0 and u=1 of sum c_j u^j, in scaled variable u = (t-t0)/len
        for (int k = 0; k < m; ++k) {
            double scale = std::pow(len, k);
            for (int j = k; j < deg; ++j) {
                double fall = 1;
                for (int i = 0; i < k; ++i) fall *= (j - i);
                if (j == k) A(k, j) = fall;
                A(m + k, j) = fall;
            }
            b(k) = left[k] * scale;
            b(m + k) = right[k] * scale;
        }
        coef_ = A.fullPivLu().solve(b);
    }

    Cutoff1D at(double t) const {
        double u = (t - t0_) / len_;
        const int deg = static_cast<int>(coef_.size());
        double v = 0, d1 = 0, d2 = 0;
        for (int j = deg - 1; j >= 0; --j) {
            d2 = d2 * u + 2 * d1;
            d1 = d1 * u + v;
            v = v * u + coef_(j);
        }
        return {v, d1 / len_, d2 / (len_ * len_)};
    }

private:
    double t0_ = 0, len_ = 1;
    Vec coef_;
};

int blend_order(Blend b) { return b == Blend::Septic ? 4 : 3; }

std::vector<double> head(std::vector<double> v, int m) {
    v.resize(m);
    return v;
}

} // namespace

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z, double h) {
    Vec g(z.size());
    Vec p = z;
    for (int i = 0; i < z.size(); ++i) {
        double s = 0;
        for (int a = 0; a < 5; ++a) {
            if (kD1[a] == 0) continue;
            p(i) = z(i) + kOff[a] * h;
            s += kD1[a] * f(p);
        }
        p(i) = z(i);
        g(i) = s / h;
    }
    return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& z, double h) {
    const int d = static_cast<int>(z.size());
    Mat H(d, d);
    Vec p = z;
    const double f0 = f(z);
    for (int i = 0; i < d; ++i) {
        constexpr std::array<double, 5> w2 = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
        double s = w2[2] * f0;
        for (int a = 0; a < 5; ++a) {
            if (a == 2) continue;
            p(i) = z(i) + kOff[a] * h;
            s += w2[a] * f(p);
        }
        p(i) = z(i);
        H(i, i) = s / (h * h);
        for (int j = 0; j < i; ++j) {
            double t = 0;
            for (int a = 0; a < 5; ++a) {
                if (kD1[a] == 0) continue;
                for (int b = 0; b < 5; ++b) {
                    if (kD1[b] == 0) continue;
                    p(i) = z(i) + kOff[a] * h;
                    p(j) = z(j) + kOff[b] * h;
                    t += kD1[a] * kD1[b] * f(p);
                }
            }
            p(i) = z(i);
            p(j) = z(j);
            H(i, j) = H(j, i) = t / (h * h);
        }
    }
    return H;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& g, const Vec& z, double h) {
    Vec g0 = g(z);
    Mat J(g0.size(), z.size());
    Vec p = z;
    for (int i = 0; i < z.size(); ++i) {
        Vec s = Vec::Zero(g0.size());
        for (int a = 0; a < 5; ++a) {
            if (kD1[a] == 0) continue;
            p(i) = z(i) + kOff[a] * h;
            s += kD1[a] * g(p);
        }
        p(i) = z(i);
        J.col(i) = s / h;
    }
    return J;
}

Vec GeneratingFamily::gradient(const Vec& z) const {
    if (grad) return grad(z);
    return fd_gradient(eval, z, 1e-3 * scale);
}

Mat GeneratingFamily::hessian(const Vec& z) const {
    if (hess) return hess(z);
    if (grad) {
        Mat J = fd_jacobian(grad, z, 1e-4 * scale);
        return 0.5 * (J + J.transpose());
    }
    return fd_hessian(eval, z, 1e-4 * scale);
}

double GeneratingFamily::quadratic_at_infinity(const Vec& z) const {
    if (fiber_dim == 0) return 0.0;
    Vec e = z.tail(fiber_dim);
    return e.dot(infinity_form * e);
}

double ShearedFamily::eval(const Vec& z) const {
    return parent->value(z) - height * z(parent->base_dim - 1);
}

Vec ShearedFamily::grad(const Vec& z) const {
    Vec g = parent->gradient(z);
    g(parent->base_dim - 1) -= height;
    return g;
}

Mat ShearedFamily::hess(const Vec& z) const { return parent->hessian(z); }

void ExampleFamilyParams::validate() const {
    if (!(0 < eps && eps < beta && beta < tau && tau < K))
        throw Error(ErrorKind::InvalidParams, "need 0 < eps < beta < tau < K");
    if (dim < 2 || dim > 3)
        throw Error(ErrorKind::InvalidParams, "example family supports dim 2 or 3");
}

// The tails.  The q envelope drops over the narrow margin sqrt(K) - sqrt(K-eps),
// which keeps q >= 0.  ell and c level off over a short turn and then decay over
// slow_width; d decays over slow_width too.  No profile has a cliff, which keeps
// sampled versions of Delta honest.
namespace {

struct TailSet {
    Hermite ell_turn, ell_slow, qenv, d, c_turn, c_slow;
    double s, m, m_turn, w;
};

TailSet make_tails(const ExampleProfiles& p) {
    const int k = blend_order(p.blend);
    const double s = p.s;
    TailSet t;
    t.s = s;
    t.m = p.margin;
    t.m_turn = 2 * p.margin;
    t.w = p.slow_width;
    std::vector<double> zero(4, 0.0);
    double lpeak = s + 0.5 * t.m;
    t.ell_turn = Hermite(s, t.m, head({s, 1, 0, 0}, k), head({lpeak, 0, 0, 0}, k));
    t.ell_slow = Hermite(s + t.m, t.w, head({lpeak, 0, 0, 0}, k), head(zero, k));
    t.qenv = Hermite(s, t.m, head({1, 0, 0, 0}, k), head(zero, k));
    t.d = Hermite(s, t.w, head({1, 0, 0, 0}, k), head(zero, k));
    double cs = s * s * s / 3;
    double peak = cs + 0.5 * s * s * t.m_turn;
    t.c_turn = Hermite(s, t.m_turn, head({cs, s * s, 2 * s, 2}, k), head({peak, 0, 0, 0}, k));
    t.c_slow = Hermite(s + t.m_turn, t.w, head({peak, 0, 0, 0}, k), head(zero, k));
    return t;
}

// odd extension of a profile given on t >= 0
Cutoff1D odd(double t, const std::function<Cutoff1D(double)>& pos) {
    if (t >= 0) return pos(t);
    Cutoff1D r = pos(-t);
    return {-r.v, r.d1, -r.d2};
}

} // namespace

Cutoff1D ExampleProfiles::ell(double t) const {
    TailSet ts = make_tails(*this);
    return odd(t, [&](double u) -> Cutoff1D {
        if (u <= s) return {u, 1, 0};
        if (u <= s + ts.m) return ts.ell_turn.at(u);
        if (u >= s + ts.m + ts.w) return {};
        return ts.ell_slow.at(u);
    });
}

Cutoff1D ExampleProfiles::c(double t) const {
    TailSet ts = make_tails(*this);
    return odd(t, [&](double u) -> Cutoff1D {
        if (u <= s) return {u * u * u / 3, u * u, 2 * u};
        if (u <= s + ts.m_turn) return ts.c_turn.at(u);
        if (u >= s + ts.m_turn + ts.w) return {};
        return ts.c_slow.at(u);
    });
}

Cutoff1D ExampleProfiles::d1(double r) const {
    TailSet ts = make_tails(*this);
    r = std::abs(r);
    if (r <= s) return {1, 0, 0};
    if (r >= s + ts.w) return {};
    return ts.d.at(r);
}

Cutoff1D ExampleProfiles::q1(double r) const {
    TailSet ts = make_tails(*this);
    r = std::abs(r);
    Cutoff1D d{};
    if (r <= s) d = {1, 0, 0};
    else if (r < s + ts.m) d = ts.qenv.at(r);
    double g = K - r * r;
    return {d.v * g, d.d1 * g - 2 * r * d.v, d.d2 * g - 4 * r * d.d1 - 2 * d.v};
}

double ExampleProfiles::support() const { return s + 2 * margin + slow_width; }

ExampleProfiles example_profiles(const ExampleFamilyParams& p) {
    p.validate();
    ExampleProfiles pr{};
    pr.K = p.K;
    pr.eps = p.eps;
    pr.beta = p.beta;
    pr.s = std::sqrt(p.K - p.eps);
    pr.margin = std::sqrt(p.K) - pr.s;
    pr.blend = p.blend;
    double peak = pr.s * pr.s * pr.s / 3 + pr.s * pr.s * pr.margin;
    // max |slope| of the slow Hermite relative to peak/width
    double slope_factor = p.blend == Blend::Septic ? 2.1875 : 1.875;
    pr.slow_width = slope_factor * peak / (0.8 * (p.beta - p.eps));
    return pr;
}

namespace {

class ExampleEvaluator {
public:
    ExampleEvaluator(const ExampleProfiles& pr, int n, double sign)
        : pr_(pr), ts_(make_tails(pr)), n_(n), sign_(sign) {}

    // value, gradient, hessian in one pass
    void operator()(const Vec& z, double* f, Vec* g, Mat* H) const {
        const int m = n_ - 1;
        Eigen::VectorXd x = z.head(m);
        double xn = z(m);
        double r2 = x.squaredNorm();
        double r = std::sqrt(r2);
        Cutoff1D er = radial(r, ts_.qenv, ts_.m);
        Cutoff1D dr = radial(r, ts_.d, ts_.w);
        Cutoff1D l = prof_ell(xn);
        Cutoff1D c = prof_c(xn);
        double g0 = pr_.K - r2;
        double d = dr.v;
        double q = er.v * g0;
        if (f) *f = sign_ * (l.v * q - d * c.v);
        if (!g && !H) return;
        // derivatives of d, the q envelope and q in x
        Vec di = Vec::Zero(m), ei = Vec::Zero(m), qi(m);
        if (r > 0 && dr.d1 != 0) di = dr.d1 * x / r;
        if (r > 0 && er.d1 != 0) ei = er.d1 * x / r;
        for (int i = 0; i < m; ++i) qi(i) = ei(i) * g0 - 2 * x(i) * er.v;
        if (g) {
            Vec out(n_);
            for (int i = 0; i < m; ++i) out(i) = l.v * qi(i) - di(i) * c.v;
            out(m) = l.d1 * q - d * c.d1;
            *g = sign_ * out;
        }
        if (H) {
            Mat dij = radial_hess(x, r, dr), eij = radial_hess(x, r, er);
            Mat out(n_, n_);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    double qij = eij(i, j) * g0 - 2 * x(j) * ei(i) - 2 * x(i) * ei(j) -
                                 (i == j ? 2 * er.v : 0.0);
                    out(i, j) = l.v * qij - dij(i, j) * c.v;
                }
                out(i, m) = out(m, i) = l.d1 * qi(i) - di(i) * c.d1;
            }
            out(m, m) = l.d2 * q - d * c.d2;
            *H = sign_ * out;
        }
    }

private:
    Cutoff1D radial(double r, const Hermite& tail, double len) const {
        if (r <= pr_.s) return {1, 0, 0};
        if (r >= pr_.s + len) return {};
        return tail.at(r);
    }
    static Mat radial_hess(const Vec& x, double r, const Cutoff1D& p) {
        const int m = static_cast<int>(x.size());
        Mat h = Mat::Zero(m, m);
        if (r > 0 && (p.d1 != 0 || p.d2 != 0)) {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    h(i, j) = p.d2 * x(i) * x(j) / (r * r) +
                              p.d1 * ((i == j ? 1.0 : 0.0) / r - x(i) * x(j) / (r * r * r));
        }
        return h;
    }
    Cutoff1D prof_ell(double t) const {
        double u = std::abs(t);
        Cutoff1D r;
        if (u <= pr_.s) r = {u, 1, 0};
        else if (u <= pr_.s + ts_.m) r = ts_.ell_turn.at(u);
        else if (u >= pr_.s + ts_.m + ts_.w) r = {};
        else r = ts_.ell_slow.at(u);
        return t >= 0 ? r : Cutoff1D{-r.v, r.d1, -r.d2};
    }
    Cutoff1D prof_c(double t) const {
        double u = std::abs(t);
        Cutoff1D r;
        if (u <= pr_.s) r = {u * u * u / 3, u * u, 2 * u};
        else if (u <= pr_.s + ts_.m_turn) r = ts_.c_turn.at(u);
        else if (u >= pr_.s + ts_.m_turn + ts_.w) r = {};
        else r = ts_.c_slow.at(u);
        return t >= 0 ? r : Cutoff1D{-r.v, r.d1, -r.d2};
    }

    ExampleProfiles pr_;
    TailSet ts_;
    int n_;
    double sign_;
};

} // namespace

std::shared_ptr<const GeneratingFamily> build_example_family(const ExampleFamilyParams& p, int sign) {
    if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidParams, "sign must be +1 or -1");
    ExampleProfiles pr = example_profiles(p);
    // sign = -1 is F itself, sign = +1 is G = -F
    auto ev = std::make_shared<ExampleEvaluator>(pr, p.dim, sign == -1 ? 1.0 : -1.0);
    auto f = std::make_shared<GeneratingFamily>();
    f->base_dim = p.dim;
    f->fiber_dim = 0;
    f->infinity_form = Mat(0, 0);
    f->support_radius = pr.support();
    f->scale = pr.s;
    f->name = sign == -1 ? "example21-neg" : "example21-pos";
    f->eval = [ev](const Vec& z) {
        double v;
        (*ev)(z, &v, nullptr, nullptr);
        return v;
    };
    f->grad = [ev](const Vec& z) {
        Vec g;
        (*ev)(z, nullptr, &g, nullptr);
        return g;
    };
    f->hess = [ev](const Vec& z) {
        Mat H;
        (*ev)(z, nullptr, nullptr, &H);
        return H;
    };
    return f;
}

std::shared_ptr<const GeneratingFamily> stabilize(std::shared_ptr<const GeneratingFamily> f,
                                                  const Mat& q) {
    const int k = static_cast<int>(q.rows());
    if (q.cols() != k) throw Error(ErrorKind::InvalidParams, "quadratic form must be square");
    if (k == 0) return f;
    Mat qs = 0.5 * (q + q.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(qs);
    double big = es.eigenvalues().cwiseAbs().maxCoeff();
    if (big == 0 || es.eigenvalues().cwiseAbs().minCoeff() < 1e-12 * big)
        throw Error(ErrorKind::InvalidParams, "degenerate quadratic form");
    auto out = std::make_shared<GeneratingFamily>(*f);
    const int d0 = f->dim();
    out->fiber_dim = f->fiber_dim + k;
    Mat Q = Mat::Zero(out->fiber_dim, out->fiber_dim);
    if (f->fiber_dim > 0) Q.topLeftCorner(f->fiber_dim, f->fiber_dim) = f->infinity_form;
    Q.bottomRightCorner(k, k) = qs;
    out->infinity_form = Q;
    out->name = f->name + "+stab";
    out->eval = [f, qs, d0, k](const Vec& z) {
        Vec e = z.tail(k);
        return f->value(z.head(d0)) + e.dot(qs * e);
    };
    out->grad = [f, qs, d0, k](const Vec& z) {
        Vec g(d0 + k);
        g.head(d0) = f->gradient(z.head(d0));
        g.tail(k) = 2 * qs * z.tail(k);
        return g;
    };
    out->hess = [f, qs, d0, k](const Vec& z) {
        Mat H = Mat::Zero(d0 + k, d0 + k);
        H.topLeftCorner(d0, d0) = f->hessian(z.head(d0));
        H.bottomRightCorner(k, k) = 2 * qs;
        return H;
    };
    return out;
}

std::shared_ptr<const GeneratingFamily> dilate(std::shared_ptr<const GeneratingFamily> f,
                                               double beta) {
    if (!(beta > 0)) throw Error(ErrorKind::InvalidParams, "dilation factor must be positive");
    if (beta == 1.0) return f;
    auto out = std::make_shared<GeneratingFamily>(*f);
    const int n = f->base_dim;
    const int d = f->dim();
    auto shrink = [n, beta](const Vec& z) {
        Vec w = z;
        w.head(n) /= beta;
        return w;
    };
    out->eval = [f, shrink, beta](const Vec& z) { return beta * beta * f->value(shrink(z)); };
    out->grad = [f, shrink, beta, n](const Vec& z) {
        Vec g = f->gradient(shrink(z)) * (beta * beta);
        g.head(n) /= beta;
        return g;
    };
    out->hess = [f, shrink, beta, n, d](const Vec& z) {
        Mat H = f->hessian(shrink(z)) * (beta * beta);
        Vec s = Vec::Ones(d);
        s.head(n).setConstant(1.0 / beta);
        return Mat(s.asDiagonal() * H * s.asDiagonal());
    };
    out->infinity_form = f->infinity_form * (beta * beta);
    // fiber coordinates are not rescaled, so with fibers the box cannot shrink below the original
    out->support_radius = f->fiber_dim == 0 ? beta * f->support_radius
                                            : std::max(beta, 1.0) * f->support_radius;
    out->scale = beta * f->scale;
    out->name = f->name + "*dil";
    return out;
}

} // namespace gfcap
