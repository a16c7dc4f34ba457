#include "gfcap/morse.hpp"

#include <cmath>
#include <numbers>

namespace gfcap {

const char* half_space_name(HalfSpace h) {
    switch (h) {
    case HalfSpace::Plus: return "P+";
    case HalfSpace::Minus: return "P-";
    case HalfSpace::Zero: return "P0";
    }
    return "?";
}

const char* critical_kind_name(CriticalKind k) {
    return k == CriticalKind::Isolated ? "isolated" : "bott";
}

double degeneracy_threshold(const Eigen::VectorXd& ev) {
    double rho = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    return 1e-7 * (1 + rho);
}

namespace {

double grad_tol(const DifferenceFunction& df) {
    double s = df.family().scale;
    return 1e-11 * (1 + s * s);
}

bool newton_critical(const DifferenceFunction& df, Vec& w) {
    const double lim = 0.5 * df.family().scale;
    for (int it = 0; it < 60; ++it) {
        Vec g = df.grad(w);
        if (g.norm() < grad_tol(df)) return true;
        Vec dw = df.hess(w).fullPivLu().solve(g);
        if (!dw.allFinite()) return false;
        if (dw.norm() > lim) dw *= lim / dw.norm();
        w -= dw;
    }
    return df.grad(w).norm() < 100 * grad_tol(df);
}

Eigen::VectorXd spectrum(const DifferenceFunction& df, const Vec& w) {
    Eigen::SelfAdjointEigenSolver<Mat> es(df.hess(w), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

} // namespace

int morse_index_hessian(const DifferenceFunction& delta, const CriticalDatum& cd) {
    if (cd.kind != CriticalKind::Isolated)
        throw Error(ErrorKind::NonGenericFamily, "Hessian index is defined for isolated points only");
    Eigen::VectorXd ev = spectrum(delta, cd.point);
    double thr = degeneracy_threshold(ev);
    int neg = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) < thr)
            throw Error(ErrorKind::NonGenericFamily,
                        "degenerate Hessian at an isolated critical point (eigenvalue " +
                            std::to_string(ev(i)) + ")");
        if (ev(i) < 0) ++neg;
    }
    return neg;
}

std::vector<CriticalDatum> critical_points(const DifferenceFunction& delta, const SliceDiagram& d) {
    std::vector<CriticalDatum> out;
    for (int k = 0; k < static_cast<int>(d.double_points.size()); ++k) {
        const Crossing& cr = d.double_points[k];
        for (int order = 0; order < 2; ++order) {
            Vec w = order == 0 ? delta.join(cr.over.z, cr.under.z) : delta.join(cr.under.z, cr.over.z);
            if (!newton_critical(delta, w))
                throw Error(ErrorKind::MissingCriticalPoint,
                            "Newton failed from both preimages of crossing " + std::to_string(k));
            CriticalDatum cd;
            cd.point = w;
            cd.value = delta.eval(w);
            double gap = delta.xn(w) - delta.xn_tilde(w);
            cd.half_space = gap < 0 ? HalfSpace::Plus : (gap > 0 ? HalfSpace::Minus : HalfSpace::Zero);
            cd.kind = CriticalKind::Isolated;
            cd.source_crossing = k;
            cd.index = morse_index_hessian(delta, cd);
            out.push_back(std::move(cd));
        }
    }

    CriticalDatum bott;
    bott.kind = CriticalKind::Bott;
    bott.half_space = HalfSpace::Zero;
    bott.manifold_dim = d.n - 1;
    if (d.n == 2) {
        for (const auto& c : d.components)
            for (const auto& v : c.verts) bott.bott_samples.push_back(delta.join(v.p.z, v.p.z));
    } else {
        for (const auto& p : d.surface) bott.bott_samples.push_back(delta.join(p.z, p.z));
    }
    if (!bott.bott_samples.empty()) {
        bott.point = bott.bott_samples.front();
        bott.value = delta.eval(bott.point);
        Eigen::VectorXd ev = spectrum(delta, bott.point);
        double thr = degeneracy_threshold(ev);
        for (int i = 0; i < ev.size(); ++i)
            if (ev(i) < -thr) ++bott.index;
        out.push_back(std::move(bott));
    }
    return out;
}

BottCheck verify_bott(const DifferenceFunction& delta, const CriticalDatum& bott, int samples) {
    BottCheck r;
    const int M = static_cast<int>(bott.bott_samples.size());
    if (M == 0 || samples <= 0) return r;
    r.min_kernel = 1 << 20;
    const int count = std::min(samples, M);
    for (int i = 0; i < count; ++i) {
        const Vec& w = bott.bott_samples[static_cast<size_t>(i) * M / count];
        r.max_grad = std::max(r.max_grad, delta.grad(w).norm());
        Eigen::VectorXd ev = spectrum(delta, w);
        double thr = degeneracy_threshold(ev);
        int ker = 0;
        for (int j = 0; j < ev.size(); ++j)
            if (std::abs(ev(j)) < thr) ++ker;
        r.min_kernel = std::min(r.min_kernel, ker);
        r.max_kernel = std::max(r.max_kernel, ker);
    }
    r.samples = count;
    r.ok = r.max_grad < 100 * grad_tol(delta) && r.min_kernel == bott.manifold_dim &&
           r.max_kernel == bott.manifold_dim;
    return r;
}

CrossingPath crossing_path(std::shared_ptr<const GeneratingFamily> f, const SliceDiagram& d,
                           const CriticalDatum& cd) {
    if (cd.kind != CriticalKind::Isolated || cd.source_crossing < 0 ||
        cd.source_crossing >= static_cast<int>(d.double_points.size()))
        throw Error(ErrorKind::InvalidPath, "a crossing path needs an isolated point with its crossing");
    if (d.n != 2) throw Error(ErrorKind::UnsupportedDimension, "crossing paths need n = 2");
    const Crossing& cr = d.double_points[cd.source_crossing];
    DifferenceFunction df(f, d.height);
    // the path ends at (x, x_n, e); the end with the larger x_n is the over strand
    bool end_over = df.xn(cd.point) > df.xn_tilde(cd.point);
    const FiberCriticalPoint& start = end_over ? cr.under : cr.over;
    const FiberCriticalPoint& end = end_over ? cr.over : cr.under;
    const CurveParam& s_at = end_over ? cr.under_at : cr.over_at;
    const CurveParam& e_at = end_over ? cr.over_at : cr.under_at;
    CrossingPath path;
    path.crossing = cd.source_crossing;
    path.samples = arc_samples(f, d, s_at, start, e_at, end);
    return path;
}

double critical_value_via_path(const CrossingPath& path) {
    if (path.samples.size() < 2) return 0.0;
    Vec a = path.samples.front().p.projection(), b = path.samples.back().p.projection();
    double big = 0;
    for (const auto& s : path.samples) big = std::max(big, s.p.projection().norm());
    if ((a - b).norm() > 1e-6 * (1 + big))
        throw Error(ErrorKind::InvalidPath, "path endpoints do not project to the same point");
    return path_ydx(path.samples);
}

int morse_index_maslov(CrossingPath& path, int N) {
    if (path.crossing < 0 || path.samples.size() < 2)
        throw Error(ErrorKind::InvalidPath, "Maslov index needs a path between crossing preimages");
    const double pi = std::numbers::pi;
    double total = 0;
    for (size_t k = 0; k < path.samples.size(); ++k)
        if (path.samples[k].dP.size() != 2)
            throw Error(ErrorKind::UnsupportedDimension, "Maslov tracking implemented for n = 2 only");
    for (size_t k = 0; k + 1 < path.samples.size(); ++k) {
        const Vec& u = path.samples[k].dP;
        const Vec& v = path.samples[k + 1].dP;
        double step = std::atan2(u(0) * v(1) - u(1) * v(0), u.dot(v));
        if (std::abs(step) > pi / 2)
            throw Error(ErrorKind::UndersampledPath,
                        "tangent turns by more than pi/2 between samples");
        total += step;
    }
    const Vec& t0 = path.samples.front().dP;
    const Vec& t1 = path.samples.back().dP;
    // clockwise rotation of the end line onto the start line
    double close = std::fmod(std::atan2(t1(1), t1(0)) - std::atan2(t0(1), t0(0)), pi);
    if (close < 0) close += pi;
    total -= close;
    int mu = static_cast<int>(std::lround(total / pi));
    path.maslov_closed = mu;
    return -mu + N + 1;
}

} // namespace gfcap
