#include "gfcap/slice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <unordered_map>

#include "gfcap/difference.hpp"

namespace gfcap {

Vec FiberCriticalPoint::projection() const {
    const int m = n() - 1;
    Vec p(2 * m);
    p.head(m) = z.head(m);
    p.tail(m) = y;
    return p;
}

namespace {

// Defining equations of Sigma_{F_a} restricted to {dF/dx_n = a}: H(z) = (dF_a/dx_n, dF_a/de).
struct SliceSystem {
    ShearedFamily fa;
    int n, N;
    double tol;

    SliceSystem(std::shared_ptr<const GeneratingFamily> f, double a)
        : fa{f, a}, n(f->base_dim), N(f->fiber_dim), tol(1e-11 * (1 + f->scale * f->scale)) {}

    Vec H(const Vec& z) const { return fa.grad(z).tail(1 + N); }
    Mat J(const Vec& z) const { return fa.hess(z).bottomRows(1 + N); }

    FiberCriticalPoint point(const Vec& z) const {
        FiberCriticalPoint p;
        p.z = z;
        p.y = fa.parent->gradient(z).head(n - 1);
        return p;
    }

    // Newton projection onto the curve with minimum-norm steps.
    bool correct(Vec& z, double max_move) const {
        const Vec z0 = z;
        for (int it = 0; it < 40; ++it) {
            Vec h = H(z);
            if (h.norm() < tol) return (z - z0).norm() <= max_move;
            Mat j = J(z);
            Mat jj = j * j.transpose();
            Vec dz = j.transpose() * jj.ldlt().solve(h);
            if (!dz.allFinite()) return false;
            z -= dz;
            if ((z - z0).norm() > max_move) return false;
        }
        return H(z).norm() < 100 * tol;
    }

    // fiber Newton: solve dF/de = 0 in e for fixed (x, x_n)
    bool solve_fiber(Vec& z) const {
        if (N == 0) return true;
        for (int it = 0; it < 40; ++it) {
            Vec g = fa.grad(z).tail(N);
            if (g.norm() < tol) return true;
            Mat h = fa.hess(z).bottomRightCorner(N, N);
            Vec de = h.fullPivLu().solve(g);
            if (!de.allFinite()) return false;
            z.tail(N) -= de;
        }
        return fa.grad(z).tail(N).norm() < 100 * tol;
    }

    double sigma_min(const Vec& z) const {
        Eigen::JacobiSVD<Mat> svd(J(z));
        return svd.singularValues()(svd.singularValues().size() - 1);
    }

    // unit kernel vector of J with det[J; t^T] > 0 (n = 2 only)
    Vec tangent(const Vec& z) const {
        Mat j = J(z);
        Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeFullV);
        Vec t = svd.matrixV().col(j.cols() - 1);
        Mat m(j.cols(), j.cols());
        m.topRows(j.rows()) = j;
        m.bottomRows(1) = t.transpose();
        if (m.determinant() < 0) t = -t;
        return t;
    }

    void check_transverse(const Vec& z) const {
        Mat j = J(z);
        Eigen::JacobiSVD<Mat> svd(j);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) < 1e-8 * (1 + sv(0)))
            throw Error(ErrorKind::NonTransverseSlice,
                        "defining equations drop rank at height a=" + std::to_string(fa.height) +
                            "; choose a nearby generic height");
    }
};

Vec proj_tangent(const ShearedFamily& fa, const Vec& z, const Vec& t) {
    const int m = fa.base_dim() - 1;
    Vec d(2 * m);
    d.head(m) = t.head(m);
    d.tail(m) = fa.hess(z).topRows(m) * t;
    return d;
}

struct Bucket {
    double cell;
    std::unordered_map<long long, std::vector<int>> map;

    static long long key(long long i, long long j) { return (i << 32) ^ (j & 0xffffffffLL); }
    long long idx(double v) const { return static_cast<long long>(std::floor(v / cell)); }
    void insert(double x, double y, int id) { map[key(idx(x), idx(y))].push_back(id); }
    template <class F>
    void near(double x, double y, F&& fn) const {
        long long i = idx(x), j = idx(y);
        for (long long a = i - 1; a <= i + 1; ++a)
            for (long long b = j - 1; b <= j + 1; ++b) {
                auto it = map.find(key(a, b));
                if (it == map.end()) continue;
                for (int id : it->second) fn(id);
            }
    }
};

SliceComponent trace(const SliceSystem& sys, const Vec& seed, double h0) {
    SliceComponent comp;
    Vec z = seed;
    Vec t = sys.tangent(z);
    const Vec z0 = z, t0 = t;
    comp.verts.push_back({sys.point(z), 0.0, t});
    double h = h0, s = 0;
    const int max_steps = 2000000;
    for (int step = 0; step < max_steps; ++step) {
        Vec zp = z + h * t;
        bool ok = sys.correct(zp, 0.5 * h);
        Vec tn;
        double ang = 0, dist = 0;
        if (ok) {
            tn = sys.tangent(zp);
            ang = std::acos(std::clamp(t.dot(tn), -1.0, 1.0));
            dist = (zp - z).norm();
            ok = ang < 0.1 && dist < 1.5 * h;
        }
        if (!ok) {
            h *= 0.5;
            if (h < 1e-5 * h0)
                throw Error(ErrorKind::NonTransverseSlice,
                            "continuation stalled at height a=" + std::to_string(sys.fa.height));
            continue;
        }
        // closure: the chord z -> zp passes the start point
        if (s > 4 * h0 && t.dot(t0) > 0) {
            Vec c = zp - z;
            double tau = (z0 - z).dot(c) / c.squaredNorm();
            if (tau > 0 && tau <= 1 && (z + tau * c - z0).norm() < 0.1 * h + 1e-9) {
                if (tau < 0.2 && comp.verts.size() > 3) comp.verts.pop_back();
                return comp;
            }
        }
        s += dist;
        z = zp;
        t = tn;
        sys.check_transverse(z);
        comp.verts.push_back({sys.point(z), s, t});
        if (ang < 0.03) h = std::min(1.5 * h, h0);
    }
    throw Error(ErrorKind::NonTransverseSlice,
                "slice component did not close at height a=" + std::to_string(sys.fa.height));
}

std::vector<Vec> scan_seeds_2d(const SliceSystem& sys, double L, int cells) {
    const double hc = 2 * L / cells;
    const int M = cells + 1;
    std::vector<double> g(M * M);
    std::vector<Vec> zs(M * M);
    const int dim = sys.n + sys.N;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            Vec z = Vec::Zero(dim);
            z(0) = -L + i * hc;
            z(1) = -L + j * hc;
            sys.solve_fiber(z);
            zs[i * M + j] = z;
            g[i * M + j] = sys.fa.grad(z)(1);
        }
    std::vector<Vec> seeds;
    auto edge = [&](int p, int q) {
        if ((g[p] > 0) == (g[q] > 0)) return;
        Vec lo = zs[p], hi = zs[q];
        double glo = g[p];
        for (int it = 0; it < 40; ++it) {
            Vec mid = 0.5 * (lo + hi);
            sys.solve_fiber(mid);
            double gm = sys.fa.grad(mid)(1);
            if ((gm > 0) == (glo > 0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        Vec z = 0.5 * (lo + hi);
        if (sys.correct(z, hc)) seeds.push_back(z);
    };
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            if (i + 1 < M) edge(i * M + j, (i + 1) * M + j);
            if (j + 1 < M) edge(i * M + j, i * M + j + 1);
        }
    return seeds;
}

SliceDiagram extract_planar(std::shared_ptr<const GeneratingFamily> f, double a, const GridSpec& grid) {
    SliceSystem sys(f, a);
    SliceDiagram d;
    d.n = 2;
    d.N = f->fiber_dim;
    d.height = a;
    const double h0 = grid.step > 0 ? grid.step : 0.01 * f->scale;
    d.step = h0;
    const double L = grid.half_width > 0 ? grid.half_width : f->support_radius;
    std::vector<Vec> seeds = scan_seeds_2d(sys, L, grid.cells);

    Bucket traced{2 * h0, {}};
    std::vector<Vec> pts;
    for (const Vec& sd : seeds) {
        bool seen = false;
        traced.near(sd(0), sd(1), [&](int id) {
            if ((pts[id] - sd).norm() < 1.5 * h0) seen = true;
        });
        if (seen) continue;
        sys.check_transverse(sd);
        SliceComponent c = trace(sys, sd, h0);
        for (const auto& v : c.verts) {
            pts.push_back(v.p.z);
            traced.insert(v.p.z(0), v.p.z(1), static_cast<int>(pts.size()) - 1);
        }
        d.components.push_back(std::move(c));
    }
    return d;
}

// Refine a pair of preimages to a critical point of Delta_a.
bool refine_crossing(const DifferenceFunction& df, Vec& w) {
    for (int it = 0; it < 60; ++it) {
        Vec g = df.grad(w);
        if (g.norm() < 1e-11 * (1 + df.family().scale * df.family().scale)) return true;
        Vec dw = df.hess(w).fullPivLu().solve(g);
        if (!dw.allFinite()) return false;
        double lim = 0.5 * df.family().scale;
        if (dw.norm() > lim) dw *= lim / dw.norm();
        w -= dw;
    }
    return false;
}

struct Seg {
    int comp, seg;
    Vec p0, p1;
};

std::vector<Crossing> planar_crossings(std::shared_ptr<const GeneratingFamily> f, const SliceDiagram& d,
                                       const GridSpec& grid) {
    std::vector<Seg> segs;
    double maxlen = 0;
    for (int c = 0; c < static_cast<int>(d.components.size()); ++c) {
        const auto& vs = d.components[c].verts;
        const int m = static_cast<int>(vs.size());
        for (int i = 0; i < m; ++i) {
            Seg s{c, i, vs[i].p.projection(), vs[(i + 1) % m].p.projection()};
            maxlen = std::max(maxlen, (s.p1 - s.p0).norm());
            segs.push_back(std::move(s));
        }
    }
    std::vector<Crossing> out;
    if (segs.empty()) return out;
    Bucket b{std::max(maxlen, 1e-9), {}};
    for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
        Vec mid = 0.5 * (segs[i].p0 + segs[i].p1);
        b.insert(mid(0), mid(1), i);
    }
    auto adjacent = [&](const Seg& s, const Seg& t) {
        if (s.comp != t.comp) return false;
        int m = static_cast<int>(d.components[s.comp].verts.size());
        int k = std::abs(s.seg - t.seg);
        return k <= 1 || k == m - 1;
    };
    std::set<std::pair<int, int>> tested;
    struct Raw {
        int i, j;
        double u, v;
    };
    std::vector<Raw> raws;
    for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
        Vec mid = 0.5 * (segs[i].p0 + segs[i].p1);
        b.near(mid(0), mid(1), [&](int j) {
            if (j <= i || adjacent(segs[i], segs[j])) return;
            const Seg& s = segs[i];
            const Seg& t = segs[j];
            Eigen::Vector2d r = (s.p1 - s.p0).head<2>(), q = (t.p1 - t.p0).head<2>();
            Eigen::Vector2d w = (t.p0 - s.p0).head<2>();
            double den = r.x() * q.y() - r.y() * q.x();
            if (den == 0) return;
            double u = (w.x() * q.y() - w.y() * q.x()) / den;
            double v = (w.x() * r.y() - w.y() * r.x()) / den;
            if (u < 0 || u >= 1 || v < 0 || v >= 1) return;
            raws.push_back({i, j, u, v});
        });
    }

    const double scale = f ? f->scale : 1.0;
    for (const Raw& r : raws) {
        const Seg& s = segs[r.i];
        const Seg& t = segs[r.j];
        const auto& vs = d.components[s.comp].verts;
        const auto& vt = d.components[t.comp].verts;
        auto lerp = [](const SliceVertex& a, const SliceVertex& b, double u) {
            return Vec((1 - u) * a.p.z + u * b.p.z);
        };
        Vec za = lerp(vs[s.seg], vs[(s.seg + 1) % vs.size()], r.u);
        Vec zb = lerp(vt[t.seg], vt[(t.seg + 1) % vt.size()], r.v);
        Crossing cr;
        CurveParam pa{s.comp, s.seg, r.u}, pb{t.comp, t.seg, r.v};
        Vec ta, tb;
        FiberCriticalPoint qa, qb;
        if (f) {
            DifferenceFunction df(f, d.height);
            Vec zmid = za;
            zmid.head(1) = 0.5 * (za.head(1) + zb.head(1));
            Vec w = df.join(zmid, zb);
            if (!refine_crossing(df, w))
                throw Error(ErrorKind::DegenerateCrossing,
                            "crossing refinement failed near x=" + std::to_string(zmid(0)) +
                                "; refine the grid or perturb the height");
            SliceSystem sys(f, d.height);
            qa = sys.point(df.first(w));
            qb = sys.point(df.second(w));
            ta = proj_tangent(sys.fa, qa.z, sys.tangent(qa.z));
            tb = proj_tangent(sys.fa, qb.z, sys.tangent(qb.z));
        } else {
            qa.z = za;
            qa.y = ((1 - r.u) * vs[s.seg].p.y + r.u * vs[(s.seg + 1) % vs.size()].p.y);
            qb.z = zb;
            qb.y = ((1 - r.v) * vt[t.seg].p.y + r.v * vt[(t.seg + 1) % vt.size()].p.y);
            ta = s.p1 - s.p0;
            tb = t.p1 - t.p0;
        }
        if (std::abs(qa.xn() - qb.xn()) < 1e-6 * scale)
            throw Error(ErrorKind::DegenerateCrossing,
                        "crossing preimages share x_n; refine the grid or perturb the height");
        bool a_over = qa.xn() > qb.xn();
        cr.over = a_over ? qa : qb;
        cr.under = a_over ? qb : qa;
        cr.over_at = a_over ? pa : pb;
        cr.under_at = a_over ? pb : pa;
        const Vec& to = a_over ? ta : tb;
        const Vec& tu = a_over ? tb : ta;
        double det = to(0) * tu(1) - to(1) * tu(0);
        double sine = std::abs(det) / (to.norm() * tu.norm());
        if (sine < grid.degenerate_sine)
            throw Error(ErrorKind::DegenerateCrossing,
                        "near-tangential crossing (sin angle " + std::to_string(sine) +
                            "); refine the grid or perturb the height");
        cr.sign = det > 0 ? 1 : -1;
        cr.angle = std::asin(std::min(1.0, sine));
        cr.position = cr.over.projection();
        bool dup = false;
        for (const auto& o : out)
            if ((o.position - cr.position).norm() < 1e-6 * scale &&
                std::abs(o.over.xn() - cr.over.xn()) < 1e-6 * scale)
                dup = true;
        if (!dup) out.push_back(std::move(cr));
    }
    std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) {
        if (a.position(0) != b.position(0)) return a.position(0) < b.position(0);
        return a.position(1) < b.position(1);
    });
    return out;
}

// ---- n = 3: the slice is a sphere, parametrized radially from a centroid.

SliceDiagram extract_sphere(std::shared_ptr<const GeneratingFamily> f, double a, const GridSpec& grid) {
    SliceSystem sys(f, a);
    SliceDiagram d;
    d.n = 3;
    d.N = f->fiber_dim;
    d.height = a;
    const int dim = 3 + d.N;
    const double L = grid.half_width > 0 ? grid.half_width : f->support_radius;
    const int C = std::max(16, std::min(grid.cells, 64));
    const double hc = 2 * L / C;

    // seeds: sign changes of dF_a/dx_3 along x_3 columns
    std::vector<Vec> seeds;
    for (int i = 0; i <= C; ++i)
        for (int j = 0; j <= C; ++j) {
            Vec prev;
            double gp = 0;
            for (int k = 0; k <= C; ++k) {
                Vec z = Vec::Zero(dim);
                z(0) = -L + i * hc;
                z(1) = -L + j * hc;
                z(2) = -L + k * hc;
                sys.solve_fiber(z);
                double g = sys.fa.grad(z)(2);
                if (k > 0 && (g > 0) != (gp > 0)) {
                    Vec zz = 0.5 * (z + prev);
                    if (sys.correct(zz, hc)) seeds.push_back(zz);
                }
                prev = z;
                gp = g;
            }
        }
    if (seeds.empty()) return d;

    Vec center = Vec::Zero(3);
    double rho0 = 0;
    for (const Vec& s : seeds) center += s.head(3);
    center /= static_cast<double>(seeds.size());
    for (const Vec& s : seeds) rho0 += (s.head(3) - center).norm();
    rho0 /= static_cast<double>(seeds.size());

    // radial Newton in (rho, e)
    auto radial = [&](const Vec& dir, double rho, Vec e) -> Vec {
        Vec z(dim);
        for (int it = 0; it < 60; ++it) {
            z.head(3) = center + rho * dir;
            z.tail(d.N) = e;
            Vec h = sys.H(z);
            if (h.norm() < sys.tol) break;
            Mat j = sys.J(z);
            Mat A(1 + d.N, 1 + d.N);
            A.col(0) = j.leftCols(3) * dir;
            if (d.N > 0) A.rightCols(d.N) = j.rightCols(d.N);
            Vec step = A.fullPivLu().solve(h);
            if (!step.allFinite())
                throw Error(ErrorKind::NonTransverseSlice, "radial solve singular at height a=" +
                                                               std::to_string(a));
            rho -= step(0);
            if (d.N > 0) e -= step.tail(d.N);
        }
        z.head(3) = center + rho * dir;
        z.tail(d.N) = e;
        if (sys.H(z).norm() > 100 * sys.tol || rho <= 0)
            throw Error(ErrorKind::NonTransverseSlice,
                        "slice is not star-shaped about its centroid at height a=" + std::to_string(a));
        sys.check_transverse(z);
        return z;
    };

    const int R = std::max(4, grid.sphere_rings);
    const double pi = std::numbers::pi;
    Vec e0 = Vec::Zero(d.N);
    for (int pole = 0; pole < 2; ++pole) {
        Vec dir(3);
        dir << 0, 0, pole == 0 ? 1 : -1;
        d.surface.push_back(sys.point(radial(dir, rho0, e0)));
    }
    for (int i = 1; i < R; ++i) {
        double th = pi * i / R;
        SliceComponent ring;
        double s = 0;
        Vec prev;
        for (int j = 0; j < 2 * R; ++j) {
            double ph = pi * j / R;
            Vec dir(3);
            dir << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
            Vec z = radial(dir, rho0, e0);
            if (j > 0) s += (z - prev).norm();
            prev = z;
            FiberCriticalPoint p = sys.point(z);
            d.surface.push_back(p);
            ring.verts.push_back({p, s, Vec()});
        }
        d.components.push_back(std::move(ring));
    }
    return d;
}

std::vector<Crossing> sphere_crossings(std::shared_ptr<const GeneratingFamily> f, const SliceDiagram& d) {
    std::vector<Crossing> out;
    const auto& S = d.surface;
    if (S.size() < 2) return out;
    // typical sample spacing in the projection
    double spacing = 0;
    int cnt = 0;
    for (const auto& c : d.components)
        for (size_t i = 1; i < c.verts.size(); ++i, ++cnt)
            spacing += (c.verts[i].p.projection() - c.verts[i - 1].p.projection()).norm();
    spacing = cnt ? spacing / cnt : f->scale;
    double zspan = 0;
    for (const auto& p : S) zspan = std::max(zspan, (p.z.head(3) - S[0].z.head(3)).norm());
    const double near_p = 2 * spacing;
    DifferenceFunction df(f, d.height);
    SliceSystem sys(f, d.height);
    for (size_t i = 0; i < S.size(); ++i) {
        Vec pi = S[i].projection();
        for (size_t j = i + 1; j < S.size(); ++j) {
            if ((S[j].projection() - pi).norm() > near_p) continue;
            if ((S[j].z - S[i].z).norm() < 0.25 * zspan) continue;
            Vec w = df.join(S[i].z, S[j].z);
            w.head(2) = 0.5 * (S[i].z.head(2) + S[j].z.head(2));
            if (!refine_crossing(df, w)) continue;
            FiberCriticalPoint qa = sys.point(df.first(w)), qb = sys.point(df.second(w));
            if (std::abs(qa.xn() - qb.xn()) < 1e-6 * f->scale) continue;
            Crossing cr;
            bool a_over = qa.xn() > qb.xn();
            cr.over = a_over ? qa : qb;
            cr.under = a_over ? qb : qa;
            cr.over_at = cr.under_at = CurveParam{-1, 0, 0};
            cr.sign = 0;
            cr.position = cr.over.projection();
            bool dup = false;
            for (const auto& o : out)
                if ((o.position - cr.position).norm() < 1e-6 * f->scale) dup = true;
            if (!dup) out.push_back(std::move(cr));
        }
    }
    return out;
}

// Nodes from `from` to `to` going forward; equal params mean the full loop.
std::vector<PathSample> arc_nodes(const ShearedFamily* fa, const SliceDiagram& d, const CurveParam& from,
                                  const FiberCriticalPoint& p_from, const CurveParam& to,
                                  const FiberCriticalPoint& p_to) {
    const auto& vs = d.components.at(from.comp).verts;
    const int M = static_cast<int>(vs.size());
    int k = ((to.seg - from.seg) % M + M) % M;
    if (k == 0 && to.frac <= from.frac) k = M;
    std::vector<PathSample> nodes;
    auto push = [&](const FiberCriticalPoint& p, const Vec& t) {
        PathSample nd;
        nd.p = p;
        if (fa) nd.dP = proj_tangent(*fa, p.z, t);
        nodes.push_back(std::move(nd));
    };
    std::optional<SliceSystem> sys;
    if (fa) sys.emplace(fa->parent, fa->height);
    push(p_from, fa ? sys->tangent(p_from.z) : Vec());
    for (int i = 1; i <= k; ++i) {
        const auto& v = vs[(from.seg + i) % M];
        push(v.p, v.t);
    }
    push(p_to, fa ? sys->tangent(p_to.z) : Vec());
    return nodes;
}

} // namespace

// Cubic Hermite in each segment with 3-point Gauss-Legendre; linear when tangents are absent.
void path_integrals(const std::vector<PathSample>& nodes, double& ydx, double& xdy) {
    static const double gx[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
    static const double gw[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    ydx = xdy = 0;
    for (size_t k = 0; k + 1 < nodes.size(); ++k) {
        const PathSample& A = nodes[k];
        const PathSample& B = nodes[k + 1];
        Eigen::Vector2d p0 = A.p.projection().head<2>(), p1 = B.p.projection().head<2>();
        if (A.dP.size() != 2 || B.dP.size() != 2) {
            ydx += 0.5 * (p0.y() + p1.y()) * (p1.x() - p0.x());
            xdy += 0.5 * (p0.x() + p1.x()) * (p1.y() - p0.y());
            continue;
        }
        double L = (B.p.z - A.p.z).norm();
        Eigen::Vector2d m0 = L * A.dP.head<2>(), m1 = L * B.dP.head<2>();
        for (int q = 0; q < 3; ++q) {
            double t = gx[q], t2 = t * t, t3 = t2 * t;
            Eigen::Vector2d P = (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 +
                                (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
            Eigen::Vector2d D = (6 * t2 - 6 * t) * p0 + (3 * t2 - 4 * t + 1) * m0 +
                                (-6 * t2 + 6 * t) * p1 + (3 * t2 - 2 * t) * m1;
            ydx += gw[q] * P(1) * D(0);
            xdy += gw[q] * P(0) * D(1);
        }
    }
}

double path_ydx(const std::vector<PathSample>& path) {
    double ydx, xdy;
    path_integrals(path, ydx, xdy);
    return ydx;
}

std::vector<PathSample> arc_samples(std::shared_ptr<const GeneratingFamily> f, const SliceDiagram& d,
                                    const CurveParam& from, const FiberCriticalPoint& p_from,
                                    const CurveParam& to, const FiberCriticalPoint& p_to) {
    if (d.n != 2) throw Error(ErrorKind::UnsupportedDimension, "arc sampling needs n = 2");
    if (from.comp != to.comp) throw Error(ErrorKind::InvalidPath, "path endpoints on different components");
    std::optional<ShearedFamily> fa;
    if (f) fa = ShearedFamily{f, d.height};
    return arc_nodes(fa ? &*fa : nullptr, d, from, p_from, to, p_to);
}

Vec projected_tangent(std::shared_ptr<const GeneratingFamily> f, const FiberCriticalPoint& p,
                      const Vec& t) {
    return proj_tangent(ShearedFamily{f, 0.0}, p.z, t);
}

std::vector<Crossing> double_points(std::shared_ptr<const GeneratingFamily> f, const SliceDiagram& d,
                                    const GridSpec& grid) {
    if (d.n == 2) return planar_crossings(f, d, grid);
    if (!f) return {};
    return sphere_crossings(f, d);
}

double integrate_ydx(std::shared_ptr<const GeneratingFamily> f, const SliceDiagram& d,
                     const CurveParam& from, const FiberCriticalPoint& p_from, const CurveParam& to,
                     const FiberCriticalPoint& p_to) {
    return path_ydx(arc_samples(f, d, from, p_from, to, p_to));
}

int writhe(const SliceDiagram& d) {
    int w = 0;
    for (const auto& c : d.double_points) w += c.sign;
    return w;
}

bool euler_obstruction(int writhe_low, int writhe_high, int chi) {
    return writhe_high - writhe_low == chi;
}

bool euler_obstruction(const SliceDiagram& low, const SliceDiagram& high, int chi) {
    return euler_obstruction(writhe(low), writhe(high), chi);
}

namespace {

void fill_planar_data(std::shared_ptr<const GeneratingFamily> f, SliceDiagram& d) {
    std::optional<ShearedFamily> fa;
    if (f) fa = ShearedFamily{f, d.height};
    const ShearedFamily* fp = fa ? &*fa : nullptr;

    // winding: turning of the projected tangent
    double turn = 0;
    d.total_signed_area = 0;
    for (int c = 0; c < static_cast<int>(d.components.size()); ++c) {
        const auto& vs = d.components[c].verts;
        const int M = static_cast<int>(vs.size());
        std::vector<Vec> tang(M);
        for (int i = 0; i < M; ++i)
            tang[i] = fp ? proj_tangent(*fp, vs[i].p.z, vs[i].t)
                         : Vec(vs[(i + 1) % M].p.projection() - vs[i].p.projection());
        for (int i = 0; i < M; ++i) {
            const Vec& u = tang[i];
            const Vec& v = tang[(i + 1) % M];
            turn += std::atan2(u(0) * v(1) - u(1) * v(0), u.dot(v));
        }
        CurveParam start{c, 0, 0};
        auto nodes = arc_nodes(fp, d, start, vs[0].p, start, vs[0].p);
        double ydx, xdy;
        path_integrals(nodes, ydx, xdy);
        d.total_signed_area += 0.5 * (xdy - ydx);
    }
    d.winding = static_cast<int>(std::lround(turn / (2 * std::numbers::pi)));
    d.writhe = writhe(d);

    // lobes: arcs between consecutive crossing passages
    d.lobes.clear();
    d.lobe_areas.clear();
    struct Passage {
        CurveParam at;
        FiberCriticalPoint p;
        int crossing;
    };
    for (int c = 0; c < static_cast<int>(d.components.size()); ++c) {
        std::vector<Passage> ps;
        for (int k = 0; k < static_cast<int>(d.double_points.size()); ++k) {
            const auto& cr = d.double_points[k];
            if (cr.over_at.comp == c) ps.push_back({cr.over_at, cr.over, k});
            if (cr.under_at.comp == c) ps.push_back({cr.under_at, cr.under, k});
        }
        std::sort(ps.begin(), ps.end(),
                  [](const Passage& a, const Passage& b) { return a.at.key() < b.at.key(); });
        const auto& vs = d.components[c].verts;
        if (ps.empty()) {
            Lobe lb;
            lb.comp = c;
            lb.loop = true;
            auto nodes = arc_nodes(fp, d, lb.from, vs[0].p, lb.to, vs[0].p);
            double ydx, xdy;
            path_integrals(nodes, ydx, xdy);
            lb.signed_area = 0.5 * (xdy - ydx);
            d.lobes.push_back(lb);
            d.lobe_areas.push_back(lb.signed_area);
            continue;
        }
        for (size_t i = 0; i < ps.size(); ++i) {
            const Passage& A = ps[i];
            const Passage& B = ps[(i + 1) % ps.size()];
            Lobe lb;
            lb.comp = c;
            lb.from = A.at;
            lb.to = B.at;
            lb.loop = A.crossing == B.crossing;
            lb.crossing = lb.loop ? A.crossing : -1;
            auto nodes = arc_nodes(fp, d, A.at, A.p, B.at, B.p);
            double ydx, xdy;
            path_integrals(nodes, ydx, xdy);
            Vec pe = B.p.projection(), pst = A.p.projection();
            lb.signed_area = 0.5 * (xdy - ydx) + 0.5 * (pe(0) * pst(1) - pe(1) * pst(0));
            d.lobes.push_back(lb);
            if (lb.loop) d.lobe_areas.push_back(lb.signed_area);
        }
    }
}

} // namespace

SliceDiagram extract_slice(std::shared_ptr<const GeneratingFamily> f, double a, const GridSpec& grid) {
    if (!f) throw Error(ErrorKind::InvalidParams, "no family");
    if (grid.cells < 8) throw Error(ErrorKind::InvalidParams, "grid needs at least 8 cells");
    if (f->base_dim == 2) {
        SliceDiagram d = extract_planar(f, a, grid);
        d.double_points = planar_crossings(f, d, grid);
        fill_planar_data(f, d);
        return d;
    }
    if (f->base_dim == 3) {
        SliceDiagram d = extract_sphere(f, a, grid);
        d.double_points = sphere_crossings(f, d);
        return d;
    }
    throw Error(ErrorKind::UnsupportedDimension, "slice extraction supports n = 2 and n = 3");
}

SliceDiagram circle_diagram(double r, int samples) {
    if (!(r > 0) || samples < 8) throw Error(ErrorKind::InvalidParams, "circle needs r > 0, 8+ samples");
    SliceDiagram d;
    d.n = 2;
    SliceComponent c;
    const double pi = std::numbers::pi;
    for (int i = 0; i < samples; ++i) {
        double th = 2 * pi * i / samples;
        FiberCriticalPoint p;
        p.z = Vec(2);
        p.z << r * std::cos(th), r * std::sin(th);
        p.y = Vec(1);
        p.y << r * std::sin(th);
        Vec t(2);
        t << -std::sin(th), std::cos(th);
        c.verts.push_back({p, r * th, t});
    }
    d.components.push_back(std::move(c));
    d.step = 2 * pi * r / samples;
    d.double_points = planar_crossings(nullptr, d, {});
    fill_planar_data(nullptr, d);
    return d;
}

} // namespace gfcap
