#include "gfcap/homology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace gfcap {

const char* region_name(Region r) {
    switch (r) {
    case Region::Full: return "full";
    case Region::Plus: return "plus";
    case Region::Minus: return "minus";
    }
    return "?";
}

const char* pair_kind_name(PairKind k) {
    switch (k) {
    case PairKind::Lower: return "lower";
    case PairKind::Upper: return "upper";
    case PairKind::Trivial: return "trivial";
    }
    return "?";
}

long long CubicalField::vertex_count() const {
    long long v = 1;
    for (const auto& a : axes) v *= static_cast<long long>(a.size());
    return v;
}

double CubicalField::vertex_value(const std::vector<int>& idx) const {
    long long flat = 0;
    for (int i = 0; i < dim; ++i) flat = flat * nodes(i) + idx[i];
    return values[flat];
}

double CubicalField::cell_variation(const Vec& g) const {
    std::vector<int> lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
        const auto& ax = axes[i];
        auto it = std::lower_bound(ax.begin(), ax.end(), g(i));
        int j = static_cast<int>(it - ax.begin());
        if (j == nodes(i)) j = nodes(i) - 1;
        if (j > 0 && std::abs(ax[j - 1] - g(i)) < std::abs(ax[j] - g(i))) --j;
        lo[i] = std::max(0, j - 1);
        hi[i] = std::min(nodes(i) - 1, j + 1);
    }
    double vmin = INFINITY, vmax = -INFINITY;
    std::vector<int> idx = lo;
    while (true) {
        double v = vertex_value(idx);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
        int i = dim - 1;
        while (i >= 0 && idx[i] == hi[i]) {
            idx[i] = lo[i];
            --i;
        }
        if (i < 0) break;
        ++idx[i];
    }
    return vmax - vmin;
}

namespace {

// n cells of geometric widths starting from h (growing only) that fill dist
std::vector<double> geometric_widths(double h, int n, double dist) {
    std::vector<double> w(n);
    if (n == 0) return w;
    if (n * h >= dist) {
        std::fill(w.begin(), w.end(), dist / n);
        return w;
    }
    auto total = [&](double r) {
        double s = 0, p = 1;
        for (int j = 0; j < n; ++j) s += h * (p *= r);
        return s;
    };
    double rl = 1, rh = 2;
    while (total(rh) < dist) rh *= 2;
    for (int it = 0; it < 200; ++it) {
        double rm = 0.5 * (rl + rh);
        (total(rm) < dist ? rl : rh) = rm;
    }
    double p = 1;
    for (int j = 0; j < n; ++j) w[j] = h * (p *= rl);
    double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x *= dist / s;
    return w;
}

// Uniform core [c0, c1] with nc cells, then graded zones outwards on both sides:
// zone i reaches +-reach[i] with cells[i] cells.
std::vector<double> zoned_axis(double c0, double c1, int nc, const std::vector<double>& reach,
                               const std::vector<int>& cells) {
    const double h = (c1 - c0) / nc;
    std::vector<double> right{c1}, left{c0};
    double hr = h, hl = h;
    for (size_t z = 0; z < reach.size(); ++z) {
        double dr = reach[z] - right.back(), dl = left.back() + reach[z];
        int k = cells[z];
        if (dr <= 0 || dl <= 0) throw Error(ErrorKind::InvalidParams, "grid zones out of order");
        for (double w : geometric_widths(hr, k, dr)) right.push_back(right.back() + (hr = w));
        for (double w : geometric_widths(hl, k, dl)) left.push_back(left.back() - (hl = w));
        right.back() = reach[z];
        left.back() = -reach[z];
    }
    std::vector<double> nodes(left.rbegin(), left.rend());
    for (int j = 1; j < nc; ++j) nodes.push_back(c0 + j * h);
    nodes.insert(nodes.end(), right.begin(), right.end());
    return nodes;
}

double family_max_abs(const GeneratingFamily& f) {
    const int n = f.base_dim;
    const int per = n == 2 ? 96 : 40;
    const double R = f.support_radius;
    double best = 0;
    std::vector<int> idx(n, 0);
    Vec z = Vec::Zero(f.dim());
    while (true) {
        for (int i = 0; i < n; ++i) z(i) = -R + 2 * R * idx[i] / per;
        best = std::max(best, std::abs(f.value(z)));
        int i = n - 1;
        while (i >= 0 && idx[i] == per) idx[i--] = 0;
        if (i < 0) break;
        ++idx[i];
    }
    return best;
}

} // namespace

CubicalField build_field(const DifferenceFunction& delta, int resolution, const SliceDiagram* diagram) {
    if (delta.N() != 0 || delta.dim() > 4)
        throw Error(ErrorKind::UnsupportedDimension,
                    "homology engine supports domain dimension <= 4 without fibers, got " +
                        std::to_string(delta.dim()));
    if (resolution < 16) throw Error(ErrorKind::InvalidParams, "resolution must be >= 16");
    const double a = delta.height();
    if (a == 0) throw Error(ErrorKind::InvalidParams, "height 0 is not generic for the homology engine");
    const GeneratingFamily& f = delta.family();
    const int n = delta.n();
    const int D = delta.dim();

    SliceDiagram local;
    if (!diagram) {
        local = extract_slice(delta.fa.parent, a);
        diagram = &local;
    }
    std::vector<CriticalDatum> crit = critical_points(delta, *diagram);
    double vcrit = 0;
    for (const auto& c : crit) vcrit = std::max(vcrit, std::abs(c.value));

    // core box: the slice, and at least the region where the family bends
    std::vector<double> bmin(n, -1.15 * f.scale), bmax(n, 1.15 * f.scale);
    auto grow = [&](const Vec& z) {
        for (int i = 0; i < n; ++i) {
            bmin[i] = std::min(bmin[i], z(i));
            bmax[i] = std::max(bmax[i], z(i));
        }
    };
    for (const auto& c : diagram->components)
        for (const auto& v : c.verts) grow(v.p.z);
    for (const auto& p : diagram->surface) grow(p.z);

    CubicalField fld;
    fld.dim = D;
    fld.height = a;
    fld.resolution = resolution;
    fld.theta = 1.25 * vcrit + 0.25 * f.scale * f.scale;
    fld.reliable_level = fld.theta;
    const double R = f.support_radius;
    const double fmax = family_max_abs(f);

    int nc = static_cast<int>(std::lround(0.5 * resolution));
    if ((resolution - nc) % 2) --nc;
    const int side = (resolution - nc) / 2;
    auto pad = [&](double w) { return std::max(0.05 * w, 2.5 * w / std::max(1, nc - 5)); };

    fld.axes.resize(D);
    for (int i = 0; i < n; ++i) {
        double w = bmax[i] - bmin[i];
        double c0 = bmin[i] - pad(w), c1 = bmax[i] + pad(w);
        double r = std::max({R, 1.01 * std::abs(c0), 1.01 * std::abs(c1)});
        if (i < n - 1) {
            // beyond the support Delta does not depend on x
            fld.axes[i] = zoned_axis(c0, c1, nc, {r}, {side});
        } else {
            // beyond the support Delta is affine in x_n; the far faces sit below -theta
            // or above theta wherever they carry critical points of the restriction
            int far = std::max(1, static_cast<int>(std::lround(0.3 * side)));
            double L = r + (fld.theta + fmax) / std::abs(a) + 0.05 * r;
            fld.axes[i] = zoned_axis(c0, c1, nc, {r, L}, {side - far, far});
            fld.axes[i + 1] = fld.axes[i];
        }
    }
    fld.core_begin.assign(D, side);
    fld.core_end.assign(D, side + nc);

    const long long V = fld.vertex_count();
    fld.values.resize(V);
    std::vector<int> idx(D, 0);
    Vec w(D);
    for (long long k = 0; k < V; ++k) {
        for (int i = 0; i < D; ++i) w(i) = fld.axes[i][idx[i]];
        // exact zero on the diagonal
        fld.values[k] = idx[D - 2] == idx[D - 1] ? 0.0 : delta.eval(w);
        for (int i = D - 1; i >= 0; --i) {
            if (++idx[i] < fld.nodes(i)) break;
            idx[i] = 0;
        }
    }
    auto [mn, mx] = std::minmax_element(fld.values.begin(), fld.values.end());
    fld.min_value = *mn;
    fld.max_value = *mx;
    return fld;
}

namespace {

// Plane cells at grid square (j, k), j on x_n and k on x~_n.
enum PlaneType : int { PV, PH, PVv, PDg, PTlo, PTup, PTYPES };

struct PlaneShape {
    int dim;
    int nv;
    int v[3][2];     // vertex offsets
    int nf;
    int f[3][3];     // faces: dj, dk, type
};

constexpr PlaneShape kPlane[PTYPES] = {
    {0, 1, {{0, 0}}, 0, {}},
    {1, 2, {{0, 0}, {1, 0}}, 2, {{0, 0, PV}, {1, 0, PV}}},
    {1, 2, {{0, 0}, {0, 1}}, 2, {{0, 0, PV}, {0, 1, PV}}},
    {1, 2, {{0, 0}, {1, 1}}, 2, {{0, 0, PV}, {1, 1, PV}}},
    {2, 3, {{0, 0}, {1, 0}, {1, 1}}, 3, {{0, 0, PH}, {1, 0, PVv}, {0, 0, PDg}}},
    {2, 3, {{0, 0}, {0, 1}, {1, 1}}, 3, {{0, 0, PVv}, {0, 1, PH}, {0, 0, PDg}}},
};

// Product of the doubled cubical lattice over the x axes with the cut plane grid.
struct Complex {
    int D, m;  // domain dim, number of x axes
    int P;     // plane nodes per axis
    std::vector<int> len;  // doubled lengths of the x axes
    std::vector<long long> xstride;
    long long xtotal = 1, total = 0;

    explicit Complex(const CubicalField& f) : D(f.dim), m(f.dim - 2), P(f.nodes(f.dim - 1)), len(m), xstride(m) {
        for (int i = m - 1; i >= 0; --i) {
            len[i] = 2 * f.nodes(i) - 1;
            xstride[i] = xtotal;
            xtotal *= len[i];
        }
        total = xtotal * P * P * PTYPES;
    }
    long long id(long long xid, int j, int k, int t) const {
        return ((xid * P + j) * P + k) * PTYPES + t;
    }
    void split(long long id, long long& xid, int& j, int& k, int& t) const {
        t = static_cast<int>(id % PTYPES);
        id /= PTYPES;
        k = static_cast<int>(id % P);
        id /= P;
        j = static_cast<int>(id % P);
        xid = id / P;
    }
    bool valid(int j, int k, int t) const {
        const int dj = t == PH || t == PDg || t == PTlo || t == PTup;
        const int dk = t == PVv || t == PDg || t == PTlo || t == PTup;
        return j + dj < P && k + dk < P;
    }
};

// symmetric difference of two ascending lists
void add_column(std::vector<int>& a, const std::vector<int>& b, std::vector<int>& tmp) {
    tmp.clear();
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) tmp.push_back(a[i++]);
        else if (b[j] < a[i]) tmp.push_back(b[j++]);
        else ++i, ++j;
    }
    tmp.insert(tmp.end(), a.begin() + i, a.end());
    tmp.insert(tmp.end(), b.begin() + j, b.end());
    a.swap(tmp);
}

} // namespace

PersistenceDiagram persistence(const CubicalField& field, Region region) {
    const Complex C(field);
    const int m = C.m;
    if (C.total > 60'000'000LL)
        throw Error(ErrorKind::InvalidParams, "cell complex too large; lower the resolution");

    // cell values (max over vertices), dimensions, region membership
    std::vector<double> val(C.total, INFINITY);
    std::vector<uint8_t> cdim(C.total, 0);
    std::vector<int> pos(C.total, -1);
    std::vector<int> cells;
    cells.reserve(C.total);
    std::vector<int> xc(m, 0);
    std::vector<long long> xcorner;
    const long long plane = static_cast<long long>(C.P) * C.P;
    for (long long xid = 0; xid < C.xtotal; ++xid) {
        // flat vertex offsets (times plane) of the x-cube's corners
        int dx = 0;
        for (int i = 0; i < m; ++i) dx += xc[i] & 1;
        xcorner.assign(1, 0);
        for (int i = 0; i < m; ++i) {
            std::vector<long long> next;
            for (long long base : xcorner) {
                next.push_back(base * field.nodes(i) + xc[i] / 2);
                if (xc[i] & 1) next.push_back(base * field.nodes(i) + xc[i] / 2 + 1);
            }
            xcorner.swap(next);
        }
        for (int j = 0; j < C.P; ++j)
            for (int k = 0; k < C.P; ++k)
                for (int t = 0; t < PTYPES; ++t) {
                    if (!C.valid(j, k, t)) continue;
                    const PlaneShape& ps = kPlane[t];
                    bool plus = true, minus = true;
                    for (int v = 0; v < ps.nv; ++v) {
                        int jj = j + ps.v[v][0], kk = k + ps.v[v][1];
                        if (jj > kk) plus = false;
                        if (jj < kk) minus = false;
                    }
                    const long long id = C.id(xid, j, k, t);
                    double best = -INFINITY;
                    for (long long xb : xcorner)
                        for (int v = 0; v < ps.nv; ++v)
                            best = std::max(best, field.values[xb * plane + (j + ps.v[v][0]) * C.P +
                                                               k + ps.v[v][1]]);
                    val[id] = best;
                    cdim[id] = static_cast<uint8_t>(dx + ps.dim);
                    bool in = region == Region::Full || (region == Region::Plus ? plus : minus);
                    if (in) cells.push_back(static_cast<int>(id));
                }
        for (int i = m - 1; i >= 0; --i) {
            if (++xc[i] < C.len[i]) break;
            xc[i] = 0;
        }
    }
    std::sort(cells.begin(), cells.end(), [&](int a, int b) {
        if (val[a] != val[b]) return val[a] < val[b];
        if (cdim[a] != cdim[b]) return cdim[a] < cdim[b];
        return a < b;
    });
    const int M = static_cast<int>(cells.size());
    for (int p = 0; p < M; ++p) pos[cells[p]] = p;

    // faces of a cell as positions in the filtration (the region is closed under faces)
    auto faces = [&](long long id, std::vector<int>& out) {
        out.clear();
        long long xid;
        int j, k, t;
        C.split(id, xid, j, k, t);
        long long rest = xid;
        for (int i = 0; i < m; ++i) {
            int ci = static_cast<int>(rest / C.xstride[i]);
            rest %= C.xstride[i];
            if (!(ci & 1)) continue;
            out.push_back(pos[C.id(xid - C.xstride[i], j, k, t)]);
            out.push_back(pos[C.id(xid + C.xstride[i], j, k, t)]);
        }
        const PlaneShape& ps = kPlane[t];
        for (int f = 0; f < ps.nf; ++f)
            out.push_back(pos[C.id(xid, j + ps.f[f][0], k + ps.f[f][1], ps.f[f][2])]);
    };

    PersistenceDiagram pd;
    pd.region = region;
    pd.cells = M;
    const int D = field.dim;
    std::vector<int> pivot_col(M, -1);  // low -> column position
    std::vector<uint8_t> cleared(M, 0), is_death(M, 0), is_paired_birth(M, 0);
    std::vector<std::vector<int>> R(M);
    std::vector<int> col, tmp;

    for (int k = D; k >= 2; --k) {
        for (int p = 0; p < M; ++p) {
            const int id = cells[p];
            if (cdim[id] != k || cleared[p]) continue;
            faces(id, col);
            std::sort(col.begin(), col.end());
            while (!col.empty()) {
                int q = pivot_col[col.back()];
                if (q < 0) break;
                add_column(col, R[q], tmp);
            }
            if (col.empty()) continue;
            const int low = col.back();
            pivot_col[low] = p;
            cleared[low] = 1;
            is_death[p] = 1;
            is_paired_birth[low] = 1;
            const double b = val[cells[low]], d = val[id];
            if (d > b) pd.pairs.push_back({k - 1, b, d});
            R[p] = col;
        }
    }
    R.clear();
    R.shrink_to_fit();

    // dimension 0 by union-find with the elder rule
    std::vector<int> parent(M, -1), birth(M, -1);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int p = 0; p < M; ++p) {
        const int id = cells[p];
        if (cdim[id] == 0) {
            parent[p] = p;
            birth[p] = p;
            continue;
        }
        if (cdim[id] != 1 || cleared[p]) continue;
        faces(id, col);
        int ra = find(col[0]), rb = find(col[1]);
        if (ra == rb) continue;  // a 1-cycle that never dies
        // the younger component dies
        if (birth[ra] < birth[rb]) std::swap(ra, rb);
        is_death[p] = 1;
        is_paired_birth[birth[ra]] = 1;
        const double b = val[cells[birth[ra]]], d = val[id];
        if (d > b) pd.pairs.push_back({0, b, d});
        parent[ra] = rb;
    }
    for (int p = 0; p < M; ++p)
        if (!is_death[p] && !is_paired_birth[p])
            pd.pairs.push_back({cdim[cells[p]], val[cells[p]], INFINITY});
    std::sort(pd.pairs.begin(), pd.pairs.end(), [](const PersistencePair& a, const PersistencePair& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
    return pd;
}

int relative_rank(const PersistenceDiagram& pd, double sigma, double tau, int k) {
    int r = 0;
    for (const auto& p : pd.pairs) {
        if (p.dim == k && sigma < p.birth && p.birth <= tau && tau < p.death) ++r;
        if (p.dim == k - 1 && p.birth <= sigma && sigma < p.death && p.death <= tau) ++r;
    }
    return r;
}

const PersistenceDiagram& RankSweep::diagram(Region r) const {
    switch (r) {
    case Region::Plus: return plus;
    case Region::Minus: return minus;
    default: return full;
    }
}

int RankSweep::rank(PairKind kind, Region r, double level, int degree) const {
    const PersistenceDiagram& pd = diagram(r);
    switch (kind) {
    case PairKind::Lower: return relative_rank(pd, level, -eta, degree);
    case PairKind::Upper: return relative_rank(pd, eta, level, degree);
    case PairKind::Trivial: return relative_rank(pd, -theta, theta, degree);
    }
    return 0;
}

std::vector<double> RankSweep::events(PairKind kind, Region r, int degree, double lo, double hi) const {
    std::vector<double> cand;
    for (const auto& p : diagram(r).pairs) {
        if (p.dim != degree && p.dim != degree - 1) continue;
        if (p.birth > lo && p.birth < hi) cand.push_back(p.birth);
        if (!p.essential() && p.death > lo && p.death < hi) cand.push_back(p.death);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    std::vector<double> out;
    for (double v : cand)
        if (rank(kind, r, v, degree) != rank(kind, r, std::nextafter(v, -INFINITY), degree))
            out.push_back(v);
    return out;
}

double default_eta(const CubicalField& field, const std::vector<CriticalDatum>* morse) {
    double smallest = INFINITY;
    if (morse)
        for (const auto& c : *morse)
            if (c.kind == CriticalKind::Isolated && std::abs(c.value) > 1e-9 * (1 + field.theta))
                smallest = std::min(smallest, std::abs(c.value));
    if (smallest == INFINITY) smallest = field.theta;
    return 0.25 * smallest;
}

std::vector<double> default_levels(const CubicalField& field, double eta, int per_side) {
    std::vector<double> lv;
    const double th = field.theta;
    for (int i = 0; i < per_side; ++i) lv.push_back(-th + i * (th - eta) / per_side);
    for (int i = 1; i <= per_side; ++i) lv.push_back(eta + i * (th - eta) / per_side);
    return lv;
}

RankSweep rank_sweep(const CubicalField& field, double eta, const std::vector<double>& levels,
                     const std::vector<CriticalDatum>* morse) {
    if (!(eta > 0)) throw Error(ErrorKind::BadEta, "eta must be positive");
    if (morse)
        for (const auto& c : *morse)
            if (c.kind == CriticalKind::Isolated && std::abs(c.value) > 1e-9 * (1 + field.theta) &&
                std::abs(c.value) <= eta)
                throw Error(ErrorKind::BadEta, "critical value " + std::to_string(c.value) +
                                                   " lies within eta=" + std::to_string(eta) + " of 0");
    RankSweep s;
    s.height = field.height;
    s.eta = eta;
    s.theta = field.theta;
    s.reliable_level = field.reliable_level;
    s.domain_dim = field.dim;
    s.levels = levels;
    std::sort(s.levels.begin(), s.levels.end());
    s.full = persistence(field, Region::Full);
    s.plus = persistence(field, Region::Plus);
    s.minus = persistence(field, Region::Minus);
    for (Region r : {Region::Full, Region::Plus, Region::Minus}) {
        for (double lv : s.levels) {
            PairKind kind;
            if (lv < -eta) kind = PairKind::Lower;
            else if (lv > eta) kind = PairKind::Upper;
            else continue;
            for (int k = 0; k <= field.dim; ++k) s.rows.push_back({lv, kind, r, k, s.rank(kind, r, lv, k)});
        }
        for (int k = 0; k <= field.dim; ++k)
            s.rows.push_back({s.theta, PairKind::Trivial, r, k, s.rank(PairKind::Trivial, r, s.theta, k)});
    }
    return s;
}

std::vector<FilteredRow> filtered_groups(const RankSweep& sweep, int N) {
    std::vector<FilteredRow> out;
    for (const auto& r : sweep.rows) {
        if (r.region == Region::Full || r.pair == PairKind::Trivial) continue;
        FilteredRow f;
        f.level = r.level;
        f.lower = r.pair == PairKind::Lower;
        f.region = r.region;
        f.degree = r.degree - (f.lower ? N + 1 : N + 2);
        f.rank = r.rank;
        out.push_back(f);
    }
    return out;
}

} // namespace gfcap
