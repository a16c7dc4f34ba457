#include "gfcap/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gfcap {

std::string format_number(double v) {
    if (v == 0) return "0";  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s) {
    const std::string t = trim(s);
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0' || !std::isfinite(v))
        throw Error(ErrorKind::Config, "not a number: '" + s + "'");
    return v;
}

int dims_of(const std::vector<HeightAnalysis>& runs, int& N) {
    N = 0;
    for (const auto& r : runs) {
        if (!r.critical.empty() || !r.diagram.empty()) {
            N = r.diagram.N;
            return r.diagram.n;
        }
    }
    return runs.empty() ? 2 : runs.front().diagram.n;
}

} // namespace

void write_slice_csv(std::ostream& os, const std::vector<HeightAnalysis>& runs) {
    int N = 0;
    const int n = dims_of(runs, N);
    os << "height,component,s";
    for (int i = 1; i < n; ++i) os << ",x" << i;
    for (int i = 1; i < n; ++i) os << ",y" << i;
    os << ",x" << n;
    for (int i = 1; i <= N; ++i) os << ",e" << i;
    os << "\n";
    auto row = [&](double h, int comp, double s, const FiberCriticalPoint& p) {
        os << format_number(h) << "," << comp << "," << format_number(s);
        for (int i = 0; i < n - 1; ++i) os << "," << format_number(p.z(i));
        for (int i = 0; i < n - 1; ++i) os << "," << format_number(p.y(i));
        os << "," << format_number(p.z(n - 1));
        for (int i = 0; i < N; ++i) os << "," << format_number(p.z(n + i));
        os << "\n";
    };
    for (const auto& r : runs) {
        for (size_t c = 0; c < r.diagram.components.size(); ++c)
            for (const auto& v : r.diagram.components[c].verts) row(r.height, static_cast<int>(c), v.s, v.p);
        // sphere samples carry their index in place of an arclength
        for (size_t i = 0; i < r.diagram.surface.size(); ++i)
            row(r.height, 0, static_cast<double>(i), r.diagram.surface[i]);
    }
}

void write_critical_csv(std::ostream& os, const std::vector<HeightAnalysis>& runs) {
    int D = 0;
    for (const auto& r : runs)
        for (const auto& c : r.critical) D = std::max(D, static_cast<int>(c.point.size()));
    os << "height,kind,value,index,half_space,manifold_dim";
    for (int i = 1; i <= D; ++i) os << ",w" << i;
    os << "\n";
    for (const auto& r : runs)
        for (const auto& c : r.critical) {
            os << format_number(r.height) << "," << critical_kind_name(c.kind) << "," << format_number(c.value)
               << "," << c.index << "," << half_space_name(c.half_space) << "," << c.manifold_dim;
            for (int i = 0; i < D; ++i) os << "," << (i < c.point.size() ? format_number(c.point(i)) : "");
            os << "\n";
        }
}

void write_ranks_csv(std::ostream& os, const std::vector<HeightAnalysis>& runs) {
    os << "height,level,pair,region,degree,rank\n";
    for (const auto& r : runs) {
        if (!r.sweep) continue;
        for (const auto& row : r.sweep->rows)
            os << format_number(r.height) << "," << format_number(row.level) << "," << pair_kind_name(row.pair)
               << "," << region_name(row.region) << "," << row.degree << "," << row.rank << "\n";
    }
}

void write_capacities_csv(std::ostream& os, const std::vector<HeightAnalysis>& runs) {
    os << "height,method,degree,c_plus,c_minus,C_plus,C_minus,ambiguous,tolerance\n";
    for (const auto& r : runs)
        for (const auto* t : {r.fast ? &*r.fast : nullptr, r.swept ? &*r.swept : nullptr}) {
            if (!t) continue;
            for (const auto& row : t->rows)
                os << format_number(r.height) << "," << method_name(t->method) << "," << row.degree << ","
                   << format_number(row.c_plus) << "," << format_number(row.c_minus) << ","
                   << format_number(row.C_plus) << "," << format_number(row.C_minus) << ","
                   << (row.ambiguous ? 1 : 0) << "," << format_number(t->tolerance) << "\n";
        }
}

void write_diagram_svg(std::ostream& os, const std::vector<HeightAnalysis>& runs) {
    const double W = 640, H = 640, pad = 40;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto grow = [&](double x, double y) {
        x0 = std::min(x0, x), x1 = std::max(x1, x);
        y0 = std::min(y0, y), y1 = std::max(y1, y);
    };
    auto proj = [](const FiberCriticalPoint& p) { return std::pair<double, double>(p.z(0), p.y(0)); };
    for (const auto& r : runs) {
        for (const auto& c : r.diagram.components)
            for (const auto& v : c.verts) grow(proj(v.p).first, proj(v.p).second);
        for (const auto& p : r.diagram.surface) grow(proj(p).first, proj(p).second);
    }
    if (x0 > x1) x0 = -1, x1 = 1, y0 = -1, y1 = 1;
    const double sc = std::min((W - 2 * pad) / std::max(x1 - x0, 1e-9), (H - 2 * pad) / std::max(y1 - y0, 1e-9));
    auto X = [&](double x) { return format_number(std::round((pad + (x - x0) * sc) * 100) / 100); };
    auto Y = [&](double y) { return format_number(std::round((H - pad - (y - y0) * sc) * 100) / 100); };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const int R = static_cast<int>(runs.size());
    for (int i = 0; i < R; ++i) {
        const auto& r = runs[i];
        const auto& d = r.diagram;
        const int hue = R > 1 ? 220 * i / (R - 1) : 220;
        const std::string stroke = "hsl(" + std::to_string(hue) + ",70%,35%)";
        os << "<g id=\"height-" << i << "\"><title>y_n = " << format_number(r.height) << "</title>\n";
        // lobes: the closed arc from one crossing passage back to it
        for (const auto& lobe : d.lobes) {
            if (!lobe.loop || lobe.crossing < 0) continue;
            const auto& verts = d.components[lobe.comp].verts;
            const int M = static_cast<int>(verts.size());
            const auto& pos = d.double_points[lobe.crossing].position;
            os << "<path fill=\"" << (lobe.signed_area > 0 ? "#4a7bd0" : "#d04a4a")
               << "\" fill-opacity=\"0.18\" stroke=\"none\" d=\"M" << X(pos(0)) << " " << Y(pos(1));
            int j = (lobe.from.seg + 1) % M;
            for (int guard = 0; guard < M; ++guard) {
                auto p = proj(verts[j].p);
                os << " L" << X(p.first) << " " << Y(p.second);
                if (j == lobe.to.seg) break;
                j = (j + 1) % M;
            }
            os << " Z\"/>\n";
        }
        for (const auto& c : d.components) {
            os << "<path fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" d=\"";
            for (size_t j = 0; j < c.verts.size(); ++j) {
                auto p = proj(c.verts[j].p);
                os << (j ? " L" : "M") << X(p.first) << " " << Y(p.second);
            }
            os << " Z\"/>\n";
        }
        for (const auto& p : d.surface) {
            auto q = proj(p);
            os << "<circle cx=\"" << X(q.first) << "\" cy=\"" << Y(q.second) << "\" r=\"0.8\" fill=\"" << stroke
               << "\"/>\n";
        }
        for (const auto& cr : d.double_points) {
            const std::string col = cr.sign > 0 ? "#1a7f1a" : (cr.sign < 0 ? "#b01515" : "#555555");
            const char* lab = cr.sign > 0 ? "+" : (cr.sign < 0 ? "-" : "?");
            os << "<circle cx=\"" << X(cr.position(0)) << "\" cy=\"" << Y(cr.position(1))
               << "\" r=\"5\" fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n"
               << "<text x=\"" << X(cr.position(0)) << "\" y=\"" << Y(cr.position(1))
               << "\" dx=\"7\" dy=\"-7\" font-family=\"sans-serif\" font-size=\"14\" fill=\"" << col << "\">"
               << lab << "</text>\n";
        }
        os << "</g>\n";
    }
    os << "<text x=\"" << pad << "\" y=\"" << H - 12
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">x1 horizontal, y1 vertical; "
       << R << (R == 1 ? " height" : " heights") << "</text>\n";
    os << "</svg>\n";
}

std::map<std::string, std::string> parse_config(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Config, "config line " + std::to_string(no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(ErrorKind::Config, "config line " + std::to_string(no) + ": empty key");
        out[key] = val;
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Config, "cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::vector<double> parse_heights(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw Error(ErrorKind::Config, "empty height list");
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        std::vector<double> p;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ':')) p.push_back(parse_double(tok));
        if (p.size() != 3) throw Error(ErrorKind::Config, "height range must be start:stop:step");
        if (!(p[2] > 0) || p[1] < p[0]) throw Error(ErrorKind::Config, "height range needs step > 0 and start <= stop");
        const long long count = std::llround(std::floor((p[1] - p[0]) / p[2] + 1e-9));
        if (count > 100000) throw Error(ErrorKind::Config, "height range too long");
        for (long long i = 0; i <= count; ++i) out.push_back(p[0] + static_cast<double>(i) * p[2]);
    } else {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(parse_double(tok));
    }
    return out;
}

std::string output_directory(const std::string& flag, const std::map<std::string, std::string>& config) {
    if (!flag.empty()) return flag;
    auto it = config.find("out");
    if (it != config.end() && !it->second.empty()) return it->second;
    if (const char* env = std::getenv("GFCAP_OUT"); env && *env) return env;
    return "gfcap_out";
}

} // namespace gfcap
