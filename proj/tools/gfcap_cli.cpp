#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gfcap/io.hpp"
#include "gfcap/suites.hpp"

using namespace gfcap;

namespace {

constexpr int kPass = 0, kConfig = 2, kNumerical = 3, kSuiteFail = 4;

struct RunArgs {
    std::string family = "example21";
    std::string config;
    std::string out;
    std::string heights;
    double K = 0, eps = 0, beta = 0, tau = 0;
    int resolution = 0, dim = 0, sign = 0;
    long long seed = 0;
    bool fast = false, sweep = false, both = false;
};

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw Error(ErrorKind::Config, key + ": not a number: '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    double d = to_double(key, v);
    if (d != std::floor(d)) throw Error(ErrorKind::Config, key + ": not an integer: '" + v + "'");
    return static_cast<int>(d);
}

std::string report_block(const std::string& family, const ExampleFamilyParams& p, int sign,
                         const std::string& pipeline, int resolution, long long seed,
                         const std::vector<HeightAnalysis>& runs) {
    std::ostringstream os;
    os << "family = " << family << "\n"
       << "K = " << format_number(p.K) << "\n"
       << "eps = " << format_number(p.eps) << "\n"
       << "beta = " << format_number(p.beta) << "\n"
       << "tau = " << format_number(p.tau) << "\n"
       << "dim = " << p.dim << "\n"
       << "sign = " << sign << "\n"
       << "pipeline = " << pipeline << "\n"
       << "resolution = " << resolution << "\n"
       << "seed = " << seed << "\n"
       << "heights = " << runs.size() << "\n";
    for (const auto& h : runs) {
        const auto& d = h.diagram;
        os << "\n[height " << format_number(h.height) << "]\n";
        if (d.empty()) {
            os << "slice = empty\n";
        } else {
            os << "components = " << d.components.size() << "\n";
            if (!d.surface.empty()) os << "surface_samples = " << d.surface.size() << "\n";
            os << "double_points = " << d.double_points.size() << "\n"
               << "writhe = " << d.writhe << "\n";
            for (size_t i = 0; i < d.lobe_areas.size(); ++i)
                os << "lobe_area_" << i << " = " << format_number(d.lobe_areas[i]) << "\n";
        }
        for (const auto& c : h.critical)
            os << "critical = " << critical_kind_name(c.kind) << " value " << format_number(c.value) << " index "
               << c.index << " " << half_space_name(c.half_space) << "\n";
        for (const auto* t : {h.fast ? &*h.fast : nullptr, h.swept ? &*h.swept : nullptr}) {
            if (!t) continue;
            for (const auto& r : t->rows)
                os << method_name(t->method) << " degree " << r.degree << " = (" << format_number(r.c_plus) << ", "
                   << format_number(r.c_minus) << ", " << format_number(r.C_plus) << ", "
                   << format_number(r.C_minus) << ")" << (r.ambiguous ? " ambiguous" : "") << "\n";
            if (t->method == CapacityMethod::RankSweep) os << "sweep_tolerance = " << format_number(t->tolerance) << "\n";
        }
        if (h.fast && h.swept) {
            double worst = 0;
            for (const auto& r : h.fast->rows)
                for (int w = 0; w < 4; ++w)
                    worst = std::max(worst, std::abs(r.entry(w) - h.swept->row(r.degree).entry(w)));
            os << "method_gap = " << format_number(worst) << "\n"
               << "methods_agree = " << (worst <= h.swept->tolerance ? "yes" : "no") << "\n";
        }
        for (const auto& n : h.notes) os << "note = " << n << "\n";
    }
    return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, "cannot write " + p.string());
    f << s;
}

int do_run(const RunArgs& a, const CLI::App& cmd) {
    std::map<std::string, std::string> cfg;
    if (!a.config.empty()) cfg = read_config_file(a.config);
    auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
    auto pick_d = [&](const char* flag, const char* key, double flag_value, double dflt) {
        if (given(flag)) return flag_value;
        auto it = cfg.find(key);
        return it != cfg.end() ? to_double(key, it->second) : dflt;
    };
    auto pick_i = [&](const char* flag, const char* key, int flag_value, int dflt) {
        if (given(flag)) return flag_value;
        auto it = cfg.find(key);
        return it != cfg.end() ? to_int(key, it->second) : dflt;
    };

    const std::string& family = a.family;
    if (family != "example21") throw Error(ErrorKind::Config, "unknown family builder '" + family + "'");

    ExampleFamilyParams p;
    p.K = pick_d("--K", "K", a.K, p.K);
    p.eps = pick_d("--eps", "eps", a.eps, p.eps);
    p.beta = pick_d("--beta", "beta", a.beta, p.beta);
    p.tau = pick_d("--tau", "tau", a.tau, p.tau);
    p.dim = pick_i("--dim", "dim", a.dim, p.dim);
    const int sign = pick_i("--sign", "sign", a.sign, -1);
    if (sign != 1 && sign != -1) throw Error(ErrorKind::Config, "sign must be +1 or -1");
    const int resolution = pick_i("--resolution", "resolution", a.resolution, 64);
    if (resolution < 16) throw Error(ErrorKind::Config, "resolution must be at least 16");
    const long long seed = given("--seed") ? a.seed : pick_i("--seed", "seed", 0, 0);

    std::string pipeline = "fast";
    if (auto it = cfg.find("pipeline"); it != cfg.end()) pipeline = it->second;
    if (a.both) pipeline = "both";
    else if (a.sweep) pipeline = "sweep";
    else if (a.fast) pipeline = "fast";
    if (pipeline != "fast" && pipeline != "sweep" && pipeline != "both")
        throw Error(ErrorKind::Config, "pipeline must be fast, sweep or both");

    std::string hs = a.heights;
    if (hs.empty())
        if (auto it = cfg.find("heights"); it != cfg.end()) hs = it->second;
    if (hs.empty()) throw Error(ErrorKind::Config, "no heights given");
    const std::vector<double> heights = parse_heights(hs);
    const std::filesystem::path out = output_directory(a.out, cfg);

    auto f = build_example_family(p, sign);  // validates the parameters
    PipelineOptions opt;
    opt.fast = pipeline != "sweep";
    opt.sweep = pipeline != "fast";
    opt.resolution = resolution;

    std::vector<HeightAnalysis> runs;
    for (double t : heights) {
        if (t == 0) throw Error(ErrorKind::NonGenericFamily, "height 0 is not generic");
        runs.push_back(analyze_height(f, t, opt));
    }

    std::ostringstream slice, crit, ranks, caps, svg;
    write_slice_csv(slice, runs);
    write_critical_csv(crit, runs);
    write_ranks_csv(ranks, runs);
    write_capacities_csv(caps, runs);
    write_diagram_svg(svg, runs);
    const std::string report = report_block(family, p, sign, pipeline, resolution, seed, runs);

    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::Config, "cannot create output directory " + out.string());
    write_file(out / "slice.csv", slice.str());
    write_file(out / "critical.csv", crit.str());
    write_file(out / "ranks.csv", ranks.str());
    write_file(out / "capacities.csv", caps.str());
    write_file(out / "diagram.svg", svg.str());
    write_file(out / "report.txt", report);
    std::cout << "wrote " << heights.size() << (heights.size() == 1 ? " height" : " heights") << " to "
              << out.string() << "\n";
    return kPass;
}

// "r=2" or "R=3" or a bare number
double parse_radius(const std::string& s) {
    const size_t eq = s.find('=');
    return to_double("radius", eq == std::string::npos ? s : s.substr(eq + 1));
}

int do_cobordism(const std::string& bottom, const std::string& top, const std::string& family, int chi) {
    if (family != "fig8-neg") throw Error(ErrorKind::Config, "unknown cobordism family '" + family + "'");
    const double r = parse_radius(bottom), R = parse_radius(top);
    const double a = 1.5, b = 2.5;  // bottom and top heights
    HeightAnalysis lo = analyze_height(fig8_neg_family(r, a), a);
    HeightAnalysis hi = analyze_height(fig8_neg_family(R, b), b);
    Verdict v = cobordism_obstruction(lo.table(), hi.table(), chi, lo.diagram.writhe, hi.diagram.writhe);
    auto row = [](const CapacityTable& t) {
        std::string s;
        for (const auto& r : t.rows)
            s += " degree " + std::to_string(r.degree) + " (" + format_number(r.c_plus) + ", " +
                 format_number(r.c_minus) + ", " + format_number(r.C_plus) + ", " + format_number(r.C_minus) + ")";
        return s;
    };
    std::cout << "family = fig8-neg\n"
              << "bottom = r " << format_number(r) << " at y_n " << format_number(a) << "\n"
              << "top = r " << format_number(R) << " at y_n " << format_number(b) << "\n"
              << "chi = " << chi << "\n"
              << "writhe = " << lo.diagram.writhe << " -> " << hi.diagram.writhe << "\n"
              << "bottom_table =" << row(lo.table()) << "\n"
              << "top_table =" << row(hi.table()) << "\n"
              << "verdict = " << v.label() << "\n";
    for (const auto& s : v.reasons) std::cout << "reason = " << s << "\n";
    return kPass;
}

int do_suite(const std::string& name) {
    SuiteReport r = run_suite(name);
    for (const auto& l : r.lines) std::cout << l << "\n";
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "\n";
    return r.pass ? kPass : kSuiteFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generating-family capacities"};
    app.require_subcommand(1);

    RunArgs ra;
    auto* run = app.add_subcommand("run", "trace slices and compute capacity tables at the given heights");
    run->add_option("family", ra.family, "family builder (example21)")->required();
    run->add_option("--config", ra.config, "key = value config file; flags override it");
    run->add_option("--K", ra.K);
    run->add_option("--eps", ra.eps);
    run->add_option("--beta", ra.beta);
    run->add_option("--tau", ra.tau);
    run->add_option("--dim", ra.dim, "base dimension n (2 or 3)");
    run->add_option("--sign", ra.sign, "-1: negative crossing for y_n > 0, +1: positive for y_n < 0");
    run->add_option("--heights", ra.heights, "a:b:step, a comma list or one value");
    run->add_option("--resolution", ra.resolution, "rank sweep cells per core axis (>= 16)");
    run->add_option("--out", ra.out, "output directory (default $GFCAP_OUT, then gfcap_out)");
    run->add_option("--seed", ra.seed, "recorded in the report; the pipeline is deterministic");
    auto* mode = run->add_option_group("pipeline");
    mode->add_flag("--fast", ra.fast, "single-crossing rule, sweep only as fallback");
    mode->add_flag("--sweep", ra.sweep, "rank sweep only");
    mode->add_flag("--both", ra.both, "both methods");
    mode->require_option(0, 1);

    std::string bottom, top, cfamily = "fig8-neg";
    int chi = 0;
    auto* cob = app.add_subcommand("check-cobordism", "capacity obstruction between two figure-eight slices");
    cob->add_option("--bottom", bottom, "r=<radius> of the lower slice")->required();
    cob->add_option("--top", top, "R=<radius> of the upper slice")->required();
    cob->add_option("--family", cfamily, "fig8-neg");
    cob->add_option("--chi", chi, "Euler characteristic of the cobordism");

    std::string suite;
    auto* su = app.add_subcommand("suite", "run a property suite");
    su->add_option("name", suite, "monotonicity, continuity, invariance, nonvanishing, conformality, "
                                  "nonsqueezing or euler")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kConfig;
    }

    try {
        if (*run) return do_run(ra, *run);
        if (*cob) return do_cobordism(bottom, top, cfamily, chi);
        if (*su) return do_suite(suite);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_config() ? kConfig : kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kConfig;
}
