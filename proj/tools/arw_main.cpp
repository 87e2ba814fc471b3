// Command-line front end: lattice exports, kappa, cap/segment counts,
// Riesz energies, the pairwise exponential sum, Kac-Rice second moments,
// and the nodal-length Monte Carlo.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "arw/regions.hpp"
#include "arw/report.hpp"
#include "arw/rng.hpp"
#include "arw/sim.hpp"
#include "arw/sums.hpp"

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Shared option plumbing.
// ---------------------------------------------------------------------------

struct CommonOpts {
    std::string out;
    std::string format;  // csv | json
    std::string config_path;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool force = false;
};

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::map<std::string, std::string> cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line without '=': " + line);
        cfg[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return cfg;
}

// Flags given on the command line win; otherwise config-file values apply.
template <typename T>
void config_fallback(const CLI::App& cmd, const std::map<std::string, std::string>& cfg,
                     const std::string& name, T& var) {
    const CLI::Option* opt = cmd.get_option_no_throw("--" + name);
    if (opt == nullptr || opt->count() > 0) return;
    const auto it = cfg.find(name);
    if (it == cfg.end()) return;
    if constexpr (std::is_same_v<T, std::string>) {
        var = it->second;
    } else if constexpr (std::is_same_v<T, bool>) {
        var = (it->second == "1" || it->second == "true");
    } else {
        std::istringstream iss(it->second);
        iss >> var;
        if (iss.fail() || !iss.eof())
            throw std::invalid_argument("malformed config value for '" + name + "': " +
                                        it->second);
    }
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoll(item));
    }
    if (out.empty()) throw std::invalid_argument("empty integer list: '" + text + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
    return out;
}

arw::Vec3 parse_vec3(const std::string& text) {
    const auto v = parse_double_list(text);
    if (v.size() != 3) throw std::invalid_argument("expected three components: '" + text + "'");
    return {v[0], v[1], v[2]};
}

arw::Vec3i parse_vec3i(const std::string& text) {
    const auto v = parse_int_list(text);
    if (v.size() != 3) throw std::invalid_argument("expected three components: '" + text + "'");
    return {v[0], v[1], v[2]};
}

// ---------------------------------------------------------------------------
// Output writing. Every artifact embeds the effective configuration and the
// tool version; JSON additionally records wall time (informational only,
// excluded from reproducibility comparisons).
// ---------------------------------------------------------------------------

class Emitter {
  public:
    Emitter(const CommonOpts& opts, std::string command, json config)
        : opts_(opts), command_(std::move(command)), config_(std::move(config)),
          start_(std::chrono::steady_clock::now()) {}

    void write_json(const json& results) {
        json doc;
        doc["tool"] = arw::kToolName;
        doc["version"] = arw::kToolVersion;
        doc["command"] = command_;
        doc["config"] = config_;
        doc["results"] = results;
        doc["wall_time_ms"] = elapsed_ms();
        sink() << doc.dump() << '\n';
    }

    // JSON object per line (sweeps).
    void write_json_lines(const std::vector<json>& rows) {
        auto& os = sink();
        const double ms = elapsed_ms();
        for (const auto& row : rows) {
            json doc;
            doc["tool"] = arw::kToolName;
            doc["version"] = arw::kToolVersion;
            doc["command"] = command_;
            doc["config"] = config_;
            doc["results"] = row;
            doc["wall_time_ms"] = ms;
            os << doc.dump() << '\n';
        }
    }

    void write_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
        auto& os = sink();
        os << "# tool=" << arw::kToolName << " version=" << arw::kToolVersion
           << " command=" << command_ << '\n';
        for (const auto& [key, value] : config_.items())
            os << "# " << key << '=' << (value.is_string() ? value.get<std::string>()
                                                           : value.dump())
               << '\n';
        for (std::size_t i = 0; i < header.size(); ++i)
            os << header[i] << (i + 1 < header.size() ? "," : "\n");
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                os << row[i] << (i + 1 < row.size() ? "," : "\n");
    }

    // Raw CSV body (lattice export keeps its exact documented shape).
    void write_raw(const std::function<void(std::ostream&)>& body, bool with_config) {
        auto& os = sink();
        if (with_config) {
            os << "# tool=" << arw::kToolName << " version=" << arw::kToolVersion
               << " command=" << command_ << '\n';
            for (const auto& [key, value] : config_.items())
                os << "# " << key << '=' << (value.is_string() ? value.get<std::string>()
                                                               : value.dump())
                   << '\n';
        }
        body(os);
    }

    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_)
            .count();
    }

  private:
    std::ostream& sink() {
        if (opts_.out.empty()) return std::cout;
        if (!file_.is_open()) {
            file_.open(opts_.out);
            if (!file_) throw std::invalid_argument("cannot open output file: " + opts_.out);
        }
        return file_;
    }

    const CommonOpts& opts_;
    std::string command_;
    json config_;
    std::chrono::steady_clock::time_point start_;
    std::ofstream file_;
};

std::string num(double v) { return arw::format_number(v); }
std::string num(std::int64_t v) { return std::to_string(v); }

// ---------------------------------------------------------------------------
// Plane/frame assembly shared by gsum, krbound, simulate, sweep, regimes.
// ---------------------------------------------------------------------------

struct PlaneContext {
    arw::PlaneSpec spec;
    arw::Frame frame;
    std::optional<arw::PlaneType> type;
};

PlaneContext make_plane(const std::string& normal_str, const std::string& declared,
                        const std::string& patch_str) {
    PlaneContext ctx;
    ctx.spec = arw::parse_normal(normal_str);
    if (!declared.empty()) ctx.spec.declared_type = arw::plane_type_from_string(declared);
    if (!patch_str.empty()) {
        const auto [a, b] = arw::parse_patch(patch_str);
        ctx.spec.patch_a = a;
        ctx.spec.patch_b = b;
    }
    ctx.frame = arw::build_frame(ctx.spec);
    if (ctx.spec.exact_normal || ctx.spec.declared_type) ctx.type = arw::plane_type(ctx.spec);
    return ctx;
}

json plane_config_json(const PlaneContext& ctx, const std::string& normal_str) {
    json j;
    j["normal"] = normal_str;
    j["patch"] = {ctx.spec.patch_a, ctx.spec.patch_b};
    j["plane_type"] = ctx.type ? json(arw::to_string(*ctx.type)) : json(nullptr);
    j["frame_convention"] = arw::Frame::convention();
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// selftest: the fast subset of the verification suite.
// ---------------------------------------------------------------------------

namespace {

int run_selftest(unsigned threads) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << '\n';
        if (!ok) ++failures;
    };

    // r_3 vs brute force over the cube, m <= 2000
    {
        constexpr std::int64_t limit = 2000;
        const std::int64_t reach = arw::isqrt(limit);
        std::vector<std::int64_t> brute(limit + 1, 0);
        for (std::int64_t x = -reach; x <= reach; ++x)
            for (std::int64_t y = -reach; y <= reach; ++y)
                for (std::int64_t z = -reach; z <= reach; ++z) {
                    const std::int64_t n2 = x * x + y * y + z * z;
                    if (n2 >= 1 && n2 <= limit) ++brute[n2];
                }
        bool ok = true;
        for (std::int64_t m = 1; m <= limit && ok; ++m)
            ok = arw::representation_count(m) == brute[m];
        check("representation counts match brute force (m <= 2000)", ok);
    }

    // kappa values on the smallest spheres (norm 2 has a hexagonal great
    // circle on the plane x + y + z = 0)
    {
        const std::int64_t expect[3] = {4, 6, 4};
        bool ok = true;
        for (std::int64_t m : {1, 2, 3})
            ok = ok && arw::kappa_exact(arw::enumerate_frequencies(m), 2000, threads) ==
                           expect[m - 1];
        check("kappa on the smallest spheres (4, 6, 4)", ok);
    }

    // closed-form pairwise sums
    {
        const auto set1 = arw::enumerate_frequencies(1);
        arw::PlaneSpec p1;
        p1.exact_normal = {arw::make_surd(1), arw::make_surd(0), arw::make_surd(0)};
        p1.normal = {1, 0, 0};
        const auto g1 = arw::g_sum(set1, arw::build_frame(p1), 1.0, 1.0);

        const auto set2 = arw::enumerate_frequencies(2);
        arw::PlaneSpec p2;
        p2.exact_normal = {arw::make_surd(0), arw::make_surd(0), arw::make_surd(1)};
        p2.normal = {0, 0, 1};
        const auto g2 = arw::g_sum(set2, arw::build_frame(p2), 1.0, 1.0);

        check("pairwise sum closed form (values 2 and 8)",
              std::abs(g1.g_value - 2.0) < 1e-9 && std::abs(g2.g_value - 8.0) < 1e-9);

        // second-moment identity at m = 1 plus the mutation control: a
        // corrupted pairwise sum must make the identity check fail.
        const auto sm = arw::second_moment_r2(set1, arw::build_frame(p2), 1.0, 1.0);
        const double tol =
            std::max(sm.quadrature.error_estimate * 4.0, 1e-9 * std::abs(sm.closed_form));
        const bool identity_ok = std::abs(sm.closed_form - 2.0 / 9.0) < 1e-12 &&
                                 std::abs(sm.closed_form - sm.quadrature.value) <= tol;
        check("second-moment identity (m = 1, value 2/9)", identity_ok);
        const double n = 6.0;
        const double corrupted = 1.0 / n + (g1.g_value * 1.001) / (n * n);
        check("mutation control: corrupted pairwise sum is detected",
              std::abs(corrupted - sm.quadrature.value) > tol);
    }

    // rect factor spot values
    {
        const double v = arw::rect_factor_sq(0.5, 1.0);
        check("rect factor at x = 1/2 equals 4/pi^2",
              std::abs(v - 4.0 / (arw::kPi * arw::kPi)) < 1e-15);
    }

    // explicit-constant envelope on a real set of pairs
    {
        const auto set = arw::enumerate_frequencies(5);
        arw::PlaneSpec p;
        p.exact_normal = {arw::make_surd(0), arw::make_surd(0), arw::make_surd(1)};
        p.normal = {0, 0, 1};
        const auto frame = arw::build_frame(p);
        bool ok = true;
        for (const auto& a : set.points)
            for (const auto& b : set.points) {
                if (a == b) continue;
                const arw::Vec3 d = arw::to_vec3(a - b);
                const double x = arw::dot(d, frame.xi), y = arw::dot(d, frame.eta);
                if (x == 0.0 || y == 0.0) continue;
                const double prod =
                    arw::rect_factor_sq(x, 1.0) * arw::rect_factor_sq(y, 1.0);
                ok = ok && prod <= arw::trineq_bound(x, y, 1.0, 1.0).value * (1 + 1e-12);
            }
        check("product bound holds for all nonzero-projection pairs (m = 5)", ok);
    }

    // marching-squares calibration
    {
        const auto line = arw::grid_from_function(
            [](double u, double) { return std::cos(arw::kTwoPi * u); }, 21, 21, 1.0, 1.0);
        const double len = arw::nodal_length(line, [](double u, double) {
                               return std::cos(arw::kTwoPi * u);
                           }).length;
        check("marching squares: two vertical lines, length 2",
              std::abs(len - 2.0) < 1e-3);

        auto quarter = [](double u, double v) { return u * u + v * v - 0.25; };
        const auto qf = arw::grid_from_function(quarter, 21, 21, 1.0, 1.0);
        const double qlen = arw::nodal_length(qf, quarter).length;
        check("marching squares: quarter circle, length pi/4",
              std::abs(qlen - arw::kPi / 4.0) < 1e-2);
    }

    // determinism across worker counts
    {
        const auto set = arw::enumerate_frequencies(1);
        arw::PlaneSpec p;
        p.exact_normal = {arw::make_surd(0), arw::make_surd(0), arw::make_surd(1)};
        p.normal = {0, 0, 1};
        const auto frame = arw::build_frame(p);
        arw::SimulationRequest req;
        req.n_samples = 50;
        req.seed = 7;
        req.n_threads = 1;
        const auto a = arw::estimate_moments(set, frame, {0, 0, 0}, 1, 1, req);
        req.n_threads = 2;
        const auto b = arw::estimate_moments(set, frame, {0, 0, 0}, 1, 1, req);
        check("worker count does not change results",
              a.lengths == b.lengths && a.mean == b.mean && a.variance == b.variance);
    }

    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: FAILURES present\n");
    return failures == 0 ? 0 : 2;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"lattice-point and nodal-length toolkit"};
    app.require_subcommand(1);

    CommonOpts common;
    std::map<std::string, std::string> cfg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", common.out, "output file (default stdout)");
        cmd->add_option("--format", common.format, "csv or json");
        cmd->add_option("--config", common.config_path, "flat key=value config file");
        cmd->add_option("--seed", common.seed, "64-bit RNG seed");
        cmd->add_option("--threads", common.threads, "worker cap (0 = hardware)");
        cmd->add_flag("--force", common.force, "allow inadmissible m in simulations");
    };

    // lattice
    auto* c_lattice = app.add_subcommand("lattice", "enumerate the frequency set");
    std::int64_t m = 0;
    std::int64_t enum_ceiling = arw::kDefaultEnumerationCeiling;
    c_lattice->add_option("--m", m, "frequency level");
    c_lattice->add_option("--ceiling", enum_ceiling, "enumeration ceiling for m");
    add_common(c_lattice);

    // kappa
    auto* c_kappa = app.add_subcommand("kappa", "max lattice points on a plane");
    std::string m_list_str;
    std::int64_t kappa_ceiling = arw::kDefaultKappaCeiling;
    c_kappa->add_option("--m", m, "frequency level");
    c_kappa->add_option("--m-list", m_list_str, "comma-separated m values");
    c_kappa->add_option("--kappa-ceiling", kappa_ceiling, "triple-enumeration ceiling on N");
    add_common(c_kappa);

    // regions
    auto* c_regions = app.add_subcommand("regions", "cap/segment counts and reports");
    std::string op = "cap", direction_str, center_str, normal_str, declared_type, params_str;
    double cap_s = 0, seg_c1 = 0, seg_c2 = 0, rho = 0.1;
    int n_segments = 20;
    bool conditional = false;
    c_regions->add_option("--m", m, "frequency level")->required();
    c_regions->add_option("--op", op, "cap | segment | cone | maxcap | psi | regimes");
    c_regions->add_option("--direction", direction_str, "region direction x,y,z");
    c_regions->add_option("--center", center_str, "lattice cap center (integers)");
    c_regions->add_option("--s", cap_s, "cap radius");
    c_regions->add_option("--c1", seg_c1, "segment lower offset");
    c_regions->add_option("--c2", seg_c2, "segment upper offset");
    c_regions->add_option("--rho", rho, "cone half-aperture parameter");
    c_regions->add_option("--segments", n_segments, "sampled segments for the psi report");
    c_regions->add_option("--type", declared_type, "direction type for psi (i|ii|iii)");
    c_regions->add_option("--normal", normal_str, "plane normal for regimes");
    c_regions->add_option("--params", params_str, "regime parameters c,second");
    c_regions->add_flag("--conditional", conditional, "use the conditional regime mode");
    c_regions->add_option("--kappa-ceiling", kappa_ceiling, "ceiling on N for kappa");
    add_common(c_regions);

    // riesz
    auto* c_riesz = app.add_subcommand("riesz", "pairwise inverse-distance energies");
    std::string s_list_str = "0.5,1,1.5";
    c_riesz->add_option("--m", m, "frequency level");
    c_riesz->add_option("--m-list", m_list_str, "comma-separated m values");
    c_riesz->add_option("--s-list", s_list_str, "comma-separated exponents in (0,2)");
    add_common(c_riesz);

    // gsum
    auto* c_gsum = app.add_subcommand("gsum", "pairwise exponential sum over the patch");
    std::string patch_str = "1x1";
    c_gsum->add_option("--m", m, "frequency level")->required();
    c_gsum->add_option("--normal", normal_str, "plane normal (surd grammar)")->required();
    c_gsum->add_option("--declared-type", declared_type, "plane type for float normals");
    c_gsum->add_option("--patch", patch_str, "patch dimensions AxB");
    add_common(c_gsum);

    // krbound
    auto* c_kr = app.add_subcommand("krbound", "second moments and variance bounds");
    c_kr->add_option("--m", m, "frequency level");
    c_kr->add_option("--m-list", m_list_str, "comma-separated m values");
    c_kr->add_option("--normal", normal_str, "plane normal")->required();
    c_kr->add_option("--declared-type", declared_type, "plane type for float normals");
    c_kr->add_option("--patch", patch_str, "patch dimensions AxB");
    c_kr->add_flag("--conditional", conditional, "conditional-mode variance bound");
    c_kr->add_option("--kappa-ceiling", kappa_ceiling, "ceiling on N for kappa");
    add_common(c_kr);

    // simulate
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo nodal length moments");
    int n_samples = 2000;
    double ppw = arw::kDefaultPointsPerWavelength;
    std::string offset_str = "0,0,0", per_sample_path;
    c_sim->add_option("--m", m, "frequency level");
    c_sim->add_option("--normal", normal_str, "plane normal");
    c_sim->add_option("--declared-type", declared_type, "plane type for float normals");
    c_sim->add_option("--patch", patch_str, "patch dimensions AxB");
    c_sim->add_option("--samples", n_samples, "number of Monte Carlo samples");
    c_sim->add_option("--ppw", ppw, "grid points per wavelength (>= 10)");
    c_sim->add_option("--offset", offset_str, "patch offset point x,y,z");
    c_sim->add_option("--per-sample", per_sample_path, "write per-sample lengths CSV");
    c_sim->add_option("--kappa-ceiling", kappa_ceiling, "ceiling on N for kappa");
    add_common(c_sim);

    // sweep
    auto* c_sweep = app.add_subcommand("sweep", "simulate over a list of m");
    std::string eps_list_str;
    c_sweep->add_option("--m-list", m_list_str, "comma-separated m values")->required();
    c_sweep->add_option("--normal", normal_str, "plane normal");
    c_sweep->add_option("--declared-type", declared_type, "plane type for float normals");
    c_sweep->add_option("--patch", patch_str, "patch dimensions AxB");
    c_sweep->add_option("--samples", n_samples, "samples per m");
    c_sweep->add_option("--ppw", ppw, "grid points per wavelength (>= 10)");
    c_sweep->add_option("--offset", offset_str, "patch offset point x,y,z");
    c_sweep->add_option("--epsilon", eps_list_str, "concentration thresholds");
    c_sweep->add_option("--kappa-ceiling", kappa_ceiling, "ceiling on N for kappa");
    add_common(c_sweep);

    // selftest
    auto* c_self = app.add_subcommand("selftest", "fast verification subset");
    add_common(c_self);

    try {
        app.parse(argc, argv);

        CLI::App* active = app.get_subcommands().front();
        cfg = load_config_file(common.config_path);
        config_fallback(*active, cfg, "m", m);
        config_fallback(*active, cfg, "m-list", m_list_str);
        config_fallback(*active, cfg, "normal", normal_str);
        config_fallback(*active, cfg, "declared-type", declared_type);
        config_fallback(*active, cfg, "patch", patch_str);
        config_fallback(*active, cfg, "samples", n_samples);
        config_fallback(*active, cfg, "ppw", ppw);
        config_fallback(*active, cfg, "seed", common.seed);
        config_fallback(*active, cfg, "threads", common.threads);
        config_fallback(*active, cfg, "format", common.format);
        config_fallback(*active, cfg, "offset", offset_str);
        config_fallback(*active, cfg, "epsilon", eps_list_str);

        const bool as_csv = common.format == "csv";
        if (!common.format.empty() && common.format != "csv" && common.format != "json")
            throw std::invalid_argument("--format must be csv or json");

        if (app.got_subcommand(c_lattice)) {
            if (m < 1) throw std::invalid_argument("--m is required");
            const auto set = arw::enumerate_frequencies(m, enum_ceiling);
            json config{{"m", m}, {"ceiling", enum_ceiling}};
            Emitter em(common, "lattice", config);
            if (common.format == "json") {
                json pts = json::array();
                for (const auto& p : set.points) pts.push_back({p.x, p.y, p.z});
                em.write_json({{"m", set.m}, {"n_points", set.n_points()}, {"points", pts}});
            } else {
                em.write_raw([&](std::ostream& os) { arw::write_frequency_csv(set, os); },
                             true);
            }
            return 0;
        }

        if (app.got_subcommand(c_kappa)) {
            std::vector<std::int64_t> ms =
                m_list_str.empty() ? std::vector<std::int64_t>{m} : parse_int_list(m_list_str);
            if (ms.empty() || ms.front() < 1) throw std::invalid_argument("--m is required");
            json config{{"m_list", ms}, {"kappa_ceiling", kappa_ceiling}};
            Emitter em(common, "kappa", config);
            std::vector<json> rows;
            std::vector<std::vector<std::string>> csv;
            for (std::int64_t mv : ms) {
                const auto set = arw::enumerate_frequencies(mv, enum_ceiling);
                const std::int64_t kap =
                    arw::kappa_exact(set, kappa_ceiling, common.threads);
                rows.push_back({{"m", mv}, {"N", set.n_points()}, {"kappa", kap}});
                csv.push_back({num(mv), num(set.n_points()), num(kap)});
            }
            if (as_csv) em.write_csv({"m", "N", "kappa"}, csv);
            else em.write_json_lines(rows);
            return 0;
        }

        if (app.got_subcommand(c_regions)) {
            const auto set = arw::enumerate_frequencies(m, enum_ceiling);
            if (op == "cap") {
                arw::Cap cap = center_str.empty()
                                   ? arw::make_cap(parse_vec3(direction_str), cap_s,
                                                   set.sphere_radius())
                                   : arw::cap_at_lattice_point(set, parse_vec3i(center_str),
                                                               cap_s);
                json config{{"m", m}, {"op", op}, {"s", cap_s},
                            {"direction", center_str.empty() ? direction_str : center_str}};
                Emitter em(common, "regions", config);
                const auto count = arw::count_in_cap(set, cap);
                if (as_csv)
                    em.write_csv({"m", "N", "s", "h", "count"},
                                 {{num(m), num(set.n_points()), num(cap.radius_s),
                                   num(cap.height()), num(count)}});
                else
                    em.write_json({{"m", m},
                                   {"N", set.n_points()},
                                   {"s", cap.radius_s},
                                   {"h", cap.height()},
                                   {"count", count}});
            } else if (op == "segment") {
                const auto seg = arw::make_segment(parse_vec3(direction_str), seg_c1, seg_c2,
                                                   set.sphere_radius());
                json config{{"m", m}, {"op", op}, {"c1", seg_c1}, {"c2", seg_c2},
                            {"direction", direction_str}};
                Emitter em(common, "regions", config);
                const auto count = arw::count_in_segment(set, seg);
                json res{{"m", m},
                         {"N", set.n_points()},
                         {"count", count},
                         {"h", seg.height()},
                         {"k", seg.larger_base_radius()},
                         {"theta", seg.opening_angle()},
                         {"in_hemisphere", seg.in_hemisphere()}};
                if (as_csv)
                    em.write_csv({"m", "N", "count", "h", "k", "theta", "in_hemisphere"},
                                 {{num(m), num(set.n_points()), num(count), num(seg.height()),
                                   num(seg.larger_base_radius()), num(seg.opening_angle()),
                                   seg.in_hemisphere() ? "1" : "0"}});
                else
                    em.write_json(res);
            } else if (op == "cone") {
                json config{{"m", m}, {"op", op}, {"rho", rho}, {"direction", direction_str}};
                Emitter em(common, "regions", config);
                const auto pairs =
                    arw::cone_pair_filter(set, parse_vec3(direction_str), rho);
                const auto count = static_cast<std::int64_t>(pairs.size());
                if (as_csv)
                    em.write_csv({"m", "N", "rho", "n_pairs"},
                                 {{num(m), num(set.n_points()), num(rho), num(count)}});
                else
                    em.write_json(
                        {{"m", m}, {"N", set.n_points()}, {"rho", rho}, {"n_pairs", count}});
            } else if (op == "maxcap") {
                json config{{"m", m}, {"op", op}, {"s", cap_s}};
                Emitter em(common, "regions", config);
                const auto count = arw::max_cap_count(set, cap_s);
                if (as_csv)
                    em.write_csv({"m", "N", "s", "max_count"},
                                 {{num(m), num(set.n_points()), num(cap_s), num(count)}});
                else
                    em.write_json({{"m", m},
                                   {"N", set.n_points()},
                                   {"s", cap_s},
                                   {"max_count", count}});
            } else if (op == "psi") {
                const arw::PlaneType type = arw::plane_type_from_string(
                    declared_type.empty() ? "ii" : declared_type);
                // sampled directions matching the requested type
                arw::Xoshiro256pp rng(common.seed);
                auto small_int = [&] {
                    return static_cast<std::int64_t>(rng.next() % 9) - 4;
                };
                auto nonzero_int = [&] {
                    std::int64_t v = 0;
                    while (v == 0) v = small_int();
                    return v;
                };
                std::vector<arw::Segment> segments;
                const double r = set.sphere_radius();
                for (int i = 0; i < n_segments; ++i) {
                    const double c1 = (2.0 * rng.uniform() - 1.0) * r;
                    const double h = rng.uniform() * 0.5 * r;
                    const double c2 = std::min(c1 + h, r);
                    if (type == arw::PlaneType::i) {
                        const arw::Vec3i dir{nonzero_int(), small_int(), small_int()};
                        segments.push_back(arw::make_segment(dir, c1, c2, r));
                    } else if (type == arw::PlaneType::ii) {
                        const arw::Vec3 dir{static_cast<double>(nonzero_int()),
                                            static_cast<double>(small_int()),
                                            static_cast<double>(nonzero_int()) *
                                                std::sqrt(2.0)};
                        segments.push_back(arw::make_segment(dir, c1, c2, r));
                    } else {
                        const arw::Vec3 dir{static_cast<double>(nonzero_int()),
                                            static_cast<double>(nonzero_int()) *
                                                std::sqrt(2.0),
                                            static_cast<double>(nonzero_int()) *
                                                std::sqrt(3.0)};
                        segments.push_back(arw::make_segment(dir, c1, c2, r));
                    }
                }
                const std::int64_t kap = arw::kappa_exact(set, kappa_ceiling, common.threads);
                const auto rows = arw::psi_bound_report(set, type, segments, kap);
                json config{{"m", m}, {"op", op}, {"type", arw::to_string(type)},
                            {"segments", n_segments}, {"seed", common.seed},
                            {"kappa", kap}};
                Emitter em(common, "regions", config);
                std::vector<std::vector<std::string>> csv;
                std::vector<json> jrows;
                for (const auto& row : rows) {
                    auto ratio = [&](double bound) {
                        return bound > 0 ? static_cast<double>(row.count) / bound
                                         : std::numeric_limits<double>::quiet_NaN();
                    };
                    auto opt_ratio = [&](double bound) {
                        return std::isnan(bound) ? std::numeric_limits<double>::quiet_NaN()
                                                 : ratio(bound);
                    };
                    json jr{{"h", row.h},
                            {"k", row.k},
                            {"theta", row.theta},
                            {"in_hemisphere", row.in_hemisphere},
                            {"count", row.count},
                            {"bound_type_i", arw::json_or_null(row.bound_type_i)},
                            {"ratio_type_i", arw::json_or_null(opt_ratio(row.bound_type_i))},
                            {"bound_halfpow", arw::json_or_null(row.bound_halfpow)},
                            {"ratio_halfpow", arw::json_or_null(opt_ratio(row.bound_halfpow))},
                            {"bound_angle", arw::json_or_null(row.bound_angle)},
                            {"ratio_angle", arw::json_or_null(opt_ratio(row.bound_angle))},
                            {"bound_conditional", arw::json_or_null(row.bound_conditional)},
                            {"ratio_conditional", arw::json_or_null(
                                                      ratio(row.bound_conditional))}};
                    jrows.push_back(jr);
                    auto cell = [&](double v) {
                        return std::isnan(v) ? std::string{} : num(v);
                    };
                    csv.push_back({num(row.h), num(row.k), num(row.theta),
                                   row.in_hemisphere ? "1" : "0", num(row.count),
                                   cell(row.bound_type_i), cell(opt_ratio(row.bound_type_i)),
                                   cell(row.bound_halfpow),
                                   cell(opt_ratio(row.bound_halfpow)),
                                   cell(row.bound_angle), cell(opt_ratio(row.bound_angle)),
                                   num(row.bound_conditional),
                                   num(ratio(row.bound_conditional))});
                }
                if (as_csv)
                    em.write_csv({"h", "k", "theta", "in_hemisphere", "count", "bound_type_i",
                                  "ratio_type_i", "bound_halfpow", "ratio_halfpow",
                                  "bound_angle", "ratio_angle", "bound_conditional",
                                  "ratio_conditional"},
                                 csv);
                else
                    em.write_json_lines(jrows);
            } else if (op == "regimes") {
                if (normal_str.empty())
                    throw std::invalid_argument("regimes needs --normal");
                PlaneContext ctx = make_plane(normal_str, declared_type, "");
                arw::RegimeParams params;
                if (!params_str.empty()) {
                    const auto v = parse_double_list(params_str);
                    if (v.size() != 2)
                        throw std::invalid_argument("--params must be c,second");
                    params.c = v[0];
                    params.second = v[1];
                    params.mode =
                        conditional ? arw::RegimeMode::offset : arw::RegimeMode::angular;
                } else {
                    params = arw::default_regime_params(
                        ctx.type.value_or(arw::PlaneType::ii), conditional, set.n_points());
                }
                const auto counts = arw::regime_counts(set, ctx.frame, params);
                json config = plane_config_json(ctx, normal_str);
                config["m"] = m;
                config["op"] = op;
                config["conditional"] = conditional;
                Emitter em(common, "regions", config);
                if (as_csv)
                    em.write_csv({"c", "rho_or_cprime", "n_first", "n_second", "third_sum"},
                                 {{num(params.c), num(params.second), num(counts.n_first),
                                   num(counts.n_second), num(counts.third_sum)}});
                else
                    em.write_json({{"c", params.c},
                                   {"rho_or_cprime", params.second},
                                   {"mode", params.mode == arw::RegimeMode::angular
                                                ? "angular"
                                                : "offset"},
                                   {"n_first", counts.n_first},
                                   {"n_second", counts.n_second},
                                   {"third_sum", counts.third_sum}});
            } else {
                throw std::invalid_argument("unknown regions op: " + op);
            }
            return 0;
        }

        if (app.got_subcommand(c_riesz)) {
            std::vector<std::int64_t> ms =
                m_list_str.empty() ? std::vector<std::int64_t>{m} : parse_int_list(m_list_str);
            if (ms.empty() || ms.front() < 1) throw std::invalid_argument("--m is required");
            const auto s_values = parse_double_list(s_list_str);
            json config{{"m_list", ms}, {"s_list", s_values}};
            Emitter em(common, "riesz", config);
            std::vector<json> rows;
            std::vector<std::vector<std::string>> csv;
            for (std::int64_t mv : ms) {
                const auto set = arw::enumerate_frequencies(mv, enum_ceiling);
                for (double s : s_values) {
                    const auto e = arw::riesz_energy(set, s);
                    rows.push_back(arw::riesz_json(mv, set.n_points(), s, e));
                    csv.push_back({num(mv), num(set.n_points()), num(s), num(e.energy),
                                   num(e.ratio), num(e.limit_constant)});
                }
            }
            if (as_csv)
                em.write_csv({"m", "N", "s", "energy", "ratio", "limit_constant"}, csv);
            else
                em.write_json_lines(rows);
            return 0;
        }

        if (app.got_subcommand(c_gsum)) {
            const auto set = arw::enumerate_frequencies(m, enum_ceiling);
            PlaneContext ctx = make_plane(normal_str, declared_type, patch_str);
            const auto g = arw::g_sum(set, ctx.frame, ctx.spec.patch_a, ctx.spec.patch_b);
            json config = plane_config_json(ctx, normal_str);
            config["m"] = m;
            Emitter em(common, "gsum", config);
            if (as_csv)
                em.write_csv(
                    {"m", "N", "A", "B", "g", "n_zero_pairs"},
                    {{num(m), num(set.n_points()), num(ctx.spec.patch_a),
                      num(ctx.spec.patch_b), num(g.g_value), num(g.n_zero_pairs)}});
            else
                em.write_json(arw::gsum_json(m, set.n_points(), g, ctx.spec.patch_a,
                                             ctx.spec.patch_b));
            return 0;
        }

        if (app.got_subcommand(c_kr)) {
            std::vector<std::int64_t> ms =
                m_list_str.empty() ? std::vector<std::int64_t>{m} : parse_int_list(m_list_str);
            if (ms.empty() || ms.front() < 1) throw std::invalid_argument("--m is required");
            PlaneContext ctx = make_plane(normal_str, declared_type, patch_str);
            if (!ctx.type)
                throw std::invalid_argument(
                    "krbound needs an exact normal or --declared-type");
            const auto omega = arw::projection_matrix(ctx.frame.normal);
            json config = plane_config_json(ctx, normal_str);
            config["m_list"] = ms;
            config["conditional"] = conditional;
            Emitter em(common, "krbound", config);
            std::vector<json> rows;
            std::vector<std::vector<std::string>> csv;
            for (std::int64_t mv : ms) {
                const auto set = arw::enumerate_frequencies(mv, enum_ceiling);
                const double n = static_cast<double>(set.n_points());
                std::int64_t kap = 0;
                if (*ctx.type == arw::PlaneType::i && set.n_points() <= kappa_ceiling)
                    kap = arw::kappa_exact(set, kappa_ceiling, common.threads);
                const auto g = arw::g_sum(set, ctx.frame, ctx.spec.patch_a, ctx.spec.patch_b);
                const auto sm_r2 = arw::second_moment_r2(set, ctx.frame, ctx.spec.patch_a,
                                                         ctx.spec.patch_b);
                const auto sm_full = arw::second_moment_full(
                    set, ctx.frame, omega, ctx.spec.patch_a, ctx.spec.patch_b);
                const double vb =
                    arw::variance_bound(mv, set.n_points(), kap, *ctx.type, conditional);
                rows.push_back({{"m", mv},
                                {"N", set.n_points()},
                                {"kappa", kap > 0 ? json(kap) : json(nullptr)},
                                {"g", g.g_value},
                                {"var_bound", vb},
                                {"second_moment_r2_closed", sm_r2.closed_form},
                                {"second_moment_r2_quadrature", sm_r2.quadrature.value},
                                {"second_moment_full", sm_full.quadrature.value},
                                {"ratio_lemma41", sm_full.ratio},
                                {"g_over_n2", g.g_value / (n * n)}});
                csv.push_back({num(mv), num(set.n_points()),
                               kap > 0 ? num(kap) : std::string{}, num(g.g_value), num(vb),
                               num(sm_r2.closed_form), num(sm_full.quadrature.value),
                               num(sm_full.ratio)});
            }
            if (as_csv)
                em.write_csv({"m", "N", "kappa", "G", "var_bound",
                              "second_moment_r2_closed", "second_moment_full",
                              "ratio_lemma41"},
                             csv);
            else
                em.write_json_lines(rows);
            return 0;
        }

        if (app.got_subcommand(c_sim) || app.got_subcommand(c_sweep)) {
            const bool sweep = app.got_subcommand(c_sweep);
            std::vector<std::int64_t> ms =
                sweep ? parse_int_list(m_list_str) : std::vector<std::int64_t>{m};
            if (ms.empty() || ms.front() < 1) throw std::invalid_argument("--m is required");
            if (normal_str.empty()) normal_str = "0,0,1";
            PlaneContext ctx = make_plane(normal_str, declared_type, patch_str);
            const arw::Vec3 offset = parse_vec3(offset_str);
            if (ctx.spec.patch_a > 1.0 || ctx.spec.patch_b > 1.0)
                std::cerr << "note: patches larger than 1x1 are unvalidated on the torus\n";

            std::vector<double> epsilons;
            if (!eps_list_str.empty()) epsilons = parse_double_list(eps_list_str);

            json config = plane_config_json(ctx, normal_str);
            config["m_list"] = ms;
            config["samples"] = n_samples;
            config["seed"] = common.seed;
            config["ppw"] = ppw;
            config["offset"] = {offset.x, offset.y, offset.z};
            config["threads"] = common.threads;
            if (!epsilons.empty()) config["epsilon"] = epsilons;
            Emitter em(common, sweep ? "sweep" : "simulate", config);

            std::vector<json> rows;
            std::vector<std::vector<std::string>> csv;
            std::vector<std::string> header{"m", "N", "samples", "mean_length", "se_mean",
                                            "variance", "se_variance", "expected_length",
                                            "variance_bound", "kappa", "var_over_bound"};
            for (double eps : epsilons) header.push_back("p_exceed_" + num(eps));

            for (std::int64_t mv : ms) {
                if (!arw::is_admissible(mv) && !common.force)
                    throw std::invalid_argument(
                        "m = " + std::to_string(mv) +
                        " is inadmissible (m mod 8 in {0,4,7}); pass --force to simulate");
                const auto set = arw::enumerate_frequencies(mv, enum_ceiling);
                arw::SimulationRequest req;
                req.n_samples = n_samples;
                req.seed = common.seed;
                req.points_per_wavelength = ppw;
                req.n_threads = common.threads;
                req.type = ctx.type;
                if (ctx.type == arw::PlaneType::i && set.n_points() <= kappa_ceiling)
                    req.kappa = arw::kappa_exact(set, kappa_ceiling, common.threads);
                const auto est = arw::estimate_moments(set, ctx.frame, offset,
                                                       ctx.spec.patch_a, ctx.spec.patch_b,
                                                       req);
                json row = arw::moment_estimate_json(est);
                if (req.kappa) row["kappa"] = *req.kappa;
                const double over =
                    std::isnan(est.var_bound) ? std::numeric_limits<double>::quiet_NaN()
                                              : est.variance / est.var_bound;
                row["var_over_bound"] = arw::json_or_null(over);
                const auto probs =
                    arw::concentration_probabilities(est, ctx.spec.patch_a, ctx.spec.patch_b,
                                                     epsilons);
                if (!epsilons.empty()) {
                    row["epsilon"] = epsilons;
                    row["p_exceed"] = probs;
                }
                rows.push_back(row);

                std::vector<std::string> line{
                    num(mv), num(est.n_points), num(static_cast<std::int64_t>(est.n_samples)),
                    num(est.mean), num(est.se_mean), num(est.variance), num(est.se_variance),
                    num(est.expected_length),
                    std::isnan(est.var_bound) ? "" : num(est.var_bound),
                    req.kappa ? num(*req.kappa) : "", std::isnan(over) ? "" : num(over)};
                for (double p : probs) line.push_back(num(p));
                csv.push_back(line);

                if (!sweep && !per_sample_path.empty()) {
                    std::ofstream ps(per_sample_path);
                    if (!ps)
                        throw std::invalid_argument("cannot open per-sample file: " +
                                                    per_sample_path);
                    ps << "sample_index,length\n";
                    for (std::size_t i = 0; i < est.lengths.size(); ++i)
                        ps << i << ',' << num(est.lengths[i]) << '\n';
                }
            }
            if (as_csv) em.write_csv(header, csv);
            else em.write_json_lines(rows);
            return 0;
        }

        if (app.got_subcommand(c_self)) {
            return run_selftest(common.threads);
        }

        throw std::invalid_argument("no subcommand given");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    } catch (const arw::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 2;
    } catch (const arw::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
