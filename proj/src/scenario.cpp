#include "swarmheat/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "swarmheat/pgm.hpp"
#include "swarmheat/simd/dispatch.hpp"
#include "swarmheat/version.hpp"

namespace swarmheat {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc() || res.ptr != last)
        throw ScenarioError(key, "expected a number, got '" + v + "'");
    return out;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ScenarioError(key, "expected a nonnegative integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ScenarioError(key, "expected true or false, got '" + v + "'");
}

template <class E>
E parse_choice(const std::string& key, const std::string& v,
               std::initializer_list<std::pair<const char*, E>> options) {
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (v == name) return value;
        allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    throw ScenarioError(key, "unknown value '" + v + "' (expected one of " + allowed + ")");
}

std::vector<GaussianBump> parse_components(const std::string& key, const std::string& v) {
    std::vector<GaussianBump> out;
    std::stringstream all(v);
    std::string item;
    while (std::getline(all, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        std::vector<double> nums;
        std::stringstream one(item);
        std::string tok;
        while (std::getline(one, tok, ',')) nums.push_back(parse_number(key, trim(tok)));
        if (nums.size() != 4)
            throw ScenarioError(key, "each component needs 'x, y, sigma, weight', got '" + item + "'");
        out.push_back({{nums[0], nums[1]}, nums[2], nums[3]});
    }
    return out;
}

std::string format_components(const std::vector<GaussianBump>& comps) {
    std::string out;
    for (const auto& c : comps) {
        if (!out.empty()) out += "; ";
        out += format_number(c.center.x) + ", " + format_number(c.center.y) + ", " +
               format_number(c.sigma) + ", " + format_number(c.weight);
    }
    return out;
}

struct Entry {
    const char* key;
    std::function<void(Scenario&, const std::string&, const std::filesystem::path&)> set;
    std::function<std::string(const Scenario&)> get;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
    std::filesystem::path p(v);
    if (p.is_relative()) p = base / p;
    return p.lexically_normal();
}

const char* init_name(InitSpec::Kind k) {
    switch (k) {
        case InitSpec::Kind::gaussian: return "gaussian";
        case InitSpec::Kind::file: return "file";
        case InitSpec::Kind::uniform: break;
    }
    return "uniform";
}

const char* desired_name(DesiredSpec::Kind k) {
    switch (k) {
        case DesiredSpec::Kind::image: return "image";
        case DesiredSpec::Kind::gaussian_mixture: return "gaussian_mixture";
        case DesiredSpec::Kind::uniform: break;
    }
    return "uniform";
}

#define NUM_ENTRY(KEY, FIELD)                                                                       \
    Entry {                                                                                         \
        KEY, [](Scenario& s, const std::string& v, const std::filesystem::path&) {                  \
            s.FIELD = parse_number(KEY, v);                                                         \
        },                                                                                          \
            [](const Scenario& s) { return format_number(s.FIELD); }                                \
    }
#define COUNT_ENTRY(KEY, FIELD)                                                                     \
    Entry {                                                                                         \
        KEY, [](Scenario& s, const std::string& v, const std::filesystem::path&) {                  \
            s.FIELD = static_cast<decltype(s.FIELD)>(parse_count(KEY, v));                          \
        },                                                                                          \
            [](const Scenario& s) { return std::to_string(s.FIELD); }                               \
    }

const std::vector<Entry>& entries() {
    using P = std::filesystem::path;
    static const std::vector<Entry> table = {
        {"name", [](Scenario& s, const std::string& v, const P&) { s.name = v; },
         [](const Scenario& s) { return s.name; }},
        NUM_ENTRY("domain.x0", domain.lower.x),
        NUM_ENTRY("domain.y0", domain.lower.y),
        NUM_ENTRY("domain.lx", domain.length_x),
        NUM_ENTRY("domain.ly", domain.length_y),
        {"desired.type",
         [](Scenario& s, const std::string& v, const P&) {
             s.desired.kind = parse_choice<DesiredSpec::Kind>(
                 "desired.type", v,
                 {{"uniform", DesiredSpec::Kind::uniform},
                  {"gaussian_mixture", DesiredSpec::Kind::gaussian_mixture},
                  {"image", DesiredSpec::Kind::image}});
         },
         [](const Scenario& s) { return std::string(desired_name(s.desired.kind)); }},
        {"desired.image",
         [](Scenario& s, const std::string& v, const P& base) { s.desired.image = resolve(base, v); },
         [](const Scenario& s) { return s.desired.image.string(); }},
        NUM_ENTRY("desired.floor", desired.floor),
        {"desired.invert",
         [](Scenario& s, const std::string& v, const P&) { s.desired.invert = parse_bool("desired.invert", v); },
         [](const Scenario& s) { return std::string(s.desired.invert ? "true" : "false"); }},
        COUNT_ENTRY("desired.resolution", desired.resolution),
        {"desired.components",
         [](Scenario& s, const std::string& v, const P&) {
             s.desired.components = parse_components("desired.components", v);
         },
         [](const Scenario& s) { return format_components(s.desired.components); }},
        {"kernel.name", [](Scenario& s, const std::string& v, const P&) { s.kernel_name = v; },
         [](const Scenario& s) { return s.kernel_name; }},
        NUM_ENTRY("kernel.cutoff", kernel_cutoff),
        {"bandwidth.mode",
         [](Scenario& s, const std::string& v, const P&) {
             s.bandwidth_mode = parse_choice<BandwidthPolicy::Mode>(
                 "bandwidth.mode", v,
                 {{"fixed", BandwidthPolicy::Mode::fixed},
                  {"rule_of_thumb", BandwidthPolicy::Mode::rule_of_thumb}});
         },
         [](const Scenario& s) {
             return std::string(s.bandwidth_mode == BandwidthPolicy::Mode::fixed ? "fixed" : "rule_of_thumb");
         }},
        {"bandwidth.h",
         [](Scenario& s, const std::string& v, const P&) { s.bandwidth_h = parse_number("bandwidth.h", v); },
         [](const Scenario& s) {
             return format_number(s.bandwidth_h.value_or(
                 std::min(s.domain.length_x, s.domain.length_y) / 20.0));
         }},
        NUM_ENTRY("bandwidth.c_nu", bandwidth_c_nu),
        NUM_ENTRY("control.D", control.D),
        {"control.f_floor",
         [](Scenario& s, const std::string& v, const P&) {
             s.control_f_floor = parse_number("control.f_floor", v);
         },
         [](const Scenario& s) {
             return format_number(s.control_f_floor.value_or(1e-2 / s.domain.area()));
         }},
        NUM_ENTRY("control.v_max", control.v_max),
        {"control.denominator",
         [](Scenario& s, const std::string& v, const P&) {
             s.control.denominator = parse_choice<ControlLaw::Denominator>(
                 "control.denominator", v,
                 {{"estimate", ControlLaw::Denominator::estimate},
                  {"desired", ControlLaw::Denominator::desired}});
         },
         [](const Scenario& s) {
             return std::string(s.control.denominator == ControlLaw::Denominator::estimate ? "estimate"
                                                                                           : "desired");
         }},
        COUNT_ENTRY("sim.N", sim.N),
        NUM_ENTRY("sim.dt", sim.dt),
        NUM_ENTRY("sim.T", sim.T),
        COUNT_ENTRY("sim.seed", sim.seed),
        {"sim.boundary",
         [](Scenario&, const std::string& v, const P&) {
             parse_choice<int>("sim.boundary", v, {{"reflect", 0}});
         },
         [](const Scenario&) { return std::string("reflect"); }},
        {"sim.init",
         [](Scenario& s, const std::string& v, const P&) {
             s.sim.init.kind = parse_choice<InitSpec::Kind>(
                 "sim.init", v,
                 {{"uniform", InitSpec::Kind::uniform},
                  {"gaussian", InitSpec::Kind::gaussian},
                  {"file", InitSpec::Kind::file}});
         },
         [](const Scenario& s) { return std::string(init_name(s.sim.init.kind)); }},
        NUM_ENTRY("sim.init_mean_x", sim.init.mean.x),
        NUM_ENTRY("sim.init_mean_y", sim.init.mean.y),
        NUM_ENTRY("sim.init_sigma", sim.init.sigma),
        {"sim.init_file",
         [](Scenario& s, const std::string& v, const P& base) { s.sim.init.file = resolve(base, v); },
         [](const Scenario& s) { return s.sim.init.file.string(); }},
        COUNT_ENTRY("metrics.every", sim.metrics_every),
        COUNT_ENTRY("metrics.grid", sim.metrics_grid),
        COUNT_ENTRY("snapshot.every", sim.snapshot_every),
        COUNT_ENTRY("output.trajectory_every", trajectory_every),
        {"runtime.simd", [](Scenario& s, const std::string& v, const P&) { s.simd = v; },
         [](const Scenario& s) { return s.simd; }},
        COUNT_ENTRY("oracle.n", oracle.n),
        NUM_ENTRY("oracle.fraction", oracle.fraction),
        {"oracle.scheme",
         [](Scenario& s, const std::string& v, const P&) {
             s.oracle.scheme = parse_choice<FluxScheme>(
                 "oracle.scheme", v, {{"central", FluxScheme::central}, {"upwind", FluxScheme::upwind}});
         },
         [](const Scenario& s) {
             return std::string(s.oracle.scheme == FluxScheme::central ? "central" : "upwind");
         }},
        COUNT_ENTRY("oracle.crossval_grid", oracle.crossval_grid),
        NUM_ENTRY("oracle.crossval_max_time", oracle.crossval_max_time),
    };
    return table;
}

#undef NUM_ENTRY
#undef COUNT_ENTRY

[[noreturn]] void fail(const char* key, const std::string& what) { throw ScenarioError(key, what); }

}  // namespace

void validate(const Scenario& s) {
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0) || std::isnan(v)) fail(key, "must be positive (got " + format_number(v) + ")");
    };
    auto finite_positive = [&](const char* key, double v) {
        positive(key, v);
        if (!std::isfinite(v)) fail(key, "must be finite");
    };
    if (!is_finite(s.domain.lower)) fail("domain.x0", "domain corner must be finite");
    finite_positive("domain.lx", s.domain.length_x);
    finite_positive("domain.ly", s.domain.length_y);

    if (!(s.desired.floor >= 0.0) || !std::isfinite(s.desired.floor))
        fail("desired.floor", "must be nonnegative");
    if (s.desired.resolution < 1) fail("desired.resolution", "must be at least 1");
    switch (s.desired.kind) {
        case DesiredSpec::Kind::image:
            if (s.desired.image.empty()) fail("desired.image", "required when desired.type = image");
            if (!std::filesystem::exists(s.desired.image))
                fail("desired.image", "file '" + s.desired.image.string() + "' does not exist");
            break;
        case DesiredSpec::Kind::gaussian_mixture:
            if (s.desired.components.empty())
                fail("desired.components", "required when desired.type = gaussian_mixture");
            for (const auto& c : s.desired.components)
                if (!(c.sigma > 0.0) || !(c.weight > 0.0))
                    fail("desired.components", "sigma and weight must be positive");
            break;
        case DesiredSpec::Kind::uniform: break;
    }

    if (s.kernel_name != "gaussian" && s.kernel_name != "epanechnikov")
        fail("kernel.name", "unknown kernel '" + s.kernel_name + "' (expected gaussian or epanechnikov)");
    positive("kernel.cutoff", s.kernel_cutoff);
    if (s.bandwidth_h) finite_positive("bandwidth.h", *s.bandwidth_h);
    finite_positive("bandwidth.c_nu", s.bandwidth_c_nu);

    finite_positive("control.D", s.control.D);
    if (s.control_f_floor) finite_positive("control.f_floor", *s.control_f_floor);
    positive("control.v_max", s.control.v_max);

    if (s.sim.N < 1) fail("sim.N", "must be at least 1");
    if (!(s.sim.dt >= 0.0) || !std::isfinite(s.sim.dt)) fail("sim.dt", "must be positive (0 selects the default)");
    if (!(s.sim.T >= 0.0) || !std::isfinite(s.sim.T)) fail("sim.T", "must be nonnegative");
    if (s.sim.dt > 0.0 && s.sim.T > 0.0 && s.sim.T < s.sim.dt) fail("sim.T", "must be at least sim.dt");
    if (s.sim.init.kind == InitSpec::Kind::gaussian) finite_positive("sim.init_sigma", s.sim.init.sigma);
    if (s.sim.init.kind == InitSpec::Kind::file) {
        if (s.sim.init.file.empty()) fail("sim.init_file", "required when sim.init = file");
        if (!std::filesystem::exists(s.sim.init.file))
            fail("sim.init_file", "file '" + s.sim.init.file.string() + "' does not exist");
    }
    if (s.sim.metrics_every < 1) fail("metrics.every", "must be at least 1");
    if (s.sim.metrics_grid < 2) fail("metrics.grid", "must be at least 2");
    try {
        simd::resolve_level(s.simd);
    } catch (const std::invalid_argument& e) {
        fail("runtime.simd", e.what());
    }
    if (s.oracle.n < 4) fail("oracle.n", "must be at least 4");
    if (!(s.oracle.fraction > 0.0 && s.oracle.fraction <= 1.0)) fail("oracle.fraction", "must be in (0, 1]");
    if (s.oracle.crossval_grid < 4) fail("oracle.crossval_grid", "must be at least 4");
    if (!(s.oracle.crossval_max_time >= 0.0)) fail("oracle.crossval_max_time", "must be nonnegative");
}

Scenario parse_scenario_text(const std::string& text, const std::filesystem::path& base_dir) {
    std::map<std::string, const Entry*> lookup;
    for (const Entry& e : entries()) lookup[e.key] = &e;

    Scenario s;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (const auto hash = line.find(" #"); hash != std::string::npos) line = trim(line.substr(0, hash));
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("line " + std::to_string(lineno), "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        const auto it = lookup.find(key);
        if (it == lookup.end()) throw ScenarioError(key, "unknown key");
        if (!seen.insert(key).second) throw ScenarioError(key, "duplicate key");
        it->second->set(s, value, base_dir);
    }
    validate(s);
    return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path.string(), "cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), std::filesystem::absolute(path).parent_path());
}

std::string to_text(const Scenario& s) {
    std::string out;
    for (const Entry& e : entries()) {
        const std::string v = e.get(s);
        if (v.empty()) continue;
        out += e.key;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

ScalarField build_desired(const Scenario& s) {
    switch (s.desired.kind) {
        case DesiredSpec::Kind::image:
            return ingest_image(s.desired.image, s.domain, {s.desired.floor, s.desired.invert});
        case DesiredSpec::Kind::gaussian_mixture:
            return gaussian_mixture_density(s.domain, s.desired.resolution, s.desired.components,
                                            s.desired.floor);
        case DesiredSpec::Kind::uniform: break;
    }
    return uniform_density(s.domain, s.desired.resolution);
}

SwarmModel build_model(const Scenario& s, const SwarmState& initial) {
    validate(s);
    SwarmModel m;
    m.domain = s.domain;
    m.desired = build_desired(s);
    m.kernel = Kernel::from_name(s.kernel_name, s.kernel_cutoff);
    BandwidthPolicy policy;
    policy.mode = s.bandwidth_mode;
    policy.h = s.bandwidth_h.value_or(std::min(s.domain.length_x, s.domain.length_y) / 20.0);
    policy.c_nu = s.bandwidth_c_nu;
    if (policy.mode == BandwidthPolicy::Mode::rule_of_thumb) policy.sigma_hat = sample_sigma(initial.positions);
    m.h = select_bandwidth(policy, initial.size(), 2, m.kernel.order());
    m.law = s.control;
    m.law.f_floor = s.control_f_floor.value_or(1e-2 / s.domain.area());
    m.law.validate();
    return m;
}

namespace {

void write_metrics_row(std::ostream& out, const MetricsRecord& m) {
    out << format_number(m.t) << ',' << format_number(m.E) << ',' << format_number(m.V_hat) << ','
        << format_number(m.mass_defect) << ',' << format_number(m.mean_speed) << '\n';
}

std::string snapshot_name(std::size_t step) {
    std::string digits = std::to_string(step);
    if (digits.size() < 8) digits.insert(0, 8 - digits.size(), '0');
    return "kde_" + digits + ".pgm";
}

}  // namespace

ScenarioOutcome run_scenario(Scenario s, const std::filesystem::path& out_dir,
                             const RunOptions& options) {
    if (options.seed) s.sim.seed = *options.seed;
    if (options.snapshot_every) s.sim.snapshot_every = *options.snapshot_every;
    s.sim.threads = std::max(1u, options.threads);
    validate(s);

    const simd::SimdLevel level = simd::resolve_level(s.simd);
    simd::set_active_level(level);
    s.simd = std::string(simd::to_string(level));

    const SwarmState initial = init_swarm(s.sim, s.domain);
    const SwarmModel model = build_model(s, initial);
    if (s.sim.dt == 0.0) s.sim.dt = default_dt(model, initial.size());
    s.bandwidth_h = s.bandwidth_mode == BandwidthPolicy::Mode::fixed ? std::optional<double>(model.h)
                                                                     : s.bandwidth_h;
    s.control_f_floor = model.law.f_floor;

    std::filesystem::create_directories(out_dir / "snapshots");
    {
        std::ofstream manifest(out_dir / "manifest.scn");
        manifest << "# swarmheat " << kVersion << " run manifest; rerun with\n"
                 << "#   swarmheat run --scenario manifest.scn --out <dir>\n"
                 << "# threads used: " << s.sim.threads << " (results do not depend on it)\n"
                 << to_text(s);
    }
    write_snapshot(out_dir / "snapshots" / "desired.pgm", model.desired);

    std::ofstream metrics(out_dir / "metrics.csv");
    metrics << "t,E,V_hat,mass_defect,mean_speed\n";
    std::ofstream trajectory(out_dir / "trajectory.csv");
    trajectory << "t,agent_id,x,y,vx,vy\n";
    const std::size_t traj_every = s.trajectory_every ? s.trajectory_every : s.sim.metrics_every;
    const std::size_t n_steps = step_plan(s.sim.T, s.sim.dt).first;

    RunCallbacks cb;
    cb.on_state = [&](std::size_t k, const SwarmState& st, std::span<const Vec2> v) {
        if (k % traj_every != 0 && k != n_steps) return;
        const std::string t = format_number(st.t);
        for (std::size_t i = 0; i < st.size(); ++i)
            trajectory << t << ',' << i << ',' << format_number(st.positions[i].x) << ','
                       << format_number(st.positions[i].y) << ',' << format_number(v[i].x) << ','
                       << format_number(v[i].y) << '\n';
    };
    cb.on_metrics = [&](const MetricsRecord& m) {
        write_metrics_row(metrics, m);
        spdlog::debug("t={} E={} V={} mass={} speed={}", m.t, m.E, m.V_hat, m.mass_defect, m.mean_speed);
    };
    cb.on_snapshot = [&](const Snapshot& snap) {
        write_snapshot(out_dir / "snapshots" / snapshot_name(snap.step), snap.field);
    };

    ScenarioOutcome outcome;
    spdlog::info("scenario '{}': N={} h={} D={} dt={} steps={} simd={}", s.name, s.sim.N, model.h,
                 model.law.D, s.sim.dt, n_steps, s.simd);
    try {
        outcome.result = run_from(initial, s.sim, model, cb);
    } catch (const SimulationError& e) {
        outcome.exit_code = 2;
        outcome.message = std::string("simulation aborted: ") + e.what();
        spdlog::error("{}", outcome.message);
        return outcome;
    }
    if (!metrics || !trajectory) {
        outcome.exit_code = 3;
        outcome.message = "failed writing outputs to " + out_dir.string();
        spdlog::error("{}", outcome.message);
        return outcome;
    }
    const auto& recs = outcome.result.metrics;
    outcome.message = "done: E " + format_number(recs.front().E) + " -> " + format_number(recs.back().E);
    spdlog::info("{}", outcome.message);
    return outcome;
}

}  // namespace swarmheat
