#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "swarmheat/simulator.hpp"

using namespace swarmheat;

namespace {

SwarmModel unit_model(ScalarField desired) {
    SwarmModel m;
    m.domain = Domain::unit_square();
    m.desired = std::move(desired);
    m.kernel = Kernel::gaussian();
    m.h = 0.05;
    m.law.D = 5.0;
    m.law.f_floor = 1e-2;
    return m;
}

ScalarField bimodal() {
    const std::vector<GaussianBump> bumps{{{0.3, 0.35}, 0.1, 1.0}, {{0.7, 0.68}, 0.08, 0.7}};
    return gaussian_mixture_density(Domain::unit_square(), 128, bumps, 1e-3);
}

}  // namespace

TEST_CASE("reflection") {
    const Domain dom = Domain::unit_square();
    const Vec2 inside{0.25, 0.75};
    CHECK(reflect_boundary(inside, dom).x == inside.x);
    CHECK(reflect_boundary(inside, dom).y == inside.y);
    const Vec2 a = reflect_boundary({1.1, 0.5}, dom);
    CHECK(a.x == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(a.y == 0.5);
    const Vec2 b = reflect_boundary({1.1, -0.2}, dom);
    CHECK(b.x == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(b.y == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(reflect_boundary({1.0, 0.0}, dom).x == 1.0);
    CHECK_THROWS_AS(reflect_boundary({2.5, 0.5}, dom), SimulationError);
    CHECK_THROWS_AS(reflect_boundary({std::nan(""), 0.5}, dom), SimulationError);
}

TEST_CASE("initialization") {
    SimConfig cfg;
    cfg.N = 10000;
    cfg.seed = 42;
    const Domain dom = Domain::square(2.0);
    const SwarmState a = init_swarm(cfg, dom), b = init_swarm(cfg, dom);
    REQUIRE(a.size() == cfg.N);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.positions[i].x == b.positions[i].x);
        CHECK(a.positions[i].y == b.positions[i].y);
        mx += a.positions[i].x;
        my += a.positions[i].y;
    }
    mx /= cfg.N;
    my /= cfg.N;
    const double sigma = 2.0 / std::sqrt(12.0 * cfg.N);
    CHECK(std::abs(mx - 1.0) < 3 * sigma);
    CHECK(std::abs(my - 1.0) < 3 * sigma);

    cfg.seed = 43;
    CHECK(init_swarm(cfg, dom).positions[0].x != a.positions[0].x);

    cfg.init.kind = InitSpec::Kind::gaussian;
    cfg.init.mean = {0.1, 1.9};
    cfg.init.sigma = 0.5;
    for (const Vec2& p : init_swarm(cfg, dom).positions) CHECK(dom.contains(p));
}

TEST_CASE("initialization from a file") {
    const auto dir = testsupport::scratch_dir("initfile");
    testsupport::write_text(dir / "p.csv", "x,y\n0.1,0.2\n0.3,0.4\n");
    SimConfig cfg;
    cfg.N = 2;
    cfg.init.kind = InitSpec::Kind::file;
    cfg.init.file = dir / "p.csv";
    const SwarmState s = init_swarm(cfg, Domain::unit_square());
    CHECK(s.positions[1].y == 0.4);
    cfg.N = 3;
    CHECK_THROWS(init_swarm(cfg, Domain::unit_square()));
    testsupport::write_text(dir / "q.csv", "0.1,0.2\n1.3,0.4\n");
    cfg.N = 2;
    cfg.init.file = dir / "q.csv";
    CHECK_THROWS(init_swarm(cfg, Domain::unit_square()));
}

TEST_CASE("zero velocity leaves the swarm in place") {
    const SwarmState s{{{0.1, 0.2}, {0.9, 0.4}}, 0.5};
    const std::vector<Vec2> v(2, Vec2{0.0, 0.0});
    const SwarmState n = advance(s, v, Domain::unit_square(), 0.01);
    CHECK(n.positions[0].x == 0.1);
    CHECK(n.positions[1].y == 0.4);
    CHECK(n.t == doctest::Approx(0.51));
}

TEST_CASE("lone agent on a uniform target stays put") {
    const SwarmModel m = unit_model(uniform_density(Domain::unit_square(), 32));
    const SwarmState s{{{0.5, 0.5}}, 0.0};
    const auto v = agent_velocities(s, m, 1);
    CHECK(v[0].x == 0.0);
    CHECK(v[0].y == 0.0);
}

TEST_CASE("two close agents push apart") {
    const SwarmModel m = unit_model(uniform_density(Domain::unit_square(), 32));
    const SwarmState s{{{0.5 - 0.025, 0.5}, {0.5 + 0.025, 0.5}}, 0.0};
    const auto v = agent_velocities(s, m, 1);
    CHECK(v[0].x < 0.0);
    CHECK(v[1].x > 0.0);
    CHECK(v[0].x == -v[1].x);
    CHECK(std::abs(v[0].y) < 1e-12);
    const SwarmState n = step(s, m, 1e-6);
    CHECK(n.positions[1].x - n.positions[0].x > 0.05);
}

TEST_CASE("step plan") {
    CHECK(step_plan(0.0, 0.1).first == 0);
    const auto [n, dt] = step_plan(1.0, 0.3);
    CHECK(n == 4);
    CHECK(dt == 0.25);
    CHECK(step_plan(1.0, 0.25).first == 4);
}

TEST_CASE("T = 0 returns the initial state and one metrics record") {
    SimConfig cfg;
    cfg.N = 100;
    cfg.T = 0.0;
    const SwarmModel m = unit_model(bimodal());
    const RunResult r = run(cfg, m);
    CHECK(r.steps == 0);
    CHECK(r.metrics.size() == 1);
    const SwarmState init = init_swarm(cfg, m.domain);
    CHECK(r.final_state.positions[7].x == init.positions[7].x);
}

TEST_CASE("metrics on a known field") {
    SimConfig cfg;
    cfg.N = 500;
    const SwarmModel m = unit_model(uniform_density(Domain::unit_square(), 32));
    const SwarmState s = init_swarm(cfg, m.domain);
    const std::vector<Vec2> v(s.size(), Vec2{3.0, 4.0});
    const MetricsRecord rec = compute_metrics(s, v, m, 64, 1);
    CHECK(rec.mean_speed == doctest::Approx(5.0));
    CHECK(rec.E >= std::abs(rec.mass_defect));
    CHECK(rec.V_hat > 0.0);
    CHECK(std::abs(rec.mass_defect) < 5e-2);
}

TEST_CASE("uniform target from a uniform start does not diverge") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SimConfig cfg;
        cfg.N = 1000;
        cfg.seed = seed;
        const SwarmModel m = unit_model(uniform_density(Domain::unit_square(), 64));
        cfg.dt = default_dt(m, cfg.N);
        cfg.T = 200 * cfg.dt;
        cfg.metrics_every = 200;
        const RunResult r = run(cfg, m);
        REQUIRE(r.steps == 200);
        CHECK(r.metrics.back().E <= r.metrics.front().E);
    }
}

TEST_CASE("bimodal target from a uniform start halves the error") {
    SimConfig cfg;
    cfg.N = 1000;
    cfg.T = 0.1;
    cfg.metrics_every = 1000;
    const RunResult r = run(cfg, unit_model(bimodal()));
    CHECK(r.metrics.back().E < 0.5 * r.metrics.front().E);
}

TEST_CASE("results do not depend on the worker count") {
    SimConfig cfg;
    cfg.N = 600;
    cfg.T = 0.003;
    cfg.metrics_every = 10;
    cfg.snapshot_every = 50;
    const SwarmModel m = unit_model(bimodal());
    const RunResult a = run(cfg, m);
    cfg.threads = 5;
    const RunResult b = run(cfg, m);
    REQUIRE(a.metrics.size() == b.metrics.size());
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        CHECK(a.metrics[i].E == b.metrics[i].E);
        CHECK(a.metrics[i].V_hat == b.metrics[i].V_hat);
        CHECK(a.metrics[i].mean_speed == b.metrics[i].mean_speed);
    }
    for (std::size_t i = 0; i < a.final_state.size(); ++i) {
        CHECK(a.final_state.positions[i].x == b.final_state.positions[i].x);
        CHECK(a.final_state.positions[i].y == b.final_state.positions[i].y);
    }
    CHECK(a.snapshots.size() == b.snapshots.size());
}

TEST_CASE("an oversized time step aborts") {
    SimConfig cfg;
    cfg.N = 300;
    cfg.dt = 1.0;
    cfg.T = 5.0;
    CHECK_THROWS_AS(run(cfg, unit_model(bimodal())), SimulationError);
}
