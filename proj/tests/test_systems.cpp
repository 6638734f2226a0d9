#include <cmath>
#include <sstream>

#include <doctest.h>

#include "peakgate/running_example.hpp"
#include "peakgate/systems.hpp"

using namespace peakgate;
namespace rex = peakgate::running_example;

TEST_CASE("iterate reproduces the exact published orbit points") {
    const auto sys = rex::builtin_system();

    const State x1{-1.3, -0.3};
    const State h_x1 = iterate(sys, x1, 1);
    CHECK(std::abs(h_x1[0] - (-357.0 / 4000.0)) < 1e-12);
    CHECK(std::abs(h_x1[1] - (-767.0 / 4000.0)) < 1e-12);

    const State z0{2.2, -2.0};
    const State h_z0 = iterate(sys, z0, 1);
    CHECK(std::abs(h_z0[0] - 2.406) < 1e-12);
    CHECK(std::abs(h_z0[1] - (-1.685)) < 1e-12);

    CHECK(iterate(sys, x1, 0) == x1);
}

TEST_CASE("affine and polynomial maps evaluate correctly") {
    const auto affine = make_affine({{0.0, 1.0}, {-1.0, 0.0}}, {1.0, 2.0});
    const State y = iterate(affine, State{3.0, 4.0}, 1);
    CHECK(y == State{5.0, -1.0});

    // T(x) = (x1^2, x1 * x2).
    const auto poly = make_polynomial(
        2, {{{1.0, {2, 0}}}, {{1.0, {1, 1}}}});
    const State p = iterate(poly, State{3.0, 2.0}, 1);
    CHECK(p == State{9.0, 6.0});

    CHECK_THROWS_AS(make_affine({{1.0, 0.0}}, {0.0, 0.0}), ConfigError);
}

TEST_CASE("iterate raises NonFinite on orbit blow-up") {
    // T(x) = x^2 starting at 10 overflows within a dozen steps.
    const auto square = make_polynomial(1, {{{1.0, {2}}}});
    CHECK_THROWS_AS(iterate(square, State{10.0}, 200), NonFiniteError);
}

TEST_CASE("nu_sequence takes the max over the initial set") {
    const auto sys = rex::builtin_system();
    const auto pi1 = make_projection(0);

    const auto& sc_a = rex::scenario('a');
    const auto nu_a = nu_sequence(sys, sc_a.points, pi1);
    CHECK(nu_a[2] == doctest::Approx(0.03463).epsilon(1e-3));

    const auto& sc_b = rex::scenario('b');
    const auto nu_b = nu_sequence(sys, sc_b.points, pi1);
    CHECK(nu_b[0] == 0.7);

    // Singleton consistency: nu_k equals the single orbit value bitwise.
    const auto& sc_c = rex::scenario('c');
    const auto nu_c = nu_sequence(sys, sc_c.points, pi1);
    for (std::size_t k = 0; k <= 20; ++k) {
        CHECK(nu_c[k] == iterate(sys, sc_c.points.points[0], k)[0]);
    }
}

TEST_CASE("nu_sequence memoization matches fresh evaluation bitwise") {
    const auto sys = rex::builtin_system();
    const auto& sc = rex::scenario('b');
    const auto obj = make_projection(1);
    const auto warm = nu_sequence(sys, sc.points, obj);
    for (std::size_t k = 0; k <= 30; ++k) (void)warm[k];
    for (std::size_t k = 30; k-- > 0;) {
        const auto fresh = nu_sequence(sys, sc.points, obj);
        CHECK(warm[k] == fresh[k]);
    }
}

TEST_CASE("objectives catalog") {
    const auto linear = make_linear({2.0, -1.0});
    CHECK(linear.eval(State{3.0, 4.0}) == 2.0);

    const auto quad = make_quadratic({{1.0, 0.0}, {0.0, 2.0}}, {0.0, 1.0});
    CHECK(quad.eval(State{1.0, 2.0}) == doctest::Approx(11.0));

    const auto norm = make_norm();
    CHECK(norm.eval(State{3.0, 4.0}) == doctest::Approx(5.0));
}

TEST_CASE("normalize_objective shifts so the origin maps to zero") {
    Objective shifted_src;
    shifted_src.eval = [](std::span<const double> x) { return x[0] + 5.0; };
    const auto [shifted, offset] = normalize_objective(shifted_src, 2);
    CHECK(offset == 5.0);
    CHECK(shifted.eval(State{0.0, 0.0}) == 0.0);
    CHECK(shifted.eval(State{2.0, 0.0}) == 2.0);
    CHECK(shifted.offset_removed);

    const auto pi1 = make_projection(0);
    const auto [same, zero] = normalize_objective(pi1, 2);
    CHECK(zero == 0.0);
    CHECK(same.eval(State{0.4, 0.0}) == 0.4);
}

TEST_CASE("orbit_table contains the published rows") {
    const auto sys = rex::builtin_system();

    const auto table_b = orbit_table(sys, rex::scenario('b').points, 3);
    REQUIRE(table_b.rows.size() == 8);
    const auto& y2_row3 = table_b.rows[7];
    CHECK(y2_row3.point_index == 1);
    CHECK(y2_row3.k == 3);
    CHECK(y2_row3.state[0] == doctest::Approx(-0.01873).epsilon(1e-3));
    CHECK(y2_row3.state[1] == doctest::Approx(0.04183).epsilon(1e-3));

    const auto table_c = orbit_table(sys, rex::scenario('c').points, 5);
    const auto& z0_row5 = table_c.rows[5];
    CHECK(z0_row5.k == 5);
    CHECK(z0_row5.state[0] == doctest::Approx(0.37921).epsilon(1e-4));
    CHECK(z0_row5.state[1] == doctest::Approx(0.15155).epsilon(1e-4));

    const auto table_0 = orbit_table(sys, rex::scenario('a').points, 0);
    REQUIRE(table_0.rows.size() == 2);
    CHECK(table_0.rows[0].state == rex::scenario('a').points.points[0]);
    CHECK(table_0.rows[1].state == rex::scenario('a').points.points[1]);
}

TEST_CASE("orbit_table truncates a point at the first non-finite row") {
    const auto square = make_polynomial(1, {{{1.0, {2}}}});
    InitialSet init;
    init.points = {State{10.0}, State{0.5}};
    const auto table = orbit_table(square, init, 30);

    std::size_t point0_rows = 0;
    for (const auto& row : table.rows) {
        if (row.point_index == 0) ++point0_rows;
        if (row.point_index == 1) CHECK(row.finite);
    }
    CHECK(point0_rows < 31);           // truncated
    CHECK_FALSE(table.rows[point0_rows - 1].finite);
}

TEST_CASE("orbit CSV round-trips bitwise") {
    const auto sys = rex::builtin_system();
    const auto table = orbit_table(sys, rex::scenario('d').points, 17);

    std::stringstream buffer;
    write_orbit_csv(table, buffer);
    const auto back = read_orbit_csv(buffer);

    REQUIRE(back.rows.size() == table.rows.size());
    CHECK(back.dimension == table.dimension);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        CHECK(back.rows[i].point_index == table.rows[i].point_index);
        CHECK(back.rows[i].k == table.rows[i].k);
        CHECK(back.rows[i].state == table.rows[i].state);
        CHECK(back.rows[i].norm_sq == table.rows[i].norm_sq);
    }

    const auto init = initial_set_from_table(back);
    CHECK(init.points == rex::scenario('d').points.points);
}

TEST_CASE("format_double emits shortest round-trip decimals") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(0.0) == "0");
    const double third = 1.0 / 3.0;
    CHECK(std::stod(format_double(third)) == third);
}
