#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "radshoot/system.hpp"

using namespace radshoot;

namespace {

// central finite difference of the declared potential, the independent
// oracle for every gradient-defined field below
double fd_partial(const SystemSpec& spec, std::vector<double> u, int j) {
    const double h = 1e-6;
    auto up = u, um = u;
    up[static_cast<std::size_t>(j)] += h;
    um[static_cast<std::size_t>(j)] -= h;
    return (spec.eval_potential(up) - spec.eval_potential(um)) / (2 * h);
}

}  // namespace

TEST_CASE("builtin fields match hand-evaluated formulas") {
    auto sc = builtin("sign_changing", {{"p", 5.0}});
    CHECK(sc.eval_f(std::vector<double>{1.0, 2.0}) ==
          std::vector<double>{31.0, 1.0});

    auto pq = builtin("sign_changing_pq", {{"p", 5.0}, {"q", 7.0}});
    auto fpq = pq.eval_f(std::vector<double>{1.5, 0.5});
    CHECK(fpq[0] == doctest::Approx(std::pow(0.5, 5) + std::pow(0.5, 7) -
                                    std::pow(1.5, 5)).epsilon(1e-15));
    CHECK(fpq[1] == doctest::Approx(std::pow(1.5, 5)).epsilon(1e-15));

    auto hls = builtin("hls", {{"p", 3.0}, {"q", 2.0}});
    CHECK(hls.eval_f(std::vector<double>{2.0, 3.0}) ==
          std::vector<double>{27.0, 4.0});

    auto le = builtin("lane_emden_scalar", {{"p", 3.0}});
    CHECK(le.L == 1);
    CHECK(le.eval_f(std::vector<double>{2.0}) == std::vector<double>{8.0});

    auto zero = builtin("zero", {});
    CHECK(zero.eval_f(std::vector<double>{1.0, 2.0}) ==
          std::vector<double>{0.0, 0.0});
}

TEST_CASE("potential systems: field equals the potential gradient") {
    auto t1 = builtin("potential_type1", {{"p", 7.0}});
    auto t2 = builtin("potential_type2", {{"p", 7.0}});
    REQUIRE(t1.potential_kind == PotentialKind::TypeI);
    REQUIRE(t2.potential_kind == PotentialKind::TypeII);

    // type I: f_i = dF/du_i; type II swaps the partials between components
    for (auto u : {std::vector<double>{1.0, 2.0}, std::vector<double>{0.3, 1.7},
                   std::vector<double>{2.0, 0.5}}) {
        auto f1 = t1.eval_f(u);
        CHECK(f1[0] == doctest::Approx(fd_partial(t1, u, 0)).epsilon(1e-8));
        CHECK(f1[1] == doctest::Approx(fd_partial(t1, u, 1)).epsilon(1e-8));
        auto f2 = t2.eval_f(u);
        CHECK(f2[0] == doctest::Approx(fd_partial(t2, u, 1)).epsilon(1e-8));
        CHECK(f2[1] == doctest::Approx(fd_partial(t2, u, 0)).epsilon(1e-8));
    }

    // hand-computed spot values
    auto f = t1.eval_f(std::vector<double>{1.0, 2.0});
    CHECK(f[0] == doctest::Approx(78.0).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(191.0).epsilon(1e-14));

    auto t2p3 = builtin("potential_type2", {{"p", 3.0}});
    CHECK(t2p3.eval_f(std::vector<double>{1.0, 0.0}) ==
          std::vector<double>{2.0, 1.0});

    CHECK(validate_potential(t1, 200, 3).ok);
    CHECK(validate_potential(t2, 200, 3).ok);
    // a deliberately mislabeled potential fails validation
    auto wrong = t2;
    wrong.potential_kind = PotentialKind::TypeI;
    CHECK(!validate_potential(wrong, 200, 3).ok);
}

TEST_CASE("domain clamp on the orthant boundary") {
    auto sc = builtin("sign_changing", {{"p", 5.0}});
    std::vector<double> edge{-0.5 * kClampTol, 1.0};
    CHECK(sc.eval_f(edge) == sc.eval_f(std::vector<double>{0.0, 1.0}));
    CHECK_THROWS_AS(sc.eval_f(std::vector<double>{-1e-3, 1.0}), DomainError);

    std::vector<double> out(2);
    sc.eval_f_projected(std::vector<double>{-0.5, 1.0}, out);
    CHECK(out == sc.eval_f(std::vector<double>{0.0, 1.0}));
}

TEST_CASE("builtin construction errors") {
    CHECK_THROWS_AS(builtin("no_such_family", {}), UnknownSystem);
    CHECK_THROWS_AS(builtin("sign_changing", {}), MissingParam);
    CHECK_THROWS_AS(builtin("hls", {{"p", 3.0}}), MissingParam);
    CHECK_THROWS_AS(builtin("sign_changing", {{"p", 5.0}, {"n", 2.0}}),
                    InvalidInput);
    CHECK(builtin("sign_changing", {{"p", 5.0}, {"n", 4.0}}).n == 4);
}

TEST_CASE("custom systems agree with their builtin twins") {
    auto ref = builtin("sign_changing", {{"p", 5.0}});
    auto made = make_custom_system("twin", 2, 3, {{"p", 5.0}},
                                   {"u2^p - u1^p", "u1^p"});
    for (auto u : {std::vector<double>{0.5, 0.5}, std::vector<double>{2.0, 0.1},
                   std::vector<double>{1.3, 2.7}}) {
        auto a = ref.eval_f(u);
        auto b = made.eval_f(u);
        CHECK(std::fabs(a[0] - b[0]) <= 1e-12 * std::max(1.0, std::fabs(a[0])));
        CHECK(std::fabs(a[1] - b[1]) <= 1e-12 * std::max(1.0, std::fabs(a[1])));
    }
    CHECK_THROWS_AS(
        make_custom_system("bad", 2, 3, {}, {"u1 + q", "u1"}),
        UnknownIdentifier);
}

TEST_CASE("decay check accepts the conservative families") {
    for (auto* name : {"sign_changing", "hls"}) {
        auto spec = builtin(name, {{"p", 5.0}, {"q", 5.0}});
        auto rep = check_decay(spec, 10.0, 2000, 7);
        CHECK(rep.ok);
        CHECK(rep.worst_value >= -kAssumeTol);
        CHECK(rep.sample_count >= 2000);
    }
}

TEST_CASE("decay check rejects a field with negative total mass flux") {
    auto bad = make_custom_system("sink", 2, 3, {},
                                  {"0 - u1^2", "0 - u2^2"});
    auto rep = check_decay(bad, 10.0, 2000, 7);
    CHECK(!rep.ok);
    CHECK(rep.worst_value < -150.0);  // the corner of the box is ~ -200
    REQUIRE(rep.worst_point.size() == 2);
    CHECK(rep.worst_point[0] + rep.worst_point[1] > 15.0);
}

TEST_CASE("control inequality near a one-zero boundary point") {
    auto sc = builtin("sign_changing", {{"p", 5.0}});
    std::vector<double> abar{0.0, 1.0};
    auto entry = check_control_inequality(sc, abar, 0.1, 2000, 7);
    CHECK(entry.ok);
    CHECK(entry.zero_set == std::vector<int>{0});
    // the surviving component is tiny near the wall: any C >= 1 works
    CHECK(entry.c_est == 1.0);
    CHECK(entry.worst_ratio < 1e-3);

    // direction matters: a large surviving component forces a large C
    auto lop = make_custom_system("lopsided", 2, 3, {}, {"u2", "100"});
    auto big = check_control_inequality(lop, abar, 0.1, 500, 7);
    CHECK(big.ok);
    CHECK(big.c_est > 50.0);

    // negative supply at the zero coordinate cannot be dominated at all
    auto neg = make_custom_system("drain", 2, 3, {}, {"0 - 1", "1"});
    CHECK(!check_control_inequality(neg, abar, 0.1, 500, 7).ok);

    // 0 <= C * 0 counts as satisfied
    auto zero = builtin("zero", {});
    auto degenerate = check_control_inequality(zero, abar, 0.1, 500, 7);
    CHECK(degenerate.ok);
    CHECK(degenerate.c_est == 1.0);
}

TEST_CASE("control inequality input validation") {
    auto sc = builtin("sign_changing", {{"p", 5.0}});
    std::vector<double> interior{0.5, 0.5};
    CHECK_THROWS_AS(check_control_inequality(sc, interior, 0.1, 100, 7),
                    InvalidBoundaryPoint);
    std::vector<double> allzero{0.0, 0.0};
    CHECK_THROWS_AS(check_control_inequality(sc, allzero, 0.1, 100, 7),
                    InvalidBoundaryPoint);
    std::vector<double> abar{0.0, 1.0};
    CHECK_THROWS_AS(check_control_inequality(sc, abar, -0.1, 100, 7),
                    InvalidInput);
}

TEST_CASE("delta0 certification sweeps down to a working radius") {
    auto sc = builtin("sign_changing", {{"p", 5.0}});
    std::vector<double> abar{0.0, 1.0};
    CHECK(certify_delta0(sc, abar, 0.25, 500, 7) == 0.25);
    auto neg = make_custom_system("drain", 2, 3, {}, {"0 - 1", "1"});
    CHECK(certify_delta0(neg, abar, 0.25, 500, 7) == 0.0);
}

TEST_CASE("bundled assumption report") {
    auto spec = builtin("sign_changing_pq", {{"p", 5.0}, {"q", 7.0}});
    auto rep = check_assumptions(spec, 10.0, 1.0, 2000, 7);
    CHECK(rep.decay.ok);
    REQUIRE(rep.control_entries.size() == 2);
    for (const auto& e : rep.control_entries) {
        CHECK(e.ok);
        CHECK(e.delta0 > 0.0);
    }
    CHECK(rep.sample_count > 2000);

    auto pot = builtin("potential_type1", {{"p", 7.0}});
    auto prep = check_assumptions(pot, 10.0, 1.0, 2000, 7);
    CHECK(prep.decay.ok);
    CHECK(prep.potential.ok);
    CHECK(prep.potential.sample_count > 0);
}
