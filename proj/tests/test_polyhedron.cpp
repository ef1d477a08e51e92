#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>

#include "catalog.hpp"
#include "lp_brute.hpp"
#include "nsw/polyhedron.hpp"

using namespace nsw;
using lp_brute::dot;
using lp_brute::random_polyhedron;

TEST_CASE("lp on the Example 6.4 dominant pair") {
    auto g = catalog::ex6_4_pairs();
    RationalPolyhedron p = g.polyhedron_of({{3, 0}, 3});
    LPOutcome out = lp_maximize(p, {Rational(2), Rational(-1)});
    REQUIRE(out.status == LPStatus::Optimal);
    CHECK(out.value == Rational(2, 3));
    CHECK(out.witness == std::vector<Rational>{Rational(1, 3), Rational(0)});
}

TEST_CASE("lp on the nonnegative orthant") {
    RationalPolyhedron p(2);
    LPOutcome down = lp_maximize(p, {Rational(0), Rational(-1)});
    REQUIRE(down.status == LPStatus::Optimal);
    CHECK(down.value == Rational(0));

    LPOutcome up = lp_maximize(p, {Rational(1), Rational(0)});
    CHECK(up.status == LPStatus::Unbounded);
    CHECK(dot({Rational(1), Rational(0)}, up.direction) > Rational(0));
}

TEST_CASE("full-dimensionality checks") {
    auto g = catalog::ex6_4_pairs();
    CHECK_FALSE(is_full_dim(g.polyhedron_of({{2, 0}, 4})));
    CHECK_FALSE(is_full_dim(g.polyhedron_of({{1, 0}, 5})));
    CHECK(is_full_dim(g.polyhedron_of({{3, 0}, 3})));

    RationalPolyhedron square(2);
    square.add_row({Rational(1), Rational(0)}, Rational(1));
    square.add_row({Rational(0), Rational(1)}, Rational(1));
    CHECK(is_full_dim(square));

    RationalPolyhedron point(1);
    point.add_row({Rational(1)}, Rational(0));
    CHECK_FALSE(is_full_dim(point));

    RationalPolyhedron empty(1);
    empty.add_row({Rational(1)}, Rational(-1));
    CHECK_FALSE(is_full_dim(empty));
    CHECK(lp_maximize(empty, {Rational(1)}).status == LPStatus::Infeasible);
}

TEST_CASE("optimal face dimension and boundedness") {
    auto g = catalog::ex6_4_pairs();
    RationalPolyhedron p = g.polyhedron_of({{3, 0}, 3});
    FaceInfo f = optimal_face(p, {Rational(2), Rational(-1)}, Rational(2, 3));
    CHECK(f.dim == 0);
    CHECK(f.bounded);

    RationalPolyhedron square(2);
    square.add_row({Rational(1), Rational(0)}, Rational(1));
    square.add_row({Rational(0), Rational(1)}, Rational(1));
    FaceInfo whole = optimal_face(square, {Rational(0), Rational(0)}, Rational(0));
    CHECK(whole.dim == 2);
    CHECK(whole.bounded);

    RationalPolyhedron orthant(2);
    FaceInfo axis = optimal_face(orthant, {Rational(0), Rational(-1)}, Rational(0));
    CHECK(axis.dim == 1);
    CHECK_FALSE(axis.bounded);
}

TEST_CASE("optimal_face rejects a wrong optimum") {
    RationalPolyhedron square(2);
    square.add_row({Rational(1), Rational(0)}, Rational(1));
    square.add_row({Rational(0), Rational(1)}, Rational(1));
    CHECK_THROWS_AS(optimal_face(square, {Rational(1), Rational(0)}, Rational(2)),
                    InconsistentInput);
}

TEST_CASE("simplex agrees with vertex enumeration on random instances") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<long> entry(-3, 3);
    for (int iter = 0; iter < 300; ++iter) {
        RationalPolyhedron p = random_polyhedron(rng);
        std::vector<Rational> c(p.N);
        for (auto& v : c) v = Rational(entry(rng));
        CHECK(lp_brute::agrees_with_enumeration(p, c));
    }
}

TEST_CASE("lp determinism") {
    auto g = catalog::ex6_4_pairs();
    RationalPolyhedron p = g.polyhedron_of({{0, 1}, 4});
    std::vector<Rational> c{Rational(-1), Rational(0)};
    LPOutcome a = lp_maximize(p, c);
    LPOutcome b = lp_maximize(p, c);
    REQUIRE(a.status == LPStatus::Optimal);
    CHECK(a.value == Rational(-1, 3));
    CHECK(a.witness == b.witness);
    CHECK(a.value == b.value);
}

TEST_CASE("positive rescaling of the objective") {
    std::mt19937 rng(77);
    for (int iter = 0; iter < 100; ++iter) {
        RationalPolyhedron p = random_polyhedron(rng);
        std::vector<Rational> c(p.N);
        std::uniform_int_distribution<long> entry(-3, 3);
        for (auto& v : c) v = Rational(entry(rng));
        LPOutcome a = lp_maximize(p, c);
        std::vector<Rational> c2(p.N);
        Rational scale(3, 2);
        for (std::size_t j = 0; j < c.size(); ++j) c2[j] = c[j] * scale;
        LPOutcome b = lp_maximize(p, c2);
        CHECK(a.status == b.status);
        if (a.status == LPStatus::Optimal) {
            CHECK(b.value == a.value * scale);
            CHECK(a.witness == b.witness);
            if (!(a.value.is_zero() && c == std::vector<Rational>(p.N, Rational(0)))) {
                FaceInfo fa = optimal_face(p, c, a.value);
                FaceInfo fb = optimal_face(p, c2, b.value);
                CHECK(fa.dim == fb.dim);
                CHECK(fa.bounded == fb.bounded);
            }
        }
    }
}

TEST_CASE("face dimension is antitone under added tight constraints") {
    std::mt19937 rng(123);
    std::uniform_int_distribution<long> entry(-3, 3);
    int done = 0;
    for (int iter = 0; iter < 400 && done < 100; ++iter) {
        RationalPolyhedron p = random_polyhedron(rng);
        std::vector<Rational> c(p.N);
        for (auto& v : c) v = Rational(entry(rng));
        LPOutcome out = lp_maximize(p, c);
        if (out.status != LPStatus::Optimal) continue;
        FaceInfo before = optimal_face(p, c, out.value);
        // a constraint tight at the witness
        std::vector<Rational> normal(p.N);
        for (auto& v : normal) v = Rational(entry(rng));
        RationalPolyhedron q = p;
        q.add_row(normal, dot(normal, out.witness));
        LPOutcome out2 = lp_maximize(q, c);
        REQUIRE(out2.status == LPStatus::Optimal);
        if (out2.value != out.value) continue; // optimum moved, face changed entirely
        FaceInfo after = optimal_face(q, c, out2.value);
        CHECK(after.dim <= before.dim);
        ++done;
    }
    CHECK(done > 0);
}

TEST_CASE("full dimension yields N+1 affinely independent feasible points") {
    auto g = catalog::ex6_4_pairs();
    for (const auto& pair : g.pairs()) {
        RationalPolyhedron p = g.polyhedron_of(pair);
        if (!is_full_dim(p)) continue;
        // recover an interior point from the slack LP used by is_full_dim
        RationalPolyhedron aux(p.N + 1);
        for (const auto& [normal, rhs] : p.rows) {
            std::vector<Rational> row = normal;
            row.push_back(Rational(1));
            aux.add_row(std::move(row), rhs);
        }
        for (int j = 0; j < p.N; ++j) {
            std::vector<Rational> row(p.N + 1, Rational(0));
            row[j] = Rational(-1);
            row[p.N] = Rational(1);
            aux.add_row(std::move(row), Rational(0));
        }
        std::vector<Rational> last(p.N + 1, Rational(0));
        last[p.N] = Rational(1);
        aux.add_row(last, Rational(1));
        std::vector<Rational> c(p.N + 1, Rational(0));
        c[p.N] = Rational(1);
        LPOutcome out = lp_maximize(aux, c);
        REQUIRE(out.status == LPStatus::Optimal);
        REQUIRE(out.value > Rational(0));
        std::vector<Rational> inner(out.witness.begin(), out.witness.begin() + p.N);
        Rational t = out.value;
        // shrink the step so every row keeps positive slack
        Rational denom(1);
        for (const auto& [normal, rhs] : p.rows)
            for (const auto& v : normal) denom = std::max(denom, v.abs() + Rational(1));
        Rational eps = t / denom;
        REQUIRE(p.contains(inner));
        for (int j = 0; j < p.N; ++j) {
            std::vector<Rational> shifted = inner;
            shifted[j] += eps;
            CHECK(p.contains(shifted));
        }
    }
}
