#include <doctest.h>

#include <random>

#include "hetrain/common/rng.hpp"
#include "hetrain/he/context.hpp"
#include "hetrain/pack/he_linalg.hpp"
#include "hetrain/pack/packing.hpp"
#include "support/oracles.hpp"

using namespace hetrain;
using namespace hetrain::pack;

namespace {

he::HeParams params_for(uint32_t b, uint32_t budget = 30) {
    he::HeParams p;
    p.ring_dim = 2 * b;
    p.ct_size = b;
    p.slot_size = static_cast<uint32_t>(std::floor(std::sqrt(static_cast<double>(b))));
    p.level_budget = budget;
    return p;
}

std::vector<std::vector<double>> random_matrix(size_t m, size_t n, std::mt19937_64& rng) {
    std::vector<std::vector<double>> w(m, std::vector<double>(n));
    for (auto& row : w)
        for (double& x : row) x = uniform(rng, -1, 1);
    return w;
}

std::vector<double> random_vec(size_t n, std::mt19937_64& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(rng, -1, 1);
    return v;
}

} // namespace

TEST_CASE("pack1d: axis 0 replicates the padded block") {
    auto packed = pack1d(std::vector<double>{1, 2, 3}, Axis::Row, 4, 8);
    CHECK(packed == std::vector<double>{1, 2, 3, 0, 1, 2, 3, 0});
}

TEST_CASE("pack1d: axis 1 repeats each element across a segment") {
    auto packed = pack1d(std::vector<double>{1, 2}, Axis::Col, 4, 16);
    CHECK(packed ==
          std::vector<double>{1, 1, 1, 1, 2, 2, 2, 2, 0, 0, 0, 0, 0, 0, 0, 0});
}

TEST_CASE("pack1d: empty input gives all zeros") {
    auto packed = pack1d(std::vector<double>{}, Axis::Row, 4, 8);
    CHECK(packed == std::vector<double>(8, 0.0));
}

TEST_CASE("pack1d: capacity errors per axis") {
    std::vector<double> five{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(pack1d(five, Axis::Row, 4, 8), CapacityError);
    std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(pack1d(three, Axis::Col, 4, 8), CapacityError); // only 2 segments
}

TEST_CASE("pack2d: row-major flatten and transpose variants") {
    std::vector<std::vector<double>> m{{1, 2}, {3, 4}};
    CHECK(pack2d(m, Axis::Row, 2, 4) == std::vector<double>{1, 2, 3, 4});
    CHECK(pack2d(m, Axis::Col, 2, 4) == std::vector<double>{1, 3, 2, 4});

    std::vector<std::vector<double>> eye{{1, 0}, {0, 1}};
    CHECK(pack2d(eye, Axis::Row, 2, 4) == pack2d(eye, Axis::Col, 2, 4));

    std::vector<std::vector<double>> wide{{1, 2, 3}};
    CHECK_THROWS_AS(pack2d(wide, Axis::Row, 2, 4), CapacityError);
}

TEST_CASE("unpack1d: inverse on the logical region") {
    VecLayout layout{3, Axis::Row, 4, 8};
    std::vector<double> packed{1, 2, 3, 0, 1, 2, 3, 0};
    CHECK(unpack1d(packed, layout) == std::vector<double>{1, 2, 3});

    VecLayout bad{5, Axis::Row, 4, 8}; // n > S
    CHECK_THROWS_AS(unpack1d(packed, bad), LayoutError);
}

TEST_CASE("unpack2d: inverse of pack2d for both axes") {
    std::vector<std::vector<double>> m{{1, 2}, {3, 4}};
    auto packed = pack2d(m, Axis::Col, 2, 4);
    MatLayout layout{2, 2, Axis::Col, 2, 4};
    CHECK(unpack2d(packed, layout) == m);
}

TEST_CASE("pack/unpack round-trip property: 1000 random cases per kind") {
    std::mt19937_64 rng(11);
    const uint32_t s = 8, b = 64;
    for (int trial = 0; trial < 1000; ++trial) {
        Axis axis = (rng() & 1) ? Axis::Col : Axis::Row;
        size_t n = rng() % (s + 1);
        auto v = random_vec(n, rng);
        auto pv = pack1d(v, axis, s, b);
        REQUIRE(unpack1d(pv, VecLayout{n, axis, s, b}) == v);

        size_t mr = 1 + rng() % s, mc = 1 + rng() % s;
        auto m = random_matrix(mr, mc, rng);
        auto pm = pack2d(m, axis, s, b);
        REQUIRE(unpack2d(pm, MatLayout{mr, mc, axis, s, b}) == m);
    }
}

TEST_CASE("sum_cols: worked example and brute-force agreement") {
    auto params = params_for(8); // S would be 2, but the op takes S explicitly
    he::Context ctx(params);
    std::mt19937_64 rng(3);
    auto kp = he::keygen(params, rng);

    auto c = ctx.encrypt(kp.pk, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    auto summed = ctx.decrypt(kp.sk, sum_cols(ctx, c, 4));
    CHECK(summed == std::vector<double>{10, 10, 10, 10, 26, 26, 26, 26});

    auto zeros = ctx.encrypt(kp.pk, std::vector<double>{});
    CHECK(ctx.decrypt(kp.sk, sum_cols(ctx, zeros, 4)) == std::vector<double>(8, 0.0));

    // single nonzero slot broadcasts within its segment only
    auto single = ctx.encrypt(kp.pk, std::vector<double>{0, 0, 0, 0, 0, 7, 0, 0});
    CHECK(ctx.decrypt(kp.sk, sum_cols(ctx, single, 4)) ==
          std::vector<double>{0, 0, 0, 0, 7, 7, 7, 7});

    for (int trial = 0; trial < 200; ++trial) {
        auto v = random_vec(8, rng);
        auto ct = ctx.encrypt(kp.pk, v);
        for (uint32_t s : {1u, 2u, 4u, 8u}) {
            auto got = ctx.decrypt(kp.sk, sum_cols(ctx, ct, s));
            auto want = oracle::sum_cols_ref(v, s);
            for (size_t i = 0; i < v.size(); ++i) REQUIRE(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("sum_cols: consumes one level, requires two") {
    auto params = params_for(16);
    he::Context ctx(params);
    std::mt19937_64 rng(4);
    auto kp = he::keygen(params, rng);
    auto c = ctx.encrypt(kp.pk, std::vector<double>{1, 2});
    CHECK(sum_cols(ctx, c, 4).level == c.level - 1);
    c.level = 1;
    CHECK_THROWS_AS(sum_cols(ctx, c, 4), LevelExhaustedError);
}

TEST_CASE("sum_rows: worked example, identity on single segment") {
    auto params = params_for(8);
    he::Context ctx(params);
    std::mt19937_64 rng(5);
    auto kp = he::keygen(params, rng);

    auto c = ctx.encrypt(kp.pk, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(ctx.decrypt(kp.sk, sum_rows(ctx, c, 4)) ==
          std::vector<double>{6, 8, 10, 12, 6, 8, 10, 12});

    // constant across k segments scales by k
    auto konst = ctx.encrypt(kp.pk, std::vector<double>{2, 2, 2, 2, 2, 2, 2, 2});
    CHECK(ctx.decrypt(kp.sk, sum_rows(ctx, konst, 2))[0] == 8.0); // 4 segments of width 2

    // B == S: identity
    CHECK(ctx.decrypt(kp.sk, sum_rows(ctx, c, 8)) ==
          std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(sum_rows(ctx, c, 4).level == c.level);

    auto drained = c;
    drained.level = 0;
    CHECK_THROWS_AS(sum_rows(ctx, drained, 4), LevelExhaustedError);

    for (int trial = 0; trial < 200; ++trial) {
        auto v = random_vec(8, rng);
        auto ct = ctx.encrypt(kp.pk, v);
        for (uint32_t s : {1u, 2u, 4u, 8u}) {
            auto got = ctx.decrypt(kp.sk, sum_rows(ctx, ct, s));
            auto want = oracle::sum_rows_ref(v, s);
            for (size_t i = 0; i < v.size(); ++i) REQUIRE(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("he_matvec: axis-0 worked example") {
    auto params = params_for(4);
    he::Context ctx(params);
    std::mt19937_64 rng(6);
    auto kp = he::keygen(params, rng);

    std::vector<std::vector<double>> w{{1, 2}, {3, 4}};
    auto w_ct = ctx.encrypt(kp.pk, pack2d(w, Axis::Row, 2, 4));
    auto x_ct = ctx.encrypt(kp.pk, pack1d(std::vector<double>{5, 6}, Axis::Row, 2, 4));
    auto y = he_matvec(ctx, w_ct, Axis::Row, x_ct, Axis::Row, 2);
    CHECK(ctx.decrypt(kp.sk, y) == std::vector<double>{17, 17, 39, 39});
    CHECK(unpack1d(ctx.decrypt(kp.sk, y), VecLayout{2, Axis::Col, 2, 4}) ==
          std::vector<double>{17, 39});
}

TEST_CASE("he_matvec: axis-1 worked example") {
    auto params = params_for(4);
    he::Context ctx(params);
    std::mt19937_64 rng(7);
    auto kp = he::keygen(params, rng);

    std::vector<std::vector<double>> w{{1, 0}, {0, 2}};
    auto w_ct = ctx.encrypt(kp.pk, pack2d(w, Axis::Col, 2, 4));
    auto x_ct = ctx.encrypt(kp.pk, pack1d(std::vector<double>{17, 39}, Axis::Col, 2, 4));
    auto y = he_matvec(ctx, w_ct, Axis::Col, x_ct, Axis::Col, 2);
    CHECK(ctx.decrypt(kp.sk, y) == std::vector<double>{17, 78, 17, 78});
    CHECK(unpack1d(ctx.decrypt(kp.sk, y), VecLayout{2, Axis::Row, 2, 4}) ==
          std::vector<double>{17, 78});
}

TEST_CASE("he_matvec: axis mismatch is a layout error") {
    auto params = params_for(4);
    he::Context ctx(params);
    std::mt19937_64 rng(8);
    auto kp = he::keygen(params, rng);
    auto w_ct = ctx.encrypt(kp.pk, pack2d({{1, 0}, {0, 1}}, Axis::Row, 2, 4));
    auto x_ct = ctx.encrypt(kp.pk, pack1d(std::vector<double>{1, 2}, Axis::Col, 2, 4));
    CHECK_THROWS_AS(he_matvec(ctx, w_ct, Axis::Row, x_ct, Axis::Col, 2), LayoutError);
}

TEST_CASE("he_matvec: identity matrix re-packs the input on the other axis") {
    auto params = params_for(64);
    he::Context ctx(params);
    std::mt19937_64 rng(9);
    auto kp = he::keygen(params, rng);
    const uint32_t s = params.slot_size;

    for (Axis axis : {Axis::Row, Axis::Col}) {
        std::vector<std::vector<double>> eye(s, std::vector<double>(s, 0.0));
        for (uint32_t i = 0; i < s; ++i) eye[i][i] = 1.0;
        auto x = random_vec(s, rng);
        auto w_ct = ctx.encrypt(kp.pk, pack2d(eye, axis, s, params.ct_size));
        auto x_ct = ctx.encrypt(kp.pk, pack1d(x, axis, s, params.ct_size));
        auto y = he_matvec(ctx, w_ct, axis, x_ct, axis, s);
        auto got = unpack1d(ctx.decrypt(kp.sk, y),
                            VecLayout{x.size(), flip(axis), s, params.ct_size});
        for (size_t i = 0; i < x.size(); ++i) REQUIRE(got[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
}

TEST_CASE("he_matvec: oracle equivalence on random shapes, both axes") {
    auto params = params_for(1024);
    he::Context ctx(params);
    std::mt19937_64 rng(10);
    auto kp = he::keygen(params, rng);
    const uint32_t s = params.slot_size, b = params.ct_size;

    for (int trial = 0; trial < 60; ++trial) {
        size_t m = 1 + rng() % s, n = 1 + rng() % s;
        Axis axis = (rng() & 1) ? Axis::Col : Axis::Row;
        auto w = random_matrix(m, n, rng);
        auto x = random_vec(n, rng);
        auto w_ct = ctx.encrypt(kp.pk, pack2d(w, axis, s, b));
        auto x_ct = ctx.encrypt(kp.pk, pack1d(x, axis, s, b));
        auto y_ct = he_matvec(ctx, w_ct, axis, x_ct, axis, s);
        auto got = unpack1d(ctx.decrypt(kp.sk, y_ct), VecLayout{m, flip(axis), s, b});
        auto want = oracle::matvec_ref(w, x);
        for (size_t i = 0; i < m; ++i) REQUIRE(std::abs(got[i] - want[i]) < 1e-9);
    }
}

TEST_CASE("he_matvec: axis alternation and padding hygiene across two layers") {
    auto params = params_for(64);
    he::Context ctx(params);
    std::mt19937_64 rng(12);
    auto kp = he::keygen(params, rng);
    const uint32_t s = params.slot_size, b = params.ct_size;

    for (int trial = 0; trial < 50; ++trial) {
        size_t n0 = 1 + rng() % (s - 1), n1 = 1 + rng() % (s - 1), n2 = 1 + rng() % (s - 1);
        auto w1 = random_matrix(n1, n0, rng);
        auto w2 = random_matrix(n2, n1, rng);
        auto x = random_vec(n0, rng);

        auto x_ct = ctx.encrypt(kp.pk, pack1d(x, Axis::Row, s, b));
        auto w1_ct = ctx.encrypt(kp.pk, pack2d(w1, Axis::Row, s, b));
        auto w2_ct = ctx.encrypt(kp.pk, pack2d(w2, Axis::Col, s, b));
        auto h = he_matvec(ctx, w1_ct, Axis::Row, x_ct, Axis::Row, s);
        auto y = he_matvec(ctx, w2_ct, Axis::Col, h, Axis::Col, s);

        auto got = unpack1d(ctx.decrypt(kp.sk, y), VecLayout{n2, Axis::Row, s, b});
        auto want = oracle::matvec_ref(w2, oracle::matvec_ref(w1, x));
        for (size_t i = 0; i < n2; ++i) REQUIRE(std::abs(got[i] - want[i]) < 1e-9);

        // padding slots outside the logical axis-0 block stay exactly zero
        auto slots = ctx.decrypt(kp.sk, y);
        for (uint32_t seg = 0; seg < b / s; ++seg)
            for (uint32_t j = static_cast<uint32_t>(n2); j < s; ++j)
                REQUIRE(slots[seg * s + j] == 0.0);
    }
}

TEST_CASE("he_bias_add: axis agreement enforced") {
    auto params = params_for(4);
    he::Context ctx(params);
    std::mt19937_64 rng(13);
    auto kp = he::keygen(params, rng);

    auto y_ct = ctx.encrypt(kp.pk, pack1d(std::vector<double>{17, 39}, Axis::Col, 2, 4));
    auto b_ct = ctx.encrypt(kp.pk, pack1d(std::vector<double>{1, 1}, Axis::Col, 2, 4));
    auto out = he_bias_add(ctx, y_ct, Axis::Col, b_ct, Axis::Col);
    CHECK(unpack1d(ctx.decrypt(kp.sk, out), VecLayout{2, Axis::Col, 2, 4}) ==
          std::vector<double>{18, 40});

    auto zero = ctx.encrypt(kp.pk, pack1d(std::vector<double>{0, 0}, Axis::Col, 2, 4));
    CHECK(ctx.decrypt(kp.sk, he_bias_add(ctx, y_ct, Axis::Col, zero, Axis::Col)) ==
          ctx.decrypt(kp.sk, y_ct));

    CHECK_THROWS_AS(he_bias_add(ctx, y_ct, Axis::Col, b_ct, Axis::Row), LayoutError);
}
