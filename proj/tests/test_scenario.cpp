#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "c2f/scenario.hpp"
#include "helpers.hpp"

using namespace c2f;
using test_helpers::tiny_scenario;

TEST_CASE("rng streams are deterministic and substreams independent") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.u01() == b.u01());

    Rng c(42);
    Rng s1 = c.substream("noise");
    Rng s2 = c.substream("sample");
    REQUIRE(s1.u01() != s2.u01());

    // Substream derivation ignores how much of the parent was consumed.
    Rng d(42);
    d.u01();
    d.u01();
    Rng s1_again = d.substream("noise");
    Rng s1_ref = Rng(42).substream("noise");
    REQUIRE(s1_again.u01() == s1_ref.u01());
}

TEST_CASE("rng normal moments") {
    Rng rng(7);
    double sum = 0.0, sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    REQUIRE(std::abs(sum / n) < 0.02);
    REQUIRE(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("init_snapshot shapes and determinism") {
    auto cfg = tiny_scenario(2, 3, 1);
    Rng rng(42);
    const NetworkState s = init_snapshot(cfg, rng);
    REQUIRE(s.user_pos.size() == 2);
    REQUIRE(s.ap_pos.size() == 3);
    REQUIRE(s.gamma.rows() == 2);
    REQUIRE(s.gamma.cols() == 3);
    REQUIRE(s.t == 1);

    Rng rng2(42);
    const NetworkState s2 = init_snapshot(cfg, rng2);
    REQUIRE(s.gamma == s2.gamma);
    REQUIRE(s.shadow_db == s2.shadow_db);
    for (size_t k = 0; k < s.user_pos.size(); ++k) {
        REQUIRE(s.user_pos[k].x == s2.user_pos[k].x);
        REQUIRE(s.user_pos[k].y == s2.user_pos[k].y);
    }
}

TEST_CASE("init_snapshot positions are uniform over the square") {
    auto cfg = tiny_scenario(1000, 1, 1);
    double sum_x = 0.0;
    long count = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Rng rng(1000 + static_cast<std::uint64_t>(rep));
        const NetworkState s = init_snapshot(cfg, rng);
        for (const auto& p : s.user_pos) {
            REQUIRE(p.x >= 0.0);
            REQUIRE(p.x <= cfg.area_side);
            sum_x += p.x;
            ++count;
        }
    }
    REQUIRE(count == 100000);
    REQUIRE(std::abs(sum_x / static_cast<double>(count) - 500.0) < 5.0);
}

TEST_CASE("large_scale_fading closed-form values") {
    REQUIRE_THAT(large_scale_fading(100.0, 0.0, 4.0), Catch::Matchers::WithinRel(1.0e-4, 1e-12));
    REQUIRE_THAT(large_scale_fading(1.0, 0.0, 4.0), Catch::Matchers::WithinRel(1.0, 1e-12));
    // Direct evaluation: sqrt(100^-4 * 10^(10/10))
    const double expected = std::sqrt(std::pow(100.0, -4.0) * 10.0);
    REQUIRE_THAT(large_scale_fading(100.0, 10.0, 4.0), Catch::Matchers::WithinRel(expected, 1e-12));
    REQUIRE_THAT(large_scale_fading(100.0, 10.0, 4.0), Catch::Matchers::WithinRel(3.1623e-4, 1e-4));

    // Distances below one metre clamp to one metre.
    REQUIRE(large_scale_fading(0.0, 0.0, 4.0) == large_scale_fading(1.0, 0.0, 4.0));
    REQUIRE(large_scale_fading(0.5, 3.0, 4.0) == large_scale_fading(1.0, 3.0, 4.0));
}

TEST_CASE("gamma is consistent with positions and shadowing") {
    auto cfg = tiny_scenario(8, 12, 2);
    Rng rng(5);
    NetworkState s = init_snapshot(cfg, rng);
    for (int t = 0; t < 3; ++t) s = step_mobility(s, cfg, rng);
    for (int k = 0; k < s.num_users(); ++k) {
        for (int l = 0; l < s.num_aps(); ++l) {
            const double d = distance(s.user_pos[static_cast<size_t>(k)], s.ap_pos[static_cast<size_t>(l)]);
            REQUIRE(s.gamma(k, l) == large_scale_fading(d, s.shadow_db(k, l), cfg.path_loss_exponent));
            REQUIRE(s.gamma(k, l) > 0.0);
        }
    }
}

TEST_CASE("step_mobility with zero speed changes nothing") {
    auto cfg = tiny_scenario();
    cfg.v_max = 0.0;
    Rng rng(9);
    const NetworkState s0 = init_snapshot(cfg, rng);
    const NetworkState s1 = step_mobility(s0, cfg, rng);
    REQUIRE(s1.gamma == s0.gamma);
    REQUIRE(s1.shadow_db == s0.shadow_db);
    for (size_t k = 0; k < s0.user_pos.size(); ++k) {
        REQUIRE(s1.user_pos[k].x == s0.user_pos[k].x);
        REQUIRE(s1.user_pos[k].y == s0.user_pos[k].y);
    }
    REQUIRE(s1.t == s0.t + 1);
}

TEST_CASE("step_mobility bounds displacement by v_max * dt") {
    auto cfg = tiny_scenario(20, 5, 2);
    cfg.v_max = 5.0;
    Rng rng(11);
    const NetworkState s0 = init_snapshot(cfg, rng);
    const NetworkState s1 = step_mobility(s0, cfg, rng);
    for (size_t k = 0; k < s0.user_pos.size(); ++k) {
        // Reflection only shortens the straight-line displacement.
        REQUIRE(distance(s0.user_pos[k], s1.user_pos[k]) <= 5.0 + 1e-12);
    }
}

TEST_CASE("boundary reflection arithmetic") {
    // Scalar oracle: a user at x=0.5 heading into the wall at speed 3 lands at 2.5.
    REQUIRE(detail::reflect_into(0.5 - 3.0, 1000.0) == 2.5);
    REQUIRE(detail::reflect_into(1000.5, 1000.0) == 999.5);
    REQUIRE(detail::reflect_into(500.0, 1000.0) == 500.0);
    REQUIRE(detail::reflect_into(-0.0, 1000.0) == 0.0);
    REQUIRE(detail::reflect_into(2000.5, 1000.0) == 0.5);
}

TEST_CASE("positions stay inside the area after many mobility steps") {
    auto cfg = tiny_scenario(10, 4, 2);
    cfg.v_max = 50.0;
    Rng rng(13);
    NetworkState s = init_snapshot(cfg, rng);
    for (int t = 0; t < 50; ++t) {
        s = step_mobility(s, cfg, rng);
        for (const auto& p : s.user_pos) {
            REQUIRE(p.x >= 0.0);
            REQUIRE(p.x <= cfg.area_side);
            REQUIRE(p.y >= 0.0);
            REQUIRE(p.y <= cfg.area_side);
        }
    }
}

TEST_CASE("vary_users with zero churn bound keeps K") {
    auto cfg = tiny_scenario(10, 5, 2);
    cfg.dynamic_users = true;
    cfg.user_change_max = 0;
    Rng rng(17);
    const NetworkState s0 = init_snapshot(cfg, rng);
    const NetworkState s1 = vary_users(s0, cfg, rng);
    REQUIRE(s1.num_users() == 10);
}

TEST_CASE("vary_users resizes consistently and respects bounds") {
    auto cfg = tiny_scenario(10, 6, 2);
    cfg.dynamic_users = true;
    cfg.user_change_max = 3;
    Rng rng(19);
    NetworkState s = init_snapshot(cfg, rng);
    for (int t = 0; t < 200; ++t) {
        const int before = s.num_users();
        s = vary_users(s, cfg, rng);
        const int after = s.num_users();
        REQUIRE(std::abs(after - before) <= cfg.user_change_max);
        REQUIRE(after >= cfg.num_subnetworks);
        REQUIRE(s.gamma.rows() == after);
        REQUIRE(s.shadow_db.rows() == after);
        REQUIRE(s.user_pos.size() == static_cast<size_t>(after));
        REQUIRE(s.user_id.size() == static_cast<size_t>(after));
    }
}

TEST_CASE("vary_users churn is symmetric on average") {
    auto cfg = tiny_scenario(100, 4, 1);
    cfg.dynamic_users = true;
    cfg.user_change_max = 5;
    Rng rng(23);
    const NetworkState base = init_snapshot(cfg, rng);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const NetworkState next = vary_users(base, cfg, rng);
        sum += next.num_users() - base.num_users();
    }
    REQUIRE(std::abs(sum / n) < 0.1);
}

TEST_CASE("vary_users preserves surviving user identities") {
    auto cfg = tiny_scenario(10, 5, 2);
    cfg.dynamic_users = true;
    cfg.user_change_max = 4;
    Rng rng(29);
    NetworkState s = init_snapshot(cfg, rng);
    for (int t = 0; t < 50; ++t) {
        const NetworkState prev = s;
        s = vary_users(s, cfg, rng);
        // Surviving ids keep their position rows.
        for (size_t i = 0; i < s.user_id.size(); ++i) {
            for (size_t j = 0; j < prev.user_id.size(); ++j) {
                if (s.user_id[i] == prev.user_id[j]) {
                    REQUIRE(s.user_pos[i].x == prev.user_pos[j].x);
                    REQUIRE(s.user_pos[i].y == prev.user_pos[j].y);
                }
            }
        }
    }
}

TEST_CASE("draw_small_scale shape, unit variance and determinism") {
    Rng rng(31);
    const ChannelDraw d = draw_small_scale(3, 4, rng);
    REQUIRE(d.h.rows() == 3);
    REQUIRE(d.h.cols() == 4);

    Rng big(37);
    const ChannelDraw big_draw = draw_small_scale(320, 320, big);
    const double mean_sq = big_draw.h.array().abs2().mean();
    REQUIRE(mean_sq > 0.98);
    REQUIRE(mean_sq < 1.02);

    Rng r1(41), r2(41);
    REQUIRE(draw_small_scale(5, 5, r1).h == draw_small_scale(5, 5, r2).h);
}

TEST_CASE("channel_feature is the column max of gamma") {
    auto cfg = tiny_scenario(50, 100, 2);
    Rng rng(43);
    const NetworkState s = init_snapshot(cfg, rng);
    const Eigen::VectorXd feature = channel_feature(s);
    REQUIRE(feature.size() == 100);
    for (int l = 0; l < s.num_aps(); ++l) {
        double best = 0.0;
        for (int k = 0; k < s.num_users(); ++k) best = std::max(best, s.gamma(k, l));
        REQUIRE(feature(l) == best);
        for (int k = 0; k < s.num_users(); ++k) REQUIRE(feature(l) >= s.gamma(k, l));
    }

    auto cfg1 = tiny_scenario(1, 4, 1);
    Rng rng1(47);
    const NetworkState s1 = init_snapshot(cfg1, rng1);
    REQUIRE(channel_feature(s1).transpose() == s1.gamma.row(0));
}

TEST_CASE("two-hotspot placement stays in bounds and skews user mass") {
    auto cfg = tiny_scenario(400, 4, 2);
    cfg.user_placement = UserPlacement::kTwoHotspot;
    Rng rng(53);
    const NetworkState s = init_snapshot(cfg, rng);
    int near_first = 0;
    for (const auto& p : s.user_pos) {
        REQUIRE(p.x >= 0.0);
        REQUIRE(p.x <= cfg.area_side);
        REQUIRE(p.y >= 0.0);
        REQUIRE(p.y <= cfg.area_side);
        if (p.x + p.y < cfg.area_side) ++near_first;
    }
    // 70% of mass on the lower-left hotspot.
    REQUIRE(near_first > 240);
    REQUIRE(near_first < 320);
}

TEST_CASE("scenario config validation") {
    auto cfg = tiny_scenario();
    REQUIRE_NOTHROW(cfg.validate());
    cfg.num_users = 1;
    cfg.num_subnetworks = 2;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
}
