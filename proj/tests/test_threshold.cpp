#include "wisense/threshold.hpp"

#include <doctest.h>

#include <random>

using namespace wisense;
using namespace wisense::threshold;

namespace {

Cir make_cir(std::vector<cplx> taps)
{
    Cir c;
    c.taps = std::move(taps);
    c.tap_spacing = 1.0 / 1.76e9;
    c.t0 = 0.0;
    return c;
}

Cir random_cir(std::mt19937_64 &rng, std::size_t n = 16)
{
    std::normal_distribution<double> g;
    std::vector<cplx> t(n);
    for (auto &v : t)
        v = {g(rng), g(rng)};
    return make_cir(std::move(t));
}

// max_l |sum_n a[n] conj(b[n - l])| / (|a| |b|), every lag enumerated.
double trrs_oracle(const Cir &a, const Cir &b)
{
    const long n = static_cast<long>(a.taps.size());
    double best = 0.0;
    for (long lag = -(n - 1); lag <= n - 1; ++lag)
    {
        cplx acc{};
        for (long i = 0; i < n; ++i)
        {
            const long j = i - lag;
            if (j >= 0 && j < n)
                acc += a.taps[i] * std::conj(b.taps[j]);
        }
        best = std::max(best, std::abs(acc));
    }
    return best / std::sqrt(a.energy() * b.energy());
}

CirStream drifting_stream(std::size_t n, double rate)
{
    CirStream s;
    for (std::size_t k = 0; k < n; ++k)
    {
        std::vector<cplx> taps(16);
        for (std::size_t f = 0; f < taps.size(); ++f)
            taps[f] = std::polar(1.0 / (1.0 + static_cast<double>(f)),
                                 rate * static_cast<double>(k) * static_cast<double>(f * f));
        s.emplace_back(static_cast<double>(k) / 590.0, make_cir(taps));
    }
    return s;
}

} // namespace

TEST_SUITE("threshold")
{
    TEST_CASE("TRRS of a CIR with itself is exactly one")
    {
        std::mt19937_64 rng(1);
        for (int i = 0; i < 20; ++i)
        {
            const auto a = random_cir(rng);
            CHECK(trrs(a, a) == 1.0);
            CHECK(csi_variation(a, a) == 0.0);
        }
    }

    TEST_CASE("TRRS is invariant to integer delays")
    {
        std::vector<cplx> base(32, cplx{});
        base[2] = {1.0, 0.5};
        base[3] = {-0.3, 0.2};
        base[6] = {0.1, -0.7};
        std::vector<cplx> shifted(32, cplx{});
        for (std::size_t i = 0; i + 3 < 32; ++i)
            shifted[i + 3] = base[i];
        CHECK(trrs(make_cir(base), make_cir(shifted)) == doctest::Approx(1.0).epsilon(1e-9));

        std::vector<cplx> p(8, cplx{}), q(8, cplx{});
        p[0] = 1.0;
        q[5] = 1.0;
        CHECK(trrs(make_cir(p), make_cir(q)) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("TRRS agrees with exhaustive lag search")
    {
        const auto a = make_cir({1.0, 1.0});
        const auto b = make_cir({1.0, -1.0});
        CHECK(trrs(a, b) == doctest::Approx(trrs_oracle(a, b)).epsilon(1e-12));
        CHECK(trrs(a, b) == doctest::Approx(0.5).epsilon(1e-12));

        std::mt19937_64 rng(3);
        for (int i = 0; i < 50; ++i)
        {
            const auto x = random_cir(rng, 1 + static_cast<std::size_t>(i % 20));
            const auto y = random_cir(rng, x.taps.size());
            const double t = trrs(x, y);
            CHECK(t == doctest::Approx(trrs_oracle(x, y)).epsilon(1e-12));
            CHECK(t >= 0.0);
            CHECK(t <= 1.0);
            CHECK(csi_variation(x, y) == doctest::Approx(1.0 - t).epsilon(1e-15));
        }
    }

    TEST_CASE("TRRS symmetry and scale invariance")
    {
        std::mt19937_64 rng(4);
        for (int i = 0; i < 30; ++i)
        {
            const auto a = random_cir(rng), b = random_cir(rng);
            CHECK(std::abs(trrs(a, b) - trrs(b, a)) < 1e-12);
            auto scaled = a;
            for (auto &v : scaled.taps)
                v *= 3.7;
            CHECK(trrs(scaled, b) == doctest::Approx(trrs(a, b)).epsilon(1e-12));
            auto rotated = a;
            for (auto &v : rotated.taps)
                v *= std::polar(1.0, 1.1);
            CHECK(trrs(rotated, b) == doctest::Approx(trrs(a, b)).epsilon(1e-12));
        }
    }

    TEST_CASE("TRRS rejects degenerate inputs")
    {
        const auto z = make_cir(std::vector<cplx>(8, cplx{}));
        const auto a = make_cir(std::vector<cplx>(8, cplx{1.0, 0.0}));
        CHECK_THROWS_AS(trrs(z, a), Error);
        CHECK_THROWS_AS(trrs(a, z), Error);
        CHECK_THROWS_AS(trrs(a, make_cir(std::vector<cplx>(7, cplx{1.0, 0.0}))), Error);
    }

    TEST_CASE("policy extremes")
    {
        const auto s = drifting_stream(100, 0.01);
        const auto all = apply_policy(s, 0.0);
        CHECK(all.reported.size() == 100);
        CHECK(all.reduction() == 0.0);

        const auto none = apply_policy(s, 1.0);
        REQUIRE(none.reported.size() == 1);
        CHECK(none.reported[0].packet_index == 0);
        CHECK(none.reduction() == doctest::Approx(99.0 / 100.0));
        CHECK(none.variations.size() == 100);
        CHECK(none.variations[0] == 0.0);
    }

    TEST_CASE("variation is measured against the last report")
    {
        const auto s = drifting_stream(60, 0.002);
        const double thr = 0.05;
        const auto log = apply_policy(s, thr);
        std::size_t ref = 0, r = 1;
        for (std::size_t k = 1; k < s.size(); ++k)
        {
            const double v = csi_variation(s[ref].second, s[k].second);
            CHECK(log.variations[k] == v);
            if (v > thr)
            {
                REQUIRE(r < log.reported.size());
                CHECK(log.reported[r].packet_index == k);
                CHECK(log.reported[r].timestamp == s[k].first);
                ref = k;
                ++r;
            }
        }
        CHECK(r == log.reported.size());
    }

    TEST_CASE("reporting uses a strict inequality")
    {
        const auto s = drifting_stream(2, 0.3);
        const double v = csi_variation(s[0].second, s[1].second);
        REQUIRE(v > 0.0);
        CHECK(apply_policy(s, v).reported.size() == 1);
        CHECK(apply_policy(s, std::nextafter(v, 0.0)).reported.size() == 2);
    }

    TEST_CASE("report count never grows with the threshold")
    {
        const auto s = drifting_stream(200, 0.004);
        std::size_t prev = s.size() + 1;
        for (int i = 0; i <= 40; ++i)
        {
            const auto log = apply_policy(s, i / 40.0);
            CHECK(log.reported.size() <= prev);
            CHECK(log.reduction() >= 0.0);
            CHECK(log.reduction() <= 199.0 / 200.0);
            for (std::size_t j = 1; j < log.reported.size(); ++j)
                CHECK(log.reported[j].packet_index > log.reported[j - 1].packet_index);
            prev = log.reported.size();
        }
    }

    TEST_CASE("policy argument checks")
    {
        CHECK_THROWS_AS(apply_policy({}, 0.1), Error);
        const auto s = drifting_stream(4, 0.1);
        CHECK_THROWS_AS(apply_policy(s, -0.1), Error);
        CHECK_THROWS_AS(apply_policy(s, 1.5), Error);
    }

    TEST_CASE("reconstruction through every knot is exact")
    {
        const auto s = drifting_stream(50, 0.01);
        const phy::PacketSchedule sched{590.0, 50, 0.0};
        const auto rec = reconstruct(apply_policy(s, 0.0), sched);
        REQUIRE(rec.size() == s.size());
        for (std::size_t k = 0; k < s.size(); ++k)
        {
            CHECK(rec[k].first == sched.timestamp(k));
            CHECK(rec[k].second.taps == s[k].second.taps);
        }
    }

    TEST_CASE("reconstruction midpoint")
    {
        FeedbackLog log;
        log.n_total = 3;
        log.reported.push_back({0, 0.0, make_cir(std::vector<cplx>(4, cplx{0.0, 0.0}))});
        log.reported.push_back({2, 1.0, make_cir(std::vector<cplx>(4, cplx{2.0, 2.0}))});
        const auto rec = reconstruct(log, phy::PacketSchedule{2.0, 3, 0.0});
        REQUIRE(rec.size() == 3);
        CHECK(rec[1].first == 0.5);
        for (const auto &v : rec[1].second.taps)
            CHECK(v == cplx(1.0, 1.0));
    }

    TEST_CASE("linear streams are reconstructed exactly")
    {
        const std::size_t n = 40;
        CirStream s;
        for (std::size_t k = 0; k < n; ++k)
        {
            const double t = static_cast<double>(k) / 590.0;
            std::vector<cplx> taps(8);
            for (std::size_t f = 0; f < 8; ++f)
                taps[f] = cplx(0.3 + 2.0 * t * static_cast<double>(f), -1.0 + 5.0 * t);
            s.emplace_back(t, make_cir(taps));
        }
        FeedbackLog log;
        log.n_total = n;
        log.reported.push_back({0, s.front().first, s.front().second});
        log.reported.push_back({n - 1, s.back().first, s.back().second});
        const auto rec = reconstruct(log, phy::PacketSchedule{590.0, n, 0.0});
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t f = 0; f < 8; ++f)
                CHECK(std::abs(rec[k].second.taps[f] - s[k].second.taps[f]) < 1e-12);
    }

    TEST_CASE("reconstruction holds outside the reported span")
    {
        FeedbackLog log;
        log.n_total = 6;
        log.reported.push_back({2, 2.0, make_cir({cplx{1.0, 0.0}})});
        log.reported.push_back({3, 3.0, make_cir({cplx{3.0, 0.0}})});
        const auto rec = reconstruct(log, phy::PacketSchedule{1.0, 6, 0.0});
        CHECK(rec[0].second.taps[0] == cplx(1.0, 0.0));
        CHECK(rec[1].second.taps[0] == cplx(1.0, 0.0));
        CHECK(rec[4].second.taps[0] == cplx(3.0, 0.0));
        CHECK(rec[5].second.taps[0] == cplx(3.0, 0.0));
        CHECK_THROWS_AS(reconstruct(FeedbackLog{}, phy::PacketSchedule{1.0, 6, 0.0}), Error);
    }
}
