#include "leolora/mac.hpp"
#include "leolora/phy.hpp"
#include "leolora/simcore/engine.hpp"

#include "oracles.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <vector>

using namespace leolora;
using simcore::Duration;
using simcore::SimTime;

TEST(BeaconTiming, PartsSumToPeriodExactly)
{
    mac::BeaconTiming t;
    EXPECT_TRUE(t.consistent());
    EXPECT_EQ((t.reserved + t.window + t.guard).ns(), 128'000'000'000);
    EXPECT_EQ(t.window_start(3).ns(), 3 * 128'000'000'000LL + 2'120'000'000LL);
    EXPECT_EQ(t.window_end(0).ns(), 125'000'000'000);
    EXPECT_TRUE(t.in_reserved(SimTime::from_seconds(128.0)));
    EXPECT_FALSE(t.in_reserved(SimTime::from_seconds(130.12)));
    EXPECT_TRUE(t.in_window(SimTime::from_seconds(130.12)));
    EXPECT_FALSE(t.in_window(SimTime::from_seconds(125.0)));
    EXPECT_EQ(t.index_at(SimTime::from_seconds(255.999)), 1);
}

TEST(Scheme, ParsesNames)
{
    EXPECT_EQ(mac::parse_scheme("bu"), mac::Scheme::BU);
    EXPECT_EQ(mac::parse_scheme("Baseline"), mac::Scheme::Baseline);
    EXPECT_THROW((void)mac::parse_scheme("aloha"), std::invalid_argument);
}

TEST(PingOffset, RangeAndDeterminism)
{
    for (std::uint32_t addr = 0; addr < 200; ++addr) {
        const auto t = SimTime::from_seconds(128.0 * addr);
        const auto off = mac::compute_ping_offset(t, addr * 2654435761u, 128);
        EXPECT_EQ(off, mac::compute_ping_offset(t, addr * 2654435761u, 128));
        EXPECT_GE(off.ns(), 0);
        EXPECT_LT(off.ns(), 128 * 30'000'000LL);
        EXPECT_EQ(off.ns() % 30'000'000, 0);
    }
    EXPECT_THROW((void)mac::compute_ping_offset(SimTime::zero(), 1, 0), std::invalid_argument);
}

TEST(PingOffset, SlotsAreUniformChiSquare)
{
    const int slots = 128;
    const int n = 10000;
    simcore::RngStream addrs(77, 0, "devaddr");
    std::vector<int> counts(slots, 0);
    const auto beacon = SimTime::from_seconds(128.0 * 12);
    for (int i = 0; i < n; ++i) {
        const auto addr = static_cast<std::uint32_t>(addrs.next_u64());
        ++counts[static_cast<std::size_t>(mac::compute_ping_offset(beacon, addr, slots).ns() / 30'000'000)];
    }
    const double expected = static_cast<double>(n) / slots;
    double chi2 = 0.0;
    for (int c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    boost::math::chi_squared dist(slots - 1);
    EXPECT_LT(chi2, boost::math::quantile(dist, 0.99));
}

TEST(PingOffset, SingleSlotPeriodGivesZero)
{
    for (std::uint32_t addr : {0u, 1u, 0xFFFFFFFFu}) {
        EXPECT_EQ(mac::compute_ping_offset(SimTime::from_seconds(256.0), addr, 1).ns(), 0);
    }
}

TEST(TxSlot, DocumentedArithmeticAndDeferral)
{
    const mac::BeaconTiming t;
    const auto t0 = t.window_start(4);
    const auto we = t.window_end(4);
    const auto air = Duration::from_seconds(1.712);
    EXPECT_EQ(*mac::tx_slot_from_draw(t0, Duration::from_seconds(2.0), we, air, 10.0), t0 + Duration::from_seconds(12.0));
    const auto late = we - Duration::from_ms(500);
    simcore::RngStream s(3, 3, "txslot");
    for (int i = 0; i < 100; ++i) {
        EXPECT_FALSE(mac::schedule_tx_slot(late, Duration::from_seconds(2.0), we, air, s).has_value());
    }
}

TEST(TxSlot, CandidatesUniformOverWholeWindow)
{
    const mac::BeaconTiming t;
    simcore::RngStream s(31, 1, "txslot");
    const auto t0 = t.window_start(0);
    const auto we = t.window_end(0);
    std::vector<double> u;
    u.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
        // Zero airtime: nothing is deferred, so every candidate is observed.
        const auto slot = mac::schedule_tx_slot(t0, Duration{}, we, Duration{}, s);
        ASSERT_TRUE(slot.has_value());
        ASSERT_LT(*slot, we);
        u.push_back((*slot - t0).seconds() / (we - t0).seconds());
    }
    const double d = oracle::ks_distance_uniform(u);
    EXPECT_GT(oracle::kolmogorov_tail(d * std::sqrt(1e5)), 0.01) << "D=" << d;
}

TEST(TxSlot, DrawMapsToNowPlusOffsetPlusDraw)
{
    const auto now = SimTime::from_seconds(10.0);
    const auto we = SimTime::from_seconds(100.0);
    const auto air = Duration::from_seconds(1.712128);
    const auto off = Duration::from_ms(60);
    EXPECT_EQ(*mac::tx_slot_from_draw(now, off, we, air, 0.0), now + off);
    EXPECT_EQ(*mac::tx_slot_from_draw(now, off, we, air, 5.0), now + off + Duration::from_seconds(5.0));
    // Exact fit accepted, anything later deferred.
    const double fit = (we - air - now - off).seconds();
    ASSERT_TRUE(mac::tx_slot_from_draw(now, off, we, air, fit).has_value());
    EXPECT_EQ(mac::tx_slot_from_draw(now, off, we, air, fit).value() + air, we);
    EXPECT_FALSE(mac::tx_slot_from_draw(now, off, we, air, fit + 1e-6).has_value());
}

TEST(TxSlot, RequiresOpenWindow)
{
    simcore::RngStream s(1, 1, "txslot");
    const auto we = SimTime::from_seconds(100.0);
    EXPECT_THROW((void)mac::schedule_tx_slot(we, Duration{}, we, Duration::from_ms(10), s), std::logic_error);
}

TEST(TxSlot, AcceptedSlotsUniformOverFittingSpan)
{
    mac::BeaconTiming timing;
    const auto air = phy::airtime(phy::LoRaParams{}, 20);
    simcore::RngStream s(9, 1, "txslot");
    simcore::RngStream pick(9, 2, "now");
    std::vector<double> u;
    while (u.size() < 20000) {
        const auto ws = timing.window_start(1);
        const auto we = timing.window_end(1);
        const auto now = ws + Duration::from_seconds(pick.uniform(0.0, 100.0));
        if (auto slot = mac::schedule_tx_slot(now, Duration{}, we, air, s)) {
            u.push_back((*slot - now).seconds() / (we - air - now).seconds());
        }
    }
    const double d = oracle::ks_distance_uniform(u);
    EXPECT_GT(oracle::kolmogorov_tail(d * std::sqrt(static_cast<double>(u.size()))), 0.01) << "D=" << d;
}

TEST(Traffic, ArrivalBoundsAndMean)
{
    mac::TrafficModel tm;
    simcore::RngStream s(4, 4, "traffic");
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto first = tm.first_arrival(s).seconds();
        EXPECT_GE(first, 0.0);
        EXPECT_LT(first, 720.0);
        const auto gap = tm.next_gap(s).seconds();
        EXPECT_GE(gap, 480.0);
        EXPECT_LE(gap, 720.0);
        sum += gap;
    }
    // U(480, 720): mean 600, sd 240/sqrt(12).
    EXPECT_NEAR(sum / n, 600.0, 5.0 * 240.0 / std::sqrt(12.0 * n));
}

namespace {

// Drives one DeviceMac with the engine; records every attempt it makes.
struct Harness {
    mac::DeviceMac mac;
    std::vector<phy::TransmissionAttempt> sent;
    simcore::Engine engine;

    explicit Harness(mac::Scheme scheme)
        : mac(1, make_config(scheme), simcore::RngStream(5, 1, "txslot")),
          engine([this](const simcore::Event& e) {
              if (e.kind == simcore::EventKind::TxSignal) {
                  if (auto a = mac.on_tx_signal(engine, e.fire_time)) {
                      sent.push_back(*a);
                  }
              }
          })
    {
    }

    static mac::DeviceConfig make_config(mac::Scheme scheme)
    {
        mac::DeviceConfig c;
        c.dev_addr = 0xABCD;
        c.scheme = scheme;
        return c;
    }

    void packet_at(double t)
    {
        engine.run_until(SimTime::from_seconds(t));
        if (auto a = mac.on_app_packet(engine, engine.now(), mac.make_packet(engine.now()))) {
            sent.push_back(*a);
        }
    }

    void beacon(std::int64_t k, bool received)
    {
        const auto at = mac.config().timing.window_start(k);
        engine.run_until(at);
        mac.on_beacon_outcome(engine, at, received);
    }
};

} // namespace

TEST(DeviceMac, BuHoldsTrafficUntilABeaconIsHeard)
{
    Harness h(mac::Scheme::BU);
    h.beacon(0, false);
    h.packet_at(10.0);
    h.beacon(1, false);
    h.packet_at(200.0);
    h.beacon(2, false);
    h.engine.run_until(SimTime::from_seconds(383.0));
    EXPECT_TRUE(h.sent.empty());
    EXPECT_EQ(h.mac.queue_depth(), 2u);

    h.beacon(3, true);
    ASSERT_TRUE(h.mac.next_tx_signal().has_value());
    EXPECT_TRUE(h.mac.config().timing.in_window(*h.mac.next_tx_signal()));
    h.engine.run_until(SimTime::from_seconds(512.0));
    ASSERT_EQ(h.sent.size(), 2u);
    EXPECT_EQ(h.sent[0].sequence_number, 0u);
    EXPECT_EQ(h.sent[1].sequence_number, 1u);
    for (const auto& a : h.sent) {
        EXPECT_LE(a.end(), h.mac.config().timing.window_end(3));
        EXPECT_GE(a.start, h.mac.config().timing.window_start(3));
    }
    EXPECT_GE(h.sent[1].start, h.sent[0].end());
}

TEST(DeviceMac, BuStopsWhenNextBeaconIsMissed)
{
    Harness h(mac::Scheme::BU);
    h.beacon(0, true);
    h.beacon(1, false);
    EXPECT_FALSE(h.mac.next_tx_signal().has_value());
    for (int i = 0; i < 5; ++i) {
        h.packet_at(131.0 + i * 20.0);
    }
    h.engine.run_until(SimTime::from_seconds(255.0));
    EXPECT_TRUE(h.sent.empty());
    EXPECT_EQ(h.mac.max_queue_depth(), 5u);
}

TEST(DeviceMac, BaselineSendsImmediatelyOutsideListenInterval)
{
    Harness h(mac::Scheme::Baseline);
    h.packet_at(10.0);
    ASSERT_EQ(h.sent.size(), 1u);
    EXPECT_EQ(h.sent[0].start, SimTime::from_seconds(10.0));
}

TEST(DeviceMac, BaselineDefersPastListenIntervalAndBusyRadio)
{
    Harness h(mac::Scheme::Baseline);
    h.packet_at(128.5); // inside the reserved interval of epoch 1
    EXPECT_TRUE(h.sent.empty());
    h.engine.run_until(SimTime::from_seconds(131.0));
    ASSERT_EQ(h.sent.size(), 1u);
    EXPECT_EQ(h.sent[0].start, h.mac.config().timing.window_start(1));

    h.packet_at(131.0); // radio still busy with the first frame
    EXPECT_EQ(h.sent.size(), 1u);
    h.engine.run_until(SimTime::from_seconds(140.0));
    ASSERT_EQ(h.sent.size(), 2u);
    EXPECT_EQ(h.sent[1].start, h.sent[0].end());
}

TEST(DeviceMac, BeaconReceivedArmsExactlyOneSignalEvenWithEmptyQueue)
{
    for (bool with_packet : {false, true}) {
        Harness h(mac::Scheme::BU);
        if (with_packet) {
            h.mac.on_app_packet(h.engine, h.engine.now(), h.mac.make_packet(h.engine.now()));
        }
        h.beacon(0, true);
        EXPECT_TRUE(h.mac.beacon_received());
        EXPECT_EQ(h.engine.pending(), 1u);
        ASSERT_TRUE(h.mac.next_tx_signal().has_value());
        EXPECT_TRUE(h.mac.config().timing.in_window(*h.mac.next_tx_signal()));
        EXPECT_EQ(h.mac.config().timing.index_at(*h.mac.next_tx_signal()), 0);
    }
}

TEST(DeviceMac, SignalSendsHeadOfQueueAndRearms)
{
    Harness h(mac::Scheme::BU);
    h.beacon(0, true);
    const auto now = h.engine.now();
    h.mac.on_app_packet(h.engine, now, h.mac.make_packet(now));
    h.mac.on_app_packet(h.engine, now, h.mac.make_packet(now));
    const auto a = h.mac.on_tx_signal(h.engine, now);
    ASSERT_TRUE(a.has_value());
    EXPECT_EQ(a->sequence_number, 0u);
    EXPECT_EQ(h.mac.queue_depth(), 1u);
    EXPECT_TRUE(h.mac.next_tx_signal().has_value());

    Harness idle(mac::Scheme::BU);
    idle.beacon(0, true);
    EXPECT_FALSE(idle.mac.on_tx_signal(idle.engine, idle.engine.now()).has_value());
    EXPECT_TRUE(idle.mac.next_tx_signal().has_value());
}

TEST(DeviceMac, SignalWithoutBeaconFlagNeverTransmits)
{
    Harness h(mac::Scheme::BU);
    h.beacon(0, false);
    const auto now = h.engine.now();
    h.mac.on_app_packet(h.engine, now, h.mac.make_packet(now));
    EXPECT_FALSE(h.mac.beacon_received());
    EXPECT_FALSE(h.mac.on_tx_signal(h.engine, now).has_value());
    EXPECT_EQ(h.mac.queue_depth(), 1u);
}

TEST(DeviceMac, BuMidWindowPacketWaitsForASignal)
{
    Harness h(mac::Scheme::BU);
    h.beacon(0, true);
    h.packet_at(40.0);
    EXPECT_TRUE(h.sent.empty()); // never immediately
    h.engine.run_until(SimTime::from_seconds(128.0));
    for (const auto& a : h.sent) {
        EXPECT_GT(a.start, SimTime::from_seconds(40.0));
    }
}

TEST(Traffic, MeanGapOverTenThousandDraws)
{
    mac::TrafficModel tm;
    simcore::RngStream s(8, 8, "traffic");
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        sum += tm.next_gap(s).seconds();
    }
    EXPECT_NEAR(sum / 10000.0, 600.0, 5.0);
}
