#include <catch2/catch_amalgamated.hpp>

#include "algas/packet.hpp"

using namespace algas;

namespace {

DicPacket sample_packet() {
    CoreOutput out;
    out.tick = 77;
    out.core_id = 2;
    out.filtered_lidar = FixedSample{30000, kCanonical};
    out.filtered_radar = FixedSample{30501, kCanonical};
    out.crisp = FixedSample{41234, kCanonical};
    out.apmu.alarm = true;
    return dic_build_packet(out, 9);
}

} // namespace

TEST_CASE("packet round trip") {
    const DicPacket p = sample_packet();
    CHECK(p.distance_raw == 30251); // rounded mean of the two channels
    const auto frame = encode(p);
    const auto decoded = decode(frame);
    REQUIRE(decoded.has_value());
    CHECK(*decoded == p);
}

TEST_CASE("any payload bit flip is caught") {
    const auto frame = encode(sample_packet());
    for (std::size_t byte = 0; byte < kDicPayloadBytes; ++byte) {
        for (int bit = 0; bit < 8; ++bit) {
            auto corrupted = frame;
            corrupted[byte] = std::uint8_t(corrupted[byte] ^ (1u << bit));
            REQUIRE_FALSE(decode(corrupted).has_value());
        }
    }
}

TEST_CASE("checksum of an all-zero payload") {
    std::array<std::uint8_t, kDicPayloadBytes> zeros{};
    CHECK(ones_complement_checksum(zeros) == 0xffff);
}

TEST_CASE("sequence numbers count packets per sender") {
    CoreOutput out;
    for (std::uint32_t s = 0; s < 5; ++s) {
        CHECK(dic_build_packet(out, s).seq == s);
    }
}

TEST_CASE("unit latency delivers on the next tick") {
    HsdciLink link(1, 4);
    CHECK(link.collect(0).empty());
    link.send(sample_packet(), 0);
    CHECK(link.collect(0).empty());
    const auto delivered = link.collect(1);
    REQUIRE(delivered.size() == 1);
    CHECK(delivered[0] == sample_packet());
    CHECK(link.collect(2).empty());
}

TEST_CASE("latency three holds frames for three ticks") {
    HsdciLink link(3, 8);
    link.send(sample_packet(), 10);
    CHECK(link.collect(11).empty());
    CHECK(link.collect(12).empty());
    CHECK(link.collect(13).size() == 1);
}

TEST_CASE("a full queue drops its oldest frame") {
    HsdciLink link(1, 4);
    DicPacket p = sample_packet();
    for (std::uint32_t i = 0; i < 5; ++i) {
        p.seq = i;
        link.send(p, 0);
    }
    CHECK(link.backpressure_count() == 1);
    const auto delivered = link.collect(1);
    REQUIRE(delivered.size() == 4);
    CHECK(delivered.front().seq == 1); // seq 0 was pushed out
    CHECK(delivered.back().seq == 4);
}

TEST_CASE("corrupted frames are dropped and counted") {
    HsdciLink link(1, 4);
    auto frame = encode(sample_packet());
    frame[5] ^= 0x10;
    link.send_raw(frame, 0);
    link.send(sample_packet(), 0);
    CHECK(link.collect(1).size() == 1);
    CHECK(link.checksum_drop_count() == 1);
}
