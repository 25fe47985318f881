#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "algas/core.hpp"

namespace algas {

/// Inter-core exchange payload. Wire layout is little-endian in field
/// order, checksum last:
///   seq u32 | tick u32 | core_id u8 | distance u16 | crisp u16 | alarm u8 | checksum u16
struct DicPacket {
    std::uint32_t seq = 0;
    std::uint32_t tick = 0;
    std::uint8_t core_id = 0;
    std::uint16_t distance_raw = 0; // canonical, mean of the two filtered channels
    std::uint16_t crisp_raw = 0;
    std::uint8_t apmu_alarm = 0;
    std::uint16_t checksum = 0;

    friend bool operator==(const DicPacket&, const DicPacket&) = default;
};

inline constexpr std::size_t kDicPacketBytes = 16;
inline constexpr std::size_t kDicPayloadBytes = 14;

/// 16-bit ones'-complement sum (end-around carry) over little-endian words.
inline std::uint16_t ones_complement_checksum(std::span<const std::uint8_t> bytes) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
        sum += std::uint32_t(bytes[i]) | (std::uint32_t(bytes[i + 1]) << 8);
    }
    if (bytes.size() % 2 != 0) sum += std::uint32_t(bytes.back());
    while (sum >> 16) sum = (sum & 0xffffu) + (sum >> 16);
    return std::uint16_t(~sum);
}

inline std::array<std::uint8_t, kDicPacketBytes> encode(const DicPacket& p) {
    std::array<std::uint8_t, kDicPacketBytes> b{};
    auto put16 = [&](std::size_t at, std::uint16_t v) {
        b[at] = std::uint8_t(v & 0xff);
        b[at + 1] = std::uint8_t(v >> 8);
    };
    auto put32 = [&](std::size_t at, std::uint32_t v) {
        put16(at, std::uint16_t(v & 0xffff));
        put16(at + 2, std::uint16_t(v >> 16));
    };
    put32(0, p.seq);
    put32(4, p.tick);
    b[8] = p.core_id;
    put16(9, p.distance_raw);
    put16(11, p.crisp_raw);
    b[13] = p.apmu_alarm;
    put16(14, ones_complement_checksum(std::span(b).first(kDicPayloadBytes)));
    return b;
}

/// Decode and verify; a checksum mismatch yields nothing.
inline std::optional<DicPacket> decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != kDicPacketBytes) return std::nullopt;
    auto get16 = [&](std::size_t at) {
        return std::uint16_t(std::uint16_t(bytes[at]) | (std::uint16_t(bytes[at + 1]) << 8));
    };
    DicPacket p;
    p.seq = std::uint32_t(get16(0)) | (std::uint32_t(get16(2)) << 16);
    p.tick = std::uint32_t(get16(4)) | (std::uint32_t(get16(6)) << 16);
    p.core_id = bytes[8];
    p.distance_raw = get16(9);
    p.crisp_raw = get16(11);
    p.apmu_alarm = bytes[13];
    p.checksum = get16(14);
    if (p.checksum != ones_complement_checksum(bytes.first(kDicPayloadBytes))) return std::nullopt;
    return p;
}

/// Package one tick's shareable results for the opposite corner.
inline DicPacket dic_build_packet(const CoreOutput& out, std::uint32_t seq) {
    DicPacket p;
    p.seq = seq;
    p.tick = std::uint32_t(out.tick);
    p.core_id = std::uint8_t(out.core_id);
    p.distance_raw =
        std::uint16_t((out.filtered_lidar.raw + out.filtered_radar.raw + 1) >> 1);
    p.crisp_raw = std::uint16_t(out.crisp.raw);
    p.apmu_alarm = out.apmu.alarm ? 1 : 0;
    const auto frame = encode(p);
    p.checksum = ones_complement_checksum(std::span(frame).first(kDicPayloadBytes));
    return p;
}

/// One direction of an inter-core link: frames are delivered exactly
/// `latency_ticks` after the send. A full queue drops its oldest frame and
/// counts the event; corrupted frames are dropped on receipt.
class HsdciLink {
public:
    HsdciLink(int latency_ticks, std::size_t queue_capacity)
        : latency_(latency_ticks), capacity_(queue_capacity) {}

    void send(const DicPacket& packet, std::uint64_t tick) { send_raw(encode(packet), tick); }

    void send_raw(const std::array<std::uint8_t, kDicPacketBytes>& frame, std::uint64_t tick) {
        if (queue_.size() == capacity_) {
            queue_.pop_front();
            ++backpressure_count_;
        }
        queue_.push_back(Entry{tick, frame});
    }

    /// Frames due exactly now, in FIFO order.
    std::vector<DicPacket> collect(std::uint64_t now) {
        std::vector<DicPacket> delivered;
        while (!queue_.empty() && queue_.front().send_tick + std::uint64_t(latency_) <= now) {
            const Entry e = queue_.front();
            queue_.pop_front();
            if (e.send_tick + std::uint64_t(latency_) < now) {
                ++late_drop_count_;
                continue;
            }
            if (auto p = decode(e.frame)) {
                delivered.push_back(*p);
            } else {
                ++checksum_drop_count_;
            }
        }
        return delivered;
    }

    int latency() const { return latency_; }
    std::uint64_t backpressure_count() const { return backpressure_count_; }
    std::uint64_t checksum_drop_count() const { return checksum_drop_count_; }
    std::uint64_t late_drop_count() const { return late_drop_count_; }
    std::size_t pending() const { return queue_.size(); }

private:
    struct Entry {
        std::uint64_t send_tick;
        std::array<std::uint8_t, kDicPacketBytes> frame;
    };

    int latency_;
    std::size_t capacity_;
    std::deque<Entry> queue_;
    std::uint64_t backpressure_count_ = 0;
    std::uint64_t checksum_drop_count_ = 0;
    std::uint64_t late_drop_count_ = 0;
};

} // namespace algas
