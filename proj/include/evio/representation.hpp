#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evio/events.hpp"

namespace evio {

/// Two-channel event-count frame (per-polarity), row-major.
struct Frame {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<std::uint32_t> counts_pos;  // width * height
    std::vector<std::uint32_t> counts_neg;

    Frame() = default;
    Frame(std::uint16_t w, std::uint16_t h)
        : width(w), height(h), counts_pos(static_cast<std::size_t>(w) * h, 0),
          counts_neg(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t idx(std::uint16_t x, std::uint16_t y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    std::uint32_t pos(std::uint16_t x, std::uint16_t y) const { return counts_pos[idx(x, y)]; }
    std::uint32_t neg(std::uint16_t x, std::uint16_t y) const { return counts_neg[idx(x, y)]; }

    std::uint64_t total_pos() const;
    std::uint64_t total_neg() const;
    std::uint64_t total() const { return total_pos() + total_neg(); }

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Frames aligned 1:1 with the labels they were binned against.
struct FrameStack {
    std::vector<Frame> frames;
    std::uint64_t bin_window_us = kLabelPeriodUs;

    std::size_t size() const { return frames.size(); }

    friend bool operator==(const FrameStack&, const FrameStack&) = default;
};

/// 0/1 occupancy grid, row-major.
struct BinaryGrid {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<std::uint8_t> cells;

    BinaryGrid() = default;
    BinaryGrid(std::uint16_t w, std::uint16_t h)
        : width(w), height(h), cells(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t at(std::uint16_t x, std::uint16_t y) const {
        return cells[static_cast<std::size_t>(y) * width + x];
    }

    friend bool operator==(const BinaryGrid&, const BinaryGrid&) = default;
};

/// Bit-stacked binary frames: values[y][x] = sum_k grid_k[y][x] * 2^k with
/// grid 0 (the earliest frame) as the least significant bit.
struct BinaRep {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    int bits = 0;
    std::vector<std::uint32_t> values;  // row-major, each < 2^bits

    std::uint32_t at(std::uint16_t x, std::uint16_t y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }

    friend bool operator==(const BinaRep&, const BinaRep&) = default;
};

/// Sliding-window sampling parameters: window of `length` frames taken every
/// `stride` starts, frames inside a window `step` apart.
struct WindowSpec {
    std::size_t length = 1;
    std::size_t stride = 1;
    std::size_t step = 1;
};

/// Bins events into one frame per label: frame i holds the events with
/// t_us in [t_i - 10'000, t_i). Events before the first window (and at or
/// after the last label) are dropped.
FrameStack bin_to_frames(const EventStream& stream, const LabelTrack& track);

/// Cell = 1 iff counts_pos + counts_neg > 0.
BinaryGrid binarize(const Frame& frame);

/// Stacks 1..16 same-shape grids into a BinaRep; grid 0 is the LSB.
/// Shape mismatch or an unsupported grid count raises ArgumentError.
BinaRep bina_rep(std::span<const BinaryGrid> grids);

/// Sum-pools fx x fy blocks per polarity channel; factors must divide the
/// frame dimensions (ArgumentError otherwise).
Frame downsample(const Frame& frame, std::uint16_t fx, std::uint16_t fy);

/// Emits [s, s+step, ..., s+(length-1)*step] for each start s = 0, stride,
/// 2*stride, ... while the window fits inside n_frames. May be empty.
std::vector<std::vector<std::size_t>> sliding_windows(std::size_t n_frames,
                                                      const WindowSpec& spec);

}  // namespace evio
