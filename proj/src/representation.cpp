#include "evio/representation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace evio {

std::uint64_t Frame::total_pos() const {
    return std::accumulate(counts_pos.begin(), counts_pos.end(), std::uint64_t{0});
}

std::uint64_t Frame::total_neg() const {
    return std::accumulate(counts_neg.begin(), counts_neg.end(), std::uint64_t{0});
}

FrameStack bin_to_frames(const EventStream& stream, const LabelTrack& track) {
    FrameStack stack;
    stack.bin_window_us = kLabelPeriodUs;
    stack.frames.reserve(track.labels.size());

    auto by_time = [](const Event& e, std::uint64_t t) { return e.t_us < t; };
    for (const Label& label : track.labels) {
        Frame frame(stream.sensor_width, stream.sensor_height);
        std::uint64_t t1 = label.t_us;
        std::uint64_t t0 = t1 >= kLabelPeriodUs ? t1 - kLabelPeriodUs : 0;
        if (t1 > 0) {
            auto first = std::lower_bound(stream.events.begin(), stream.events.end(), t0, by_time);
            auto last = std::lower_bound(first, stream.events.end(), t1, by_time);
            for (auto it = first; it != last; ++it) {
                auto& channel = it->p == Polarity::Positive ? frame.counts_pos : frame.counts_neg;
                ++channel[frame.idx(it->x, it->y)];
            }
        }
        stack.frames.push_back(std::move(frame));
    }
    return stack;
}

BinaryGrid binarize(const Frame& frame) {
    BinaryGrid grid(frame.width, frame.height);
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        grid.cells[i] = (frame.counts_pos[i] + frame.counts_neg[i]) > 0 ? 1 : 0;
    }
    return grid;
}

BinaRep bina_rep(std::span<const BinaryGrid> grids) {
    if (grids.empty() || grids.size() > 16) {
        throw ArgumentError("bina_rep: need between 1 and 16 grids, got " +
                            std::to_string(grids.size()));
    }
    const BinaryGrid& first = grids[0];
    BinaRep rep;
    rep.width = first.width;
    rep.height = first.height;
    rep.bits = static_cast<int>(grids.size());
    rep.values.assign(first.cells.size(), 0);
    for (std::size_t k = 0; k < grids.size(); ++k) {
        const BinaryGrid& g = grids[k];
        if (g.width != rep.width || g.height != rep.height) {
            throw ArgumentError("bina_rep: grid " + std::to_string(k) + " shape mismatch");
        }
        for (std::size_t i = 0; i < g.cells.size(); ++i) {
            rep.values[i] |= static_cast<std::uint32_t>(g.cells[i]) << k;
        }
    }
    return rep;
}

Frame downsample(const Frame& frame, std::uint16_t fx, std::uint16_t fy) {
    if (fx == 0 || fy == 0 || frame.width % fx != 0 || frame.height % fy != 0) {
        throw ArgumentError("downsample: factors must divide " + std::to_string(frame.width) +
                            "x" + std::to_string(frame.height));
    }
    Frame out(frame.width / fx, frame.height / fy);
    for (std::uint16_t y = 0; y < frame.height; ++y) {
        for (std::uint16_t x = 0; x < frame.width; ++x) {
            std::size_t o = out.idx(x / fx, y / fy);
            out.counts_pos[o] += frame.pos(x, y);
            out.counts_neg[o] += frame.neg(x, y);
        }
    }
    return out;
}

std::vector<std::vector<std::size_t>> sliding_windows(std::size_t n_frames,
                                                      const WindowSpec& spec) {
    if (spec.length < 1 || spec.stride < 1 || spec.step < 1) {
        throw ArgumentError("sliding_windows: length, stride and step must all be >= 1");
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s + (spec.length - 1) * spec.step < n_frames; s += spec.stride) {
        std::vector<std::size_t> window(spec.length);
        for (std::size_t k = 0; k < spec.length; ++k) window[k] = s + k * spec.step;
        out.push_back(std::move(window));
    }
    return out;
}

}  // namespace evio
