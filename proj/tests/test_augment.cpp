#include <doctest.h>

#include <cmath>
#include <random>

#include "evio/augment.hpp"
#include "evio/representation.hpp"
#include "evio/simulator.hpp"
#include "evio/trackers.hpp"
#include "evio/metrics.hpp"
#include "test_support.hpp"

using namespace evio;

namespace {

LabelTrack quantized_track(std::mt19937_64& rng, std::size_t n, double w, double h) {
    LabelTrack t = testutil::random_track(rng, n, w, h);
    for (Label& l : t.labels) {
        l.x = std::nearbyint(l.x * 1024.0) / 1024.0;
        l.y = std::nearbyint(l.y * 1024.0) / 1024.0;
    }
    return t;
}

}  // namespace

TEST_CASE("temporal_shift: +200 ms realigns labels by exactly 20 indices") {
    std::mt19937_64 rng(101);
    EventStream s = testutil::random_stream(rng, 400, 64, 48, 3'000'000);
    LabelTrack t = testutil::random_track(rng, 300, 64, 48);

    ShiftResult r = temporal_shift(s, t, 200'000);
    CHECK_FALSE(r.empty_warning);
    REQUIRE(r.track.size() == 300);
    CHECK(r.track.labels.front().index == 20);
    CHECK(r.track.labels.front().t_us == 200'000);
    for (std::size_t i = 0; i < r.track.size(); ++i) {
        CHECK(r.track.labels[i].index == t.labels[i].index + 20);
        CHECK(r.track.labels[i].x == t.labels[i].x);
        CHECK(r.track.labels[i].y == t.labels[i].y);
        CHECK(r.track.labels[i].blink == t.labels[i].blink);
    }
    REQUIRE(r.stream.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(r.stream.events[i].t_us == s.events[i].t_us + 200'000);
    }
}

TEST_CASE("temporal_shift: zero shift is the identity") {
    std::mt19937_64 rng(103);
    EventStream s = testutil::random_stream(rng, 100, 32, 32, 500'000);
    LabelTrack t = testutil::random_track(rng, 50, 32, 32);
    ShiftResult r = temporal_shift(s, t, 0);
    CHECK(r.stream == s);
    CHECK(r.track == t);
}

TEST_CASE("temporal_shift: +10 ms then -10 ms round-trips") {
    std::mt19937_64 rng(107);
    EventStream s = testutil::random_stream(rng, 200, 32, 32, 800'000);
    LabelTrack t = testutil::random_track(rng, 80, 32, 32);

    ShiftResult fwd = temporal_shift(s, t, 10'000);
    ShiftResult back = temporal_shift(fwd.stream, fwd.track, -10'000);
    CHECK(back.stream == s);
    // the label realigned to index 0 is trimmed on the way back; the rest
    // round-trips exactly
    REQUIRE(back.track.size() == t.size() - 1);
    for (std::size_t i = 0; i < back.track.size(); ++i) {
        CHECK(back.track.labels[i] == t.labels[i + 1]);
    }
}

TEST_CASE("temporal_shift: sub-10ms remainder moves only the events") {
    EventStream s;
    s.sensor_width = s.sensor_height = 16;
    s.events.push_back({0, 1, 1, Polarity::Positive});
    LabelTrack t;
    t.labels.push_back({0, 0, 2.0, 2.0, false});
    t.labels.push_back({1, 10'000, 3.0, 3.0, false});

    ShiftResult r = temporal_shift(s, t, 15'000);  // k = 1, remainder 5 ms
    CHECK(r.stream.events[0].t_us == 15'000);
    REQUIRE(r.track.size() == 2);
    CHECK(r.track.labels[0].index == 1);
    CHECK(r.track.labels[0].t_us == 10'000);
    CHECK(r.track.labels[0].x == 2.0);

    ShiftResult neg = temporal_shift(s, t, -15'000);  // k = -1 drops everything here
    CHECK(neg.empty_warning);
    CHECK(neg.stream.empty());
    CHECK(neg.track.empty());  // label 1 lands at index 0 with its events gone
}

TEST_CASE("temporal_shift: bounds and span warnings") {
    std::mt19937_64 rng(109);
    EventStream s = testutil::random_stream(rng, 50, 32, 32, 100'000);
    LabelTrack t = testutil::random_track(rng, 10, 32, 32);
    CHECK_THROWS_AS(temporal_shift(s, t, 200'001), ArgumentError);
    CHECK_THROWS_AS(temporal_shift(s, t, -200'001), ArgumentError);

    ShiftResult r = temporal_shift(s, t, -150'000);  // longer than the whole recording
    CHECK(r.empty_warning);
    CHECK(r.stream.empty());
}

TEST_CASE("temporal_shift by a label period leaves binned frames identical per surviving index") {
    std::mt19937_64 rng(113);
    EventStream s = testutil::random_stream(rng, 3000, 32, 32, 600'000);
    LabelTrack t = testutil::random_track(rng, 60, 32, 32);
    FrameStack original = bin_to_frames(s, t);

    for (std::int64_t shift : {20'000, 200'000, -30'000}) {
        ShiftResult r = temporal_shift(s, t, shift);
        FrameStack shifted = bin_to_frames(r.stream, r.track);
        REQUIRE(shifted.size() == r.track.size());
        std::int64_t k = shift / 10'000;
        if (shift < 0) CHECK(r.track.labels.front().index >= 1);
        for (std::size_t i = 0; i < shifted.size(); ++i) {
            std::size_t src = static_cast<std::size_t>(
                static_cast<std::int64_t>(r.track.labels[i].index) - k);
            REQUIRE(src < original.size());
            CHECK(shifted.frames[i] == original.frames[src]);
        }
    }
}

TEST_CASE("spatial_flip: formula, involution, commutation") {
    std::mt19937_64 rng(127);
    EventStream s = testutil::random_stream(rng, 300, 8, 8, 100'000);
    s.events[0].x = 2;
    LabelTrack t = quantized_track(rng, 40, 8, 8);
    t.labels[7].blink = true;

    auto [hs, ht] = spatial_flip(s, t, true, false);
    CHECK(hs.events[0].x == 5);
    CHECK(hs.events[0].y == s.events[0].y);
    CHECK(ht.labels[7].blink);

    auto [hhs, hht] = spatial_flip(hs, ht, true, false);
    CHECK(hhs == s);
    CHECK(hht == t);

    auto [vs, vt] = spatial_flip(s, t, false, true);
    auto [vvs, vvt] = spatial_flip(vs, vt, false, true);
    CHECK(vvs == s);
    CHECK(vvt == t);

    auto [bs, bt] = spatial_flip(s, t, true, true);
    auto [bbs, bbt] = spatial_flip(bs, bt, true, true);
    CHECK(bbs == s);
    CHECK(bbt == t);

    // h then v equals the combined flip
    auto [hv_s, hv_t] = spatial_flip(hs, ht, false, true);
    CHECK(hv_s == bs);
    CHECK(hv_t == bt);
}

TEST_CASE("event_deletion: degenerate fractions") {
    std::mt19937_64 rng(131);
    EventStream s = testutil::random_stream(rng, 500, 32, 32, 100'000);
    CHECK(event_deletion(s, 0.0, 7) == s);
    CHECK(event_deletion(s, 1.0, 7).empty());
    CHECK_THROWS_AS(event_deletion(s, -0.1, 7), ArgumentError);
    CHECK_THROWS_AS(event_deletion(s, 1.1, 7), ArgumentError);
}

TEST_CASE("event_deletion: survivors are an ordered subsequence, stable per seed") {
    std::mt19937_64 rng(137);
    EventStream s = testutil::random_stream(rng, 2000, 32, 32, 400'000);
    EventStream kept = event_deletion(s, 0.3, 42);
    CHECK(kept == event_deletion(s, 0.3, 42));

    std::size_t cursor = 0;
    for (const Event& e : kept.events) {
        while (cursor < s.size() && !(s.events[cursor] == e)) ++cursor;
        REQUIRE(cursor < s.size());
        ++cursor;
    }
}

TEST_CASE("event_deletion at 5% stays within the 3-sigma binomial band over 20 seeds") {
    std::mt19937_64 rng(139);
    const std::size_t n = 100'000;
    EventStream s = testutil::random_stream(rng, n, 64, 64, 5'000'000);
    const double expect = n * 0.95;
    const double band = 3.0 * std::sqrt(n * 0.05 * 0.95);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        double kept = static_cast<double>(event_deletion(s, 0.05, seed).size());
        CHECK(kept >= expect - band);
        CHECK(kept <= expect + band);
    }
}

TEST_CASE("flipping both axes leaves the tracked pixel error unchanged") {
    MotionScript script;
    script.width = 64;
    script.height = 48;
    script.margin = 5.0;
    Segment start;
    start.kind = SegmentKind::Fixation;
    start.duration_us = 200'000;
    start.target = Vec2{30, 22};
    start.jitter_px = 0.0;
    Segment pursuit;
    pursuit.kind = SegmentKind::Pursuit;
    pursuit.duration_us = 1'500'000;
    pursuit.amplitude_px = 12.0;
    pursuit.frequency_hz = 1.2;
    script.segments = {start, pursuit};
    LabelTrack track = synth_trajectory(script, 17);

    SimConfig cfg;
    cfg.width = 64;
    cfg.height = 48;
    cfg.pupil_radius = 5.0;
    cfg.noise_rate_hz = 1.0;
    cfg.seed = 17;
    EventStream stream = render_events(track, cfg);

    // frame 0 (bin window before t = 0) always yields the frame-center
    // fallback, which is not mirror-symmetric; score from frame 1
    auto run = [](const EventStream& s, const LabelTrack& t) {
        Trajectory pred = centroid_track(bin_to_frames(s, t), 2.0, 1.0);
        Trajectory tail;
        tail.points.assign(pred.points.begin() + 1, pred.points.end());
        LabelTrack gt;
        gt.labels.assign(t.labels.begin() + 1, t.labels.end());
        return pixel_error(tail, gt, true).pixel_error;
    };
    auto [fs, ft] = spatial_flip(stream, track, true, true);
    CHECK(run(fs, ft) == doctest::Approx(run(stream, track)).epsilon(1e-9));
}

TEST_CASE("augment composes shift, flip and deletion") {
    std::mt19937_64 rng(149);
    EventStream s = testutil::random_stream(rng, 400, 32, 32, 900'000);
    LabelTrack t = quantized_track(rng, 90, 32, 32);

    AugSpec spec;
    spec.shift_us = 20'000;
    spec.flip_h = true;
    spec.delete_frac = 0.0;
    spec.seed = 3;
    ShiftResult r = augment(s, t, spec);

    ShiftResult step1 = temporal_shift(s, t, spec.shift_us);
    auto [fs, ft] = spatial_flip(step1.stream, step1.track, true, false);
    CHECK(r.stream == fs);
    CHECK(r.track == ft);

    spec.delete_frac = 0.4;
    ShiftResult r2 = augment(s, t, spec);
    CHECK(r2.stream == event_deletion(fs, 0.4, 3));
}
