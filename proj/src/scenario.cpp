#include "evio/scenario.hpp"

#include <fstream>

#include <json.hpp>

namespace evio {

namespace {

using nlohmann::json;

SegmentKind parse_kind(const std::string& s) {
    if (s == "fixation") return SegmentKind::Fixation;
    if (s == "pursuit") return SegmentKind::Pursuit;
    if (s == "saccade") return SegmentKind::Saccade;
    if (s == "blink") return SegmentKind::Blink;
    throw ParseError("unknown segment kind '" + s + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }

    Scenario sc;
    try {
        if (doc.contains("config")) {
            const json& c = doc["config"];
            sc.config.width = c.value("width", sc.config.width);
            sc.config.height = c.value("height", sc.config.height);
            sc.config.pupil_radius = c.value("pupil_radius", sc.config.pupil_radius);
            sc.config.contrast = c.value("contrast", sc.config.contrast);
            sc.config.threshold = c.value("threshold", sc.config.threshold);
            sc.config.noise_rate_hz = c.value("noise_rate_hz", sc.config.noise_rate_hz);
            sc.config.frame_dt_us = c.value("frame_dt_us", sc.config.frame_dt_us);
            sc.config.seed = c.value("seed", sc.config.seed);
        }
        sc.script.width = sc.config.width;
        sc.script.height = sc.config.height;
        sc.script.margin = sc.config.pupil_radius;

        if (!doc.contains("script") || !doc["script"].is_array() || doc["script"].empty()) {
            throw ParseError("scenario needs a non-empty 'script' array");
        }
        for (const json& s : doc["script"]) {
            Segment seg;
            seg.kind = parse_kind(s.at("kind").get<std::string>());
            double ms = s.at("duration_ms").get<double>();
            if (ms <= 0.0) throw ParseError("segment duration_ms must be > 0");
            seg.duration_us = static_cast<std::uint64_t>(ms * 1000.0);
            if (s.contains("x") != s.contains("y")) {
                throw ParseError("segment target needs both x and y");
            }
            if (s.contains("x")) seg.target = Vec2{s["x"].get<double>(), s["y"].get<double>()};
            seg.amplitude_px = s.value("amplitude_px", 0.0);
            seg.frequency_hz = s.value("frequency_hz", 0.0);
            seg.jitter_px = s.value("jitter_px", 0.3);
            seg.peak_velocity_px_s = s.value("peak_velocity_px_s", 0.0);
            sc.script.segments.push_back(seg);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string() + " for reading");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_scenario(text);
}

}  // namespace evio
