#include "evio/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace evio {

namespace {

constexpr char kEventHeader[] = "t_us,x,y,p";
constexpr char kLabelHeader[] = "idx,x,y,blink";
constexpr char kTrajHeader[] = "idx,x,y";
constexpr char kBinMagic[4] = {'E', 'V', 'I', 'O'};
constexpr std::uint16_t kBinVersion = 1;
constexpr std::size_t kBinHeaderSize = 16;
constexpr std::size_t kBinRecordSize = 14;

std::string loc(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

void strip_cr(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
}

// Splits a CSV line into exactly n fields; ParseError otherwise.
std::vector<std::string_view> split_fields(std::string_view line, std::size_t n,
                                           const std::filesystem::path& path, std::size_t lineno) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (out.size() != n) {
        throw ParseError(loc(path, lineno) + ": expected " + std::to_string(n) +
                         " fields, got " + std::to_string(out.size()));
    }
    return out;
}

template <typename T>
T parse_num(std::string_view field, const std::filesystem::path& path, std::size_t lineno,
            const char* what) {
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.empty()) {
        throw ParseError(loc(path, lineno) + ": bad " + std::string(what) + " '" +
                         std::string(field) + "'");
    }
    return value;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) throw Error("cannot open " + path.string() + " for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

void expect_header(std::ifstream& in, const char* expected, const std::filesystem::path& path) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError(loc(path, 1) + ": missing header");
    strip_cr(header);
    if (header != expected) {
        throw ParseError(loc(path, 1) + ": expected header '" + expected + "', got '" + header +
                         "'");
    }
}

void put_u16(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

std::string format_coord(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
    std::string s(buf, ptr);
    std::size_t dot = s.find('.');
    if (dot == std::string::npos) {
        s += ".0000";
    } else if (s.size() - dot - 1 < 4) {
        s.append(4 - (s.size() - dot - 1), '0');
    }
    return s;
}

EventStream read_events_csv(const std::filesystem::path& path, std::uint16_t sensor_width,
                            std::uint16_t sensor_height) {
    std::ifstream in = open_in(path, std::ios::in);
    expect_header(in, kEventHeader, path);

    EventStream stream;
    stream.sensor_width = sensor_width;
    stream.sensor_height = sensor_height;

    std::string line;
    std::size_t lineno = 1;
    bool sorted = true;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        auto f = split_fields(line, 4, path, lineno);
        Event e;
        e.t_us = parse_num<std::uint64_t>(f[0], path, lineno, "t_us");
        e.x = parse_num<std::uint16_t>(f[1], path, lineno, "x");
        e.y = parse_num<std::uint16_t>(f[2], path, lineno, "y");
        int p = parse_num<int>(f[3], path, lineno, "p");
        if (p != 0 && p != 1) throw ParseError(loc(path, lineno) + ": polarity must be 0 or 1");
        e.p = p == 1 ? Polarity::Positive : Polarity::Negative;
        if (e.x >= sensor_width || e.y >= sensor_height) {
            throw BoundsError(loc(path, lineno) + ": event outside declared sensor " +
                              std::to_string(sensor_width) + "x" + std::to_string(sensor_height));
        }
        if (!stream.events.empty() && e.t_us < stream.events.back().t_us) sorted = false;
        stream.events.push_back(e);
    }
    if (!sorted) {
        std::stable_sort(stream.events.begin(), stream.events.end(),
                         [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
    }
    return stream;
}

void write_events_csv(const EventStream& stream, const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::out);
    out << kEventHeader << '\n';
    for (const Event& e : stream.events) {
        out << e.t_us << ',' << e.x << ',' << e.y << ',' << (e.p == Polarity::Positive ? 1 : 0)
            << '\n';
    }
    if (!out) throw Error("write failed for " + path.string());
}

EventStream read_events_bin(const std::filesystem::path& path) {
    std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (data.size() < kBinHeaderSize) throw FormatError(path.string() + ": truncated header");
    if (std::memcmp(data.data(), kBinMagic, 4) != 0) {
        throw FormatError(path.string() + ": bad magic, not an EVIO file");
    }
    std::uint16_t version = get_u16(data.data() + 4);
    if (version != kBinVersion) {
        throw FormatError(path.string() + ": unsupported version " + std::to_string(version));
    }
    EventStream stream;
    stream.sensor_width = get_u16(data.data() + 6);
    stream.sensor_height = get_u16(data.data() + 8);
    std::uint32_t count = get_u32(data.data() + 10);

    std::size_t payload = data.size() - kBinHeaderSize;
    if (payload % kBinRecordSize != 0) {
        throw FormatError(path.string() + ": payload length is not a multiple of the record size");
    }
    if (payload / kBinRecordSize != count) {
        throw FormatError(path.string() + ": header claims " + std::to_string(count) +
                          " records, file holds " + std::to_string(payload / kBinRecordSize));
    }

    stream.events.reserve(count);
    const unsigned char* p = data.data() + kBinHeaderSize;
    bool sorted = true;
    for (std::uint32_t i = 0; i < count; ++i, p += kBinRecordSize) {
        Event e;
        e.t_us = get_u64(p);
        e.x = get_u16(p + 8);
        e.y = get_u16(p + 10);
        unsigned char pol = p[12];
        if (pol > 1) {
            throw FormatError(path.string() + ": record " + std::to_string(i) + " bad polarity");
        }
        e.p = pol == 1 ? Polarity::Positive : Polarity::Negative;
        if (e.x >= stream.sensor_width || e.y >= stream.sensor_height) {
            throw BoundsError(path.string() + ": record " + std::to_string(i) +
                              " outside sensor bounds");
        }
        if (!stream.events.empty() && e.t_us < stream.events.back().t_us) sorted = false;
        stream.events.push_back(e);
    }
    if (!sorted) {
        std::stable_sort(stream.events.begin(), stream.events.end(),
                         [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
    }
    return stream;
}

void write_events_bin(const EventStream& stream, const std::filesystem::path& path) {
    std::string buf;
    buf.reserve(kBinHeaderSize + stream.events.size() * kBinRecordSize);
    buf.append(kBinMagic, 4);
    put_u16(buf, kBinVersion);
    put_u16(buf, stream.sensor_width);
    put_u16(buf, stream.sensor_height);
    put_u32(buf, static_cast<std::uint32_t>(stream.events.size()));
    put_u16(buf, 0);  // reserved
    for (const Event& e : stream.events) {
        put_u64(buf, e.t_us);
        put_u16(buf, e.x);
        put_u16(buf, e.y);
        buf.push_back(e.p == Polarity::Positive ? 1 : 0);
        buf.push_back(0);  // reserved
    }
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("write failed for " + path.string());
}

LabelTrack read_labels_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path, std::ios::in);
    expect_header(in, kLabelHeader, path);

    LabelTrack track;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        auto f = split_fields(line, 4, path, lineno);
        Label l;
        l.index = parse_num<std::uint32_t>(f[0], path, lineno, "idx");
        l.t_us = static_cast<std::uint64_t>(l.index) * kLabelPeriodUs;
        l.x = parse_num<double>(f[1], path, lineno, "x");
        l.y = parse_num<double>(f[2], path, lineno, "y");
        int blink = parse_num<int>(f[3], path, lineno, "blink");
        if (blink != 0 && blink != 1) {
            throw ParseError(loc(path, lineno) + ": blink must be 0 or 1");
        }
        l.blink = blink == 1;
        if (!track.labels.empty() && l.index != track.labels.back().index + 1) {
            throw FormatError(loc(path, lineno) + ": gap in label indices (" +
                              std::to_string(track.labels.back().index) + " -> " +
                              std::to_string(l.index) + ")");
        }
        track.labels.push_back(l);
    }
    return track;
}

void write_labels_csv(const LabelTrack& track, const std::filesystem::path& path) {
    std::ofstream out = open_out(path, std::ios::out);
    out << kLabelHeader << '\n';
    for (const Label& l : track.labels) {
        out << l.index << ',' << format_coord(l.x) << ',' << format_coord(l.y) << ','
            << (l.blink ? 1 : 0) << '\n';
    }
    if (!out) throw Error("write failed for " + path.string());
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path, std::ios::in);
    expect_header(in, kTrajHeader, path);

    Trajectory traj;
    traj.source = path.stem().string();
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        auto f = split_fields(line, 3, path, lineno);
        parse_num<std::uint32_t>(f[0], path, lineno, "idx");
        Vec2 p;
        p.x = parse_num<double>(f[1], path, lineno, "x");
        p.y = parse_num<double>(f[2], path, lineno, "y");
        traj.points.push_back(p);
    }
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path,
                          std::uint32_t start_index) {
    std::ofstream out = open_out(path, std::ios::out);
    out << kTrajHeader << '\n';
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        out << (start_index + i) << ',' << format_coord(traj.points[i].x) << ','
            << format_coord(traj.points[i].y) << '\n';
    }
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace evio
