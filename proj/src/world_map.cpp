#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "idiobot/matrix_io.hpp"
#include "idiobot/world.hpp"

namespace idiobot {
namespace {

constexpr double kMinSegmentLength = 1e-9;

struct Field {
    std::string_view text;
    std::size_t column;
};

std::vector<Field> split_fields(std::string_view line) {
    std::vector<Field> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

double number(const Field& f, std::size_t line) {
    double v = 0.0;
    if (!parse_double(f.text, v) || !std::isfinite(v)) {
        throw MapError("expected a finite number, got '" + std::string(f.text) + "'", line, f.column);
    }
    return v;
}

int integer(const Field& f, std::size_t line) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
    if (ec != std::errc{} || ptr != f.text.data() + f.text.size()) {
        throw MapError("expected an integer, got '" + std::string(f.text) + "'", line, f.column);
    }
    return v;
}

Segment segment(const std::vector<Field>& f, std::size_t line) {
    Segment s{{number(f[1], line), number(f[2], line)}, {number(f[3], line), number(f[4], line)}};
    if (s.length() < kMinSegmentLength) throw MapError("degenerate segment", line, f[0].column);
    return s;
}

bool segment_in_bounds(const Segment& s, const Bounds& b) { return b.contains(s.a) && b.contains(s.b); }

}  // namespace

MapError::MapError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(line ? "map " + std::to_string(line) + ":" + std::to_string(column) + ": " + message
                              : "map: " + message),
      line_(line),
      column_(column) {}

void WorldMap::validate() const {
    if (!(bounds.xmin < bounds.xmax && bounds.ymin < bounds.ymax)) throw MapError("bounds are empty");
    if (!bounds.contains(start.position())) throw MapError("start pose lies outside the bounds");
    if (doors.empty()) throw MapError("map has no door markers; room progression is undefined");
    std::set<int> orders;
    for (const Door& d : doors) {
        if (d.span.length() < kMinSegmentLength) throw MapError("degenerate doorway");
        if (!segment_in_bounds(d.span, bounds)) throw MapError("doorway lies outside the bounds");
        if (!orders.insert(d.marker_order).second) {
            throw MapError("duplicate marker order " + std::to_string(d.marker_order));
        }
    }
    for (const Segment& w : walls) {
        if (w.length() < kMinSegmentLength) throw MapError("degenerate wall");
        if (!segment_in_bounds(w, bounds)) throw MapError("wall lies outside the bounds");
    }
}

WorldMap parse_map(std::string_view text) {
    WorldMap map;
    bool have_start = false, have_bounds = false, any_record = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto f = split_fields(line);
        if (f.empty()) continue;
        any_record = true;

        auto expect = [&](std::size_t n) {
            if (f.size() != n) {
                throw MapError("'" + std::string(f[0].text) + "' takes " + std::to_string(n - 1) + " values",
                               line_no, f.size() > n ? f[n].column : f.back().column);
            }
        };
        const std::string_view kind = f[0].text;
        if (kind == "wall") {
            expect(5);
            map.walls.push_back(segment(f, line_no));
        } else if (kind == "door") {
            expect(6);
            map.doors.push_back({segment(f, line_no), integer(f[5], line_no)});
        } else if (kind == "start") {
            expect(4);
            if (have_start) throw MapError("duplicate start record", line_no, f[0].column);
            map.start = {number(f[1], line_no), number(f[2], line_no), number(f[3], line_no)};
            have_start = true;
        } else if (kind == "bounds") {
            expect(5);
            if (have_bounds) throw MapError("duplicate bounds record", line_no, f[0].column);
            map.bounds = {number(f[1], line_no), number(f[2], line_no), number(f[3], line_no), number(f[4], line_no)};
            have_bounds = true;
        } else {
            throw MapError("unknown record '" + std::string(kind) + "'", line_no, f[0].column);
        }
        if (eol == text.size()) break;
    }
    if (!any_record) throw MapError("empty map document", 1, 1);
    if (!have_bounds) throw MapError("missing bounds record", line_no, 1);
    if (!have_start) throw MapError("missing start record", line_no, 1);
    std::stable_sort(map.doors.begin(), map.doors.end(),
                     [](const Door& a, const Door& b) { return a.marker_order < b.marker_order; });
    map.validate();
    return map;
}

std::string save_map(const WorldMap& map) {
    auto seg = [](const Segment& s) {
        return format_double(s.a.x) + " " + format_double(s.a.y) + " " + format_double(s.b.x) + " " +
               format_double(s.b.y);
    };
    std::string out;
    out += "bounds " + format_double(map.bounds.xmin) + " " + format_double(map.bounds.ymin) + " " +
           format_double(map.bounds.xmax) + " " + format_double(map.bounds.ymax) + "\n";
    out += "start " + format_double(map.start.x) + " " + format_double(map.start.y) + " " +
           format_double(map.start.heading_deg) + "\n";
    for (const Segment& w : map.walls) out += "wall " + seg(w) + "\n";
    for (const Door& d : map.doors) out += "door " + seg(d.span) + " " + std::to_string(d.marker_order) + "\n";
    return out;
}

WorldMap load_map(const std::filesystem::path& path) { return parse_map(read_file(path)); }

}  // namespace idiobot
