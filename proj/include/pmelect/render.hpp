#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "topology.hpp"

namespace pmelect {

// What the renderer needs from a run: the layout plus optional tree and leader registers.
struct Snapshot {
    Configuration config;
    std::vector<int> parent_port;  // -1 for none; empty when no tree is known
    std::vector<bool> leader;
    std::vector<std::vector<LocalBoundary>> traces;  // drawn on request
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline const char* edge_colour(EdgeClass e) {
    switch (e) {
        case EdgeClass::Grey: return "#9a9a9a";
        case EdgeClass::LightBlue: return "#7fb8e6";
        case EdgeClass::DarkBlue: return "#1d3f8f";
    }
    return "#000000";
}

}  // namespace detail

inline std::string render_svg(const Snapshot& snap) {
    const auto& nodes = snap.config.nodes;
    const double sx = 20.0;
    const double sy = 20.0 * std::sqrt(3.0);
    int minx = 0, maxx = 0, miny = 0, maxy = 0;
    if (!nodes.empty()) {
        minx = maxx = nodes.front().x;
        miny = maxy = nodes.front().y;
    }
    for (const auto& c : nodes) {
        minx = std::min(minx, c.x);
        maxx = std::max(maxx, c.x);
        miny = std::min(miny, c.y);
        maxy = std::max(maxy, c.y);
    }
    const double pad = 30.0;
    auto px = [&](int x) { return pad + (x - minx) * sx; };
    auto py = [&](int y) { return pad + (maxy - y) * sy; };
    const double width = 2 * pad + (maxx - minx) * sx;
    const double height = 2 * pad + (maxy - miny) * sy;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(width) + "\" height=\"" +
           detail::fmt(height) + "\">\n";
    out += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" "
           "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#c0392b\"/></marker></defs>\n";

    const Layout layout(snap.config);
    for (const auto& u : nodes) {
        for (PortId d : {0, 1, 2}) {
            const NodeCoord v = neighbor_of(u, d, Chirality::Standard);
            if (!layout.occupied(v)) continue;
            const EdgeClass e = layout.classify(u, v);
            out += "<line x1=\"" + detail::fmt(px(u.x)) + "\" y1=\"" + detail::fmt(py(u.y)) + "\" x2=\"" +
                   detail::fmt(px(v.x)) + "\" y2=\"" + detail::fmt(py(v.y)) + "\" stroke=\"" + detail::edge_colour(e) +
                   "\" stroke-width=\"" + (e == EdgeClass::DarkBlue ? "4" : "3") + "\" class=\"" + to_string(e) + "\"/>\n";
        }
    }
    for (const auto& trace : snap.traces) {
        for (const auto& h : trace) {
            out += "<line x1=\"" + detail::fmt(px(h.u.x)) + "\" y1=\"" + detail::fmt(py(h.u.y)) + "\" x2=\"" +
                   detail::fmt(px(h.v.x)) + "\" y2=\"" + detail::fmt(py(h.v.y)) +
                   "\" stroke=\"#27ae60\" stroke-width=\"1\" stroke-dasharray=\"3,2\" class=\"trace\"/>\n";
        }
    }
    for (std::size_t i = 0; i < snap.parent_port.size() && i < nodes.size(); ++i) {
        const int p = snap.parent_port[i];
        if (p < 0) continue;
        const Chirality c = i < snap.config.chirality.size() ? snap.config.chirality[i] : Chirality::Standard;
        const NodeCoord u = nodes[i];
        const NodeCoord v = neighbor_of(u, p, c);
        const double x1 = px(u.x), y1 = py(u.y), x2 = px(v.x), y2 = py(v.y);
        out += "<line x1=\"" + detail::fmt(x1 + 0.25 * (x2 - x1)) + "\" y1=\"" + detail::fmt(y1 + 0.25 * (y2 - y1)) +
               "\" x2=\"" + detail::fmt(x1 + 0.75 * (x2 - x1)) + "\" y2=\"" + detail::fmt(y1 + 0.75 * (y2 - y1)) +
               "\" stroke=\"#c0392b\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\" class=\"parent\"/>\n";
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const bool lead = i < snap.leader.size() && snap.leader[i];
        out += "<circle cx=\"" + detail::fmt(px(nodes[i].x)) + "\" cy=\"" + detail::fmt(py(nodes[i].y)) +
               "\" r=\"7\" fill=\"" + (lead ? "#e74c3c" : "#2c2c2c") + "\" class=\"" + (lead ? "leader" : "particle") +
               "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

// One text row per lattice row: L leader, o particle, '.' empty node.
inline std::string render_ascii(const Snapshot& snap) {
    const auto& nodes = snap.config.nodes;
    if (nodes.empty()) return {};
    std::map<NodeCoord, char> cell;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        cell[nodes[i]] = (i < snap.leader.size() && snap.leader[i]) ? 'L' : 'o';
    int minx = nodes.front().x, maxx = minx, miny = nodes.front().y, maxy = miny;
    for (const auto& c : nodes) {
        minx = std::min(minx, c.x);
        maxx = std::max(maxx, c.x);
        miny = std::min(miny, c.y);
        maxy = std::max(maxy, c.y);
    }
    std::string out;
    for (int y = maxy; y >= miny; --y) {
        std::string row;
        for (int x = minx; x <= maxx; ++x) {
            if (((x + y) % 2 + 2) % 2 != 0) {
                row += ' ';
                continue;
            }
            const auto it = cell.find({x, y});
            row += it == cell.end() ? '.' : it->second;
        }
        while (!row.empty() && row.back() == ' ') row.pop_back();
        out += row + "\n";
    }
    return out;
}

}  // namespace pmelect
