#include "lrsi/config.hpp"

#include <cstdio>

namespace lrsi {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

namespace {

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

std::vector<std::array<double, 2>> pairs(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of pairs");
    std::vector<std::array<double, 2>> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw ConfigError(where + ": expected [x, h] pairs");
        out.push_back({number(e[0], where), number(e[1], where)});
    }
    return out;
}

}  // namespace

SurfaceProfile profile_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("profile: expected an object");
    if (!j.contains("kind")) throw ConfigError("profile: missing key 'kind'");
    if (!j["kind"].is_string()) throw ConfigError("profile.kind: expected a string");
    const std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "example1" || kind == "example2" || kind == "example3" || kind == "flat") {
            reject_unknown_keys(j, {"kind"}, "profile");
            if (kind == "flat") return SurfaceProfile::flat();
            if (kind == "example1") return SurfaceProfile::example1();
            if (kind == "example2") return SurfaceProfile::example2();
            return SurfaceProfile::example3();
        }
        if (kind == "spline_bumps") {
            reject_unknown_keys(j, {"kind", "bumps"}, "profile");
            if (!j.contains("bumps") || !j["bumps"].is_array()) throw ConfigError("profile.bumps: expected an array");
            std::vector<Bump> bumps;
            for (const auto& b : j["bumps"]) {
                if (!b.is_array() || b.size() != 3)
                    throw ConfigError("profile.bumps: each bump is [amplitude, center, width]");
                bumps.push_back({number(b[0], "profile.bumps"), number(b[1], "profile.bumps"),
                                 number(b[2], "profile.bumps")});
            }
            return SurfaceProfile::spline_bumps(bumps);
        }
        if (kind == "piecewise_linear") {
            reject_unknown_keys(j, {"kind", "nodes"}, "profile");
            if (!j.contains("nodes")) throw ConfigError("profile: missing key 'nodes'");
            std::vector<Vec2> nodes;
            for (const auto& p : pairs(j["nodes"], "profile.nodes")) nodes.push_back({p[0], p[1]});
            return SurfaceProfile::piecewise_linear(nodes);
        }
        if (kind == "multiscale") {
            reject_unknown_keys(j, {"kind", "amplitude", "half_width", "base", "ripple", "ripple_frequency", "frequency"},
                                "profile");
            MultiscaleParams m;
            auto opt = [&](const char* key, double& dst) {
                if (j.contains(key)) dst = number(j[key], std::string("profile.") + key);
            };
            opt("amplitude", m.amplitude);
            opt("half_width", m.half_width);
            opt("base", m.base);
            opt("ripple", m.ripple);
            opt("ripple_frequency", m.ripple_frequency);
            opt("frequency", m.frequency);
            return SurfaceProfile::multiscale(m);
        }
        if (kind == "tabulated") {
            reject_unknown_keys(j, {"kind", "path", "x", "h", "order"}, "profile");
            int order = 3;
            if (j.contains("order")) {
                if (!j["order"].is_number_integer()) throw ConfigError("profile.order: expected 1 or 3");
                order = j["order"].get<int>();
            }
            if (j.contains("path")) {
                if (!j["path"].is_string()) throw ConfigError("profile.path: expected a string");
                return SurfaceProfile::tabulated_csv(j["path"].get<std::string>(), order);
            }
            if (!j.contains("x") || !j.contains("h")) throw ConfigError("profile: tabulated needs 'path' or 'x' and 'h'");
            std::vector<double> xs, hs;
            for (const auto& v : j["x"]) xs.push_back(number(v, "profile.x"));
            for (const auto& v : j["h"]) hs.push_back(number(v, "profile.h"));
            return SurfaceProfile::tabulated(xs, hs, order);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("profile: ") + e.what());
    }
    throw ConfigError("profile.kind: unknown kind '" + kind + "'");
}

json profile_to_json(const SurfaceProfile& p) {
    json j;
    j["kind"] = kind_name(p.kind());
    switch (p.kind()) {
        case ProfileKind::flat:
            break;
        case ProfileKind::spline_bumps: {
            json b = json::array();
            for (const auto& bump : p.bumps()) b.push_back({bump.amplitude, bump.center, bump.width});
            j["bumps"] = b;
            break;
        }
        case ProfileKind::piecewise_linear: {
            json n = json::array();
            for (const auto& node : p.nodes()) n.push_back({node.x1, node.x2});
            j["nodes"] = n;
            break;
        }
        case ProfileKind::multiscale: {
            const auto& m = p.multiscale_params();
            j["amplitude"] = m.amplitude;
            j["half_width"] = m.half_width;
            j["base"] = m.base;
            j["ripple"] = m.ripple;
            j["ripple_frequency"] = m.ripple_frequency;
            j["frequency"] = m.frequency;
            break;
        }
        case ProfileKind::tabulated:
            j["x"] = p.table_x();
            j["h"] = p.table_h();
            j["order"] = p.table_order();
            break;
    }
    return j;
}

std::string config_hash(const json& j) {
    const std::string text = j.dump();  // nlohmann orders object keys
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace lrsi
