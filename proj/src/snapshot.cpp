#include "stsne/snapshot.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stsne/errors.hpp"

namespace stsne {

using ordered_json = nlohmann::ordered_json;

void write_snapshot(std::ostream& out, const ProjectionSnapshot& snap) {
    ordered_json j;
    j["t"] = snap.t;
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(snap.config_hash));
        j["config_hash"] = buf;
    }
    j["hulls"] = ordered_json::array();
    for (const auto& loop : snap.hulls) {
        ordered_json jloop = ordered_json::array();
        for (const auto& v : loop) jloop.push_back({v.x, v.y});
        j["hulls"].push_back(std::move(jloop));
    }
    j["anchors"] = ordered_json::array();
    for (const auto& a : snap.anchors)
        j["anchors"].push_back({{"id", a.source_id}, {"x", a.pos.x}, {"y", a.pos.y}});
    j["cuts"] = ordered_json::array();
    for (const auto& c : snap.cuts)
        j["cuts"].push_back({{"polygon", c.polygon_id}, {"section", c.section_id}, {"t", c.t}});
    out << j.dump(2) << '\n';
}

ProjectionSnapshot read_snapshot(std::istream& in) {
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("snapshot parse error: ") + e.what());
    }
    ProjectionSnapshot snap;
    try {
        snap.t = j.at("t").get<std::int64_t>();
        snap.config_hash =
            std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
        for (const auto& jloop : j.at("hulls")) {
            std::vector<Vec2> loop;
            for (const auto& jv : jloop)
                loop.push_back({jv.at(0).get<double>(), jv.at(1).get<double>()});
            snap.hulls.push_back(std::move(loop));
        }
        for (const auto& ja : j.at("anchors"))
            snap.anchors.push_back({ja.at("id").get<std::uint64_t>(),
                                    {ja.at("x").get<double>(), ja.at("y").get<double>()}});
        for (const auto& jc : j.at("cuts"))
            snap.cuts.push_back({jc.at("polygon").get<std::uint64_t>(),
                                 jc.at("section").get<std::size_t>(),
                                 jc.at("t").get<std::int64_t>()});
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("snapshot field error: ") + e.what());
    }
    return snap;
}

void write_snapshot_file(const std::string& path, const ProjectionSnapshot& snap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write snapshot file " + path);
    write_snapshot(out, snap);
}

ProjectionSnapshot read_snapshot_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read snapshot file " + path);
    return read_snapshot(in);
}

bool snapshot_equal(const ProjectionSnapshot& a, const ProjectionSnapshot& b) {
    if (a.t != b.t || a.config_hash != b.config_hash) return false;
    if (a.hulls != b.hulls || a.cuts != b.cuts) return false;
    if (a.anchors.size() != b.anchors.size()) return false;
    for (std::size_t i = 0; i < a.anchors.size(); ++i) {
        if (a.anchors[i].source_id != b.anchors[i].source_id) return false;
        if (!(a.anchors[i].pos == b.anchors[i].pos)) return false;
    }
    return true;
}

}  // namespace stsne
