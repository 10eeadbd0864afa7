#include "permuquant/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "permuquant/tensor_io.hpp"

namespace permuquant {

using json = nlohmann::ordered_json;

namespace {

std::string require_string(const json& j, const char* key, const std::filesystem::path& where) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw IoError("manifest: layer entry missing string field '" + std::string(key) +
                      "' in " + where.string());
    }
    return j[key].get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& rel) {
    std::filesystem::path p(rel);
    return p.is_relative() ? base / p : p;
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("manifest: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();

    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& ex) {
        throw IoError("manifest: parse error in " + path.string() + ": " + ex.what());
    }
    if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array()) {
        throw IoError("manifest: expected an object with a 'layers' array in " + path.string());
    }
    if (j["layers"].empty()) {
        throw IoError("manifest: empty layer list in " + path.string());
    }

    const std::filesystem::path base = path.parent_path();
    Manifest m;
    std::set<std::string> seen;
    for (const json& entry : j["layers"]) {
        if (!entry.is_object()) {
            throw IoError("manifest: layer entries must be objects in " + path.string());
        }
        ManifestEntry e;
        e.name = require_string(entry, "name", path);
        if (!seen.insert(e.name).second) {
            throw IoError("manifest: duplicate layer name '" + e.name + "' in " + path.string());
        }
        e.weight_path = resolve(base, require_string(entry, "weight_path", path));
        e.acts_path = resolve(base, require_string(entry, "acts_path", path));
        const std::string pred = require_string(entry, "predecessor", path);
        try {
            e.predecessor = predecessor_from_name(pred);
        } catch (const std::invalid_argument&) {
            throw IoError("manifest: unknown predecessor '" + pred + "' in " + path.string());
        }
        for (const std::filesystem::path* p : {&e.weight_path, &e.acts_path}) {
            if (!std::filesystem::exists(*p)) {
                throw IoError("manifest: referenced file does not exist: " + p->string());
            }
        }
        m.layers.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    json layers = json::array();
    for (const ManifestEntry& e : manifest.layers) {
        json entry;
        entry["name"] = e.name;
        entry["weight_path"] = e.weight_path.generic_string();
        entry["acts_path"] = e.acts_path.generic_string();
        entry["predecessor"] = predecessor_name(e.predecessor);
        layers.push_back(std::move(entry));
    }
    json j;
    j["layers"] = std::move(layers);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("manifest: cannot create " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("manifest: write failed on " + path.string());
}

}  // namespace permuquant
