#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "permuquant/reorder.hpp"

namespace permuquant {

struct ManifestEntry {
    std::string name;
    std::filesystem::path weight_path;
    std::filesystem::path acts_path;
    Predecessor predecessor = Predecessor::linear;
};

// Layer list for calibration. Names are unique and the referenced tensor
// files exist; load_manifest enforces both and resolves relative paths
// against the manifest's directory.
struct Manifest {
    std::vector<ManifestEntry> layers;
};

Manifest load_manifest(const std::filesystem::path& path);  // throws IoError

// Writes entries verbatim; paths are emitted with forward slashes.
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace permuquant
