#pragma once
// Reference configuration shared by the tests.

#include "asymptolab/config.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace fixture {

inline std::string reference_path() { return std::string(ASYMPTOLAB_SOURCE_DIR) + "/configs/reference.json"; }

inline const asymptolab::ExperimentConfig& reference() {
    static const auto c = asymptolab::load_config(reference_path());
    return c;
}

inline asymptolab::json reference_json() {
    std::ifstream in(reference_path());
    return asymptolab::json::parse(in, nullptr, true, true);
}

// fresh directory under the system temp dir
inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    auto p = std::filesystem::temp_directory_path() / ("asymptolab_" + tag + "_" + std::to_string(rng() % 1000000007));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace fixture
