#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "c2f/scenario.hpp"

namespace test_helpers {

inline c2f::ScenarioConfig tiny_scenario(int num_users = 6, int num_aps = 10, int num_subnetworks = 2,
                                         int intervals = 5) {
    c2f::ScenarioConfig cfg;
    cfg.num_users = num_users;
    cfg.num_aps = num_aps;
    cfg.num_subnetworks = num_subnetworks;
    cfg.intervals = intervals;
    cfg.v_max = 5.0;
    return cfg;
}

inline c2f::NetworkState random_state(const c2f::ScenarioConfig& cfg, std::uint64_t seed) {
    c2f::Rng rng(seed);
    return c2f::init_snapshot(cfg, rng);
}

// Scratch directory under the system temp root, wiped on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        dir_ = std::filesystem::temp_directory_path() /
               ("c2f_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }
    std::string str() const { return dir_.string(); }

private:
    std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

}  // namespace test_helpers
