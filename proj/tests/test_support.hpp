#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "storyframes/image.hpp"
#include "storyframes/mask.hpp"

namespace testsupport {

// Unique empty directory under the system temp root; never reused within
// a process, so parallel test cases cannot collide.
inline std::filesystem::path fresh_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("storyframes_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline storyframes::RasterImage random_image(std::mt19937_64& gen, int w, int h) {
    storyframes::RasterImage img(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            uint8_t* p = img.pixel(r, c);
            uint64_t v = gen();
            p[0] = static_cast<uint8_t>(v & 0xff);
            p[1] = static_cast<uint8_t>((v >> 8) & 0xff);
            p[2] = static_cast<uint8_t>((v >> 16) & 0xff);
            p[3] = 255;
        }
    }
    return img;
}

inline storyframes::Mask random_mask(std::mt19937_64& gen, int w, int h) {
    storyframes::Mask m(w, h, false);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            m.set(r, c, (gen() & 1) != 0);
        }
    }
    return m;
}

}  // namespace testsupport
