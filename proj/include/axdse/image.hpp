#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "axdse/common.hpp"

namespace axdse {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row major

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0) : width(w), height(h), pixels(std::size_t(w) * h, fill) {}

  std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }

  // Edge-replicating access for window gathers.
  std::uint8_t at_clamped(int x, int y) const {
    x = std::min(std::max(x, 0), width - 1);
    y = std::min(std::max(y, 0), height - 1);
    return at(x, y);
  }

  bool operator==(const Image& o) const {
    return width == o.width && height == o.height && pixels == o.pixels;
  }
};

// ------------------------------- PGM (P5) ----------------------------------

inline void save_pgm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UserError("cannot write image: " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

inline Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open image: " + path.string());
  auto next_token = [&]() -> std::string {
    std::string tok;
    for (;;) {
      int c = in.get();
      if (c == EOF) throw UserError("truncated PGM header: " + path.string());
      if (c == '#') {
        while (c != EOF && c != '\n') c = in.get();
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) return tok;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
  };
  if (next_token() != "P5") throw UserError("not a binary PGM (P5): " + path.string());
  Image img;
  img.width = std::stoi(next_token());
  img.height = std::stoi(next_token());
  int maxval = std::stoi(next_token());
  if (img.width <= 0 || img.height <= 0 || maxval != 255)
    throw UserError("unsupported PGM geometry in " + path.string());
  img.pixels.resize(std::size_t(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw UserError("truncated PGM payload: " + path.string());
  return img;
}

// --------------------------- synthetic benchmark set -----------------------

// Deterministic stand-ins for a natural-image benchmark set: gradients,
// checkerboards, Gaussian noise and smooth blobs, cycled with varied
// parameters.
inline Image make_synthetic_image(int kind, int width, int height, std::uint64_t seed) {
  Image img(width, height);
  std::mt19937_64 rng(derive_seed(seed, kind));
  switch (kind % 6) {
    case 0: {  // horizontal gradient
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) img.at(x, y) = std::uint8_t(x * 255 / std::max(1, width - 1));
      break;
    }
    case 1: {  // diagonal gradient
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          img.at(x, y) = std::uint8_t((x + y) * 255 / std::max(1, width + height - 2));
      break;
    }
    case 2: {  // checkerboard
      int cell = 2 + int(rng() % 7);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
          img.at(x, y) = ((x / cell + y / cell) & 1) ? 220 : 35;
      break;
    }
    case 3: {  // Gaussian noise around mid gray
      std::normal_distribution<double> noise(128.0, 40.0);
      for (auto& p : img.pixels)
        p = std::uint8_t(std::clamp(noise(rng), 0.0, 255.0));
      break;
    }
    case 4: {  // smooth blobs
      double cx = double(rng() % width), cy = double(rng() % height);
      double s = 0.15 * std::max(width, height) + double(rng() % 8);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          double d = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * s * s);
          img.at(x, y) = std::uint8_t(std::clamp(40 + 215 * std::exp(-d), 0.0, 255.0));
        }
      break;
    }
    default: {  // vertical bars with noise
      int period = 4 + int(rng() % 9);
      std::uniform_int_distribution<int> jitter(-25, 25);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          int base = (x % period) * 255 / (period - 1);
          img.at(x, y) = std::uint8_t(std::clamp(base + jitter(rng), 0, 255));
        }
      break;
    }
  }
  return img;
}

inline std::vector<Image> make_synthetic_set(int count, int width, int height,
                                             std::uint64_t seed) {
  std::vector<Image> set;
  set.reserve(count);
  for (int i = 0; i < count; ++i) set.push_back(make_synthetic_image(i, width, height, seed + i));
  return set;
}

inline std::vector<Image> load_image_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".pgm") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UserError("no .pgm images in " + dir.string());
  std::vector<Image> images;
  images.reserve(files.size());
  for (const auto& f : files) images.push_back(load_pgm(f));
  return images;
}

}  // namespace axdse
