#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "surrogate/sim/scene.hpp"

namespace surrogate {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

/// Ray-cast render of the floor and objects through a pinhole camera
/// (camera link pose, x forward). Lambert shading with a fixed sky light.
Image render_view(const std::vector<WorldObject>& objects, const CameraModel& camera, const Pose& camera_pose);

/// Same intrinsics scaled to another resolution (keeps the field of view).
CameraModel rescaled(const CameraModel& camera, int width, int height);

void write_ppm(const Image& image, const std::filesystem::path& path);

}  // namespace surrogate
