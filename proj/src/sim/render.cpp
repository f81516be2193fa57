#include "surrogate/sim/render.hpp"

#include <fstream>

#include "surrogate/sim/world.hpp"

namespace surrogate {

CameraModel rescaled(const CameraModel& camera, int width, int height) {
  CameraModel c = camera;
  const double sx = double(width) / camera.width, sy = double(height) / camera.height;
  c.width = width;
  c.height = height;
  c.fx *= sx;
  c.cx *= sx;
  c.fy *= sy;
  c.cy *= sy;
  return c;
}

Image render_view(const std::vector<WorldObject>& objects, const CameraModel& camera, const Pose& camera_pose) {
  Image img{camera.width, camera.height, std::vector<std::uint8_t>(3u * camera.width * camera.height)};
  const Eigen::Vector3d light = Eigen::Vector3d(0.3, 0.2, 1.0).normalized();
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const Ray ray = pixel_ray(camera, camera_pose, {u + 0.5, v + 0.5});
      double best_t = std::numeric_limits<double>::infinity();
      Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
      Color color{200, 215, 235};  // background
      for (const WorldObject& o : objects) {
        if (auto h = o.raycast(ray); h && h->t < best_t) best_t = h->t, normal = h->normal, color = o.color;
      }
      if (ray.direction.z() < -1e-12) {
        const double t = -ray.origin.z() / ray.direction.z();
        if (t > 0 && t < best_t) {
          best_t = t;
          normal = Eigen::Vector3d::UnitZ();
          const Eigen::Vector3d p = ray.at(t);
          const bool dark = (static_cast<long>(std::floor(p.x() * 2)) + static_cast<long>(std::floor(p.y() * 2))) & 1;
          color = kFloorColor;
          if (dark)
            for (auto& c : color) c = static_cast<std::uint8_t>(c * 0.85);
        }
      }
      const double shade = std::isfinite(best_t) ? 0.35 + 0.65 * std::max(0.0, normal.dot(light)) : 1.0;
      std::uint8_t* px = &img.rgb[3u * (v * camera.width + u)];
      for (int k = 0; k < 3; ++k) px[k] = static_cast<std::uint8_t>(std::min(255.0, color[k] * shade));
    }
  }
  return img;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
}

}  // namespace surrogate
