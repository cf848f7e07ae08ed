#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace raysel {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Calibrated pinhole camera, camera-to-world, looking along local -z, y up
// (the Blender convention used by the scene files).
struct Camera {
  Mat4 cam_to_world = Mat4::Identity();
  double focal = 1.0;  // pixels
  int width = 1;
  int height = 1;
  Eigen::Vector2d principal{0.5, 0.5};  // pixels, defaults to image center

  // Validates the rotation block (orthonormal, det +1, tolerance 1e-6),
  // focal > 0 and positive image size; principal point defaults to center.
  static Camera make(const Mat4& cam_to_world, double focal, int width,
                     int height);
  static Camera make(const Mat4& cam_to_world, double focal, int width,
                     int height, const Eigen::Vector2d& principal);

  Mat3 rotation() const { return cam_to_world.block<3, 3>(0, 0); }
  Vec3 center() const { return cam_to_world.block<3, 1>(0, 3); }
  // World-space optical axis (the camera looks along -z locally).
  Vec3 forward() const { return -cam_to_world.block<3, 1>(0, 2); }
};

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
  double t_near = 0.0;
  double t_far = 1.0;

  Vec3 point_at(double t) const { return origin + t * dir; }
};

// Uniform lattice standing in for the unknown scene geometry during
// coverage optimization. Points are ordered lexicographically by (x, y, z)
// and include both bound corners.
struct ProxyGrid {
  Vec3 p_min;
  Vec3 p_max;
  int resolution = 0;  // per axis; total points = resolution^3
  std::vector<Vec3> points;
};

// Binary camera x grid-point incidence. Row i is camera i, column j is the
// visibility vector of point j.
struct VisibilityMatrix {
  int num_cameras = 0;
  int num_points = 0;
  std::vector<std::uint8_t> a;  // row-major num_cameras x num_points

  bool at(int cam, int point) const {
    return a[static_cast<std::size_t>(cam) * num_points + point] != 0;
  }
};

// Depth interval used for frustum visibility; mirrors the rendering bounds.
struct DepthBounds {
  double t_near = 2.0;
  double t_far = 6.0;
};

// Continuous image-plane coordinates of a projected point plus its
// camera-frame depth. (u, v) live in [0, width) x [0, height) when the
// point is inside the image; pixel (i, j) covers [i, i+1) x [j, j+1).
struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// World ray through the center of pixel (u, v), i.e. image-plane point
// (u + 0.5, v + 0.5). Requires 0 <= u < width, 0 <= v < height.
Ray camera_ray(const Camera& cam, double u, double v, double t_near,
               double t_far);

// Projects a world point; nullopt when the point is not strictly in front
// of the camera.
std::optional<Projection> project_point(const Camera& cam, const Vec3& point);

ProxyGrid make_grid(const Vec3& p_min, const Vec3& p_max, int resolution);

// Frustum visibility: depth in [t_near, t_far), projection inside the
// half-open image rectangle. No occlusion test.
bool is_visible(const Camera& cam, const Vec3& point, const DepthBounds& bounds);

VisibilityMatrix visibility_matrix(const std::vector<Camera>& cams,
                                   const ProxyGrid& grid,
                                   const DepthBounds& bounds, int threads = 1);

}  // namespace raysel
