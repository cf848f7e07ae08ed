#include "raysel/geometry.hpp"

#include <cmath>
#include <string>

#include "raysel/errors.hpp"
#include "raysel/parallel.hpp"

namespace raysel {

namespace {

void validate_pose(const Mat4& pose) {
  const Mat3 r = pose.block<3, 3>(0, 0);
  const double ortho_err = (r * r.transpose() - Mat3::Identity())
                               .cwiseAbs()
                               .maxCoeff();
  if (ortho_err >= 1e-6)
    throw InputError("camera rotation is not orthonormal (error " +
                     std::to_string(ortho_err) + ")");
  if (r.determinant() < 0.0)
    throw InputError("camera rotation has negative determinant");
  if (!pose.allFinite()) throw InputError("camera pose has non-finite entries");
  if (pose(3, 0) != 0.0 || pose(3, 1) != 0.0 || pose(3, 2) != 0.0 ||
      pose(3, 3) != 1.0)
    throw InputError("camera pose bottom row must be [0 0 0 1]");
}

}  // namespace

Camera Camera::make(const Mat4& cam_to_world, double focal, int width,
                    int height) {
  return make(cam_to_world, focal, width, height,
              Eigen::Vector2d(width * 0.5, height * 0.5));
}

Camera Camera::make(const Mat4& cam_to_world, double focal, int width,
                    int height, const Eigen::Vector2d& principal) {
  validate_pose(cam_to_world);
  if (!(focal > 0.0)) throw InputError("focal length must be positive");
  if (width < 1 || height < 1) throw InputError("image size must be >= 1");
  Camera cam;
  cam.cam_to_world = cam_to_world;
  cam.focal = focal;
  cam.width = width;
  cam.height = height;
  cam.principal = principal;
  return cam;
}

Ray camera_ray(const Camera& cam, double u, double v, double t_near,
               double t_far) {
  if (!(u >= 0.0 && u < cam.width && v >= 0.0 && v < cam.height))
    throw InputError("pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                     ") outside image bounds");
  if (!(t_near >= 0.0 && t_near < t_far))
    throw InputError("require 0 <= t_near < t_far");
  // Local direction through the pixel center; v grows downwards in the
  // image while camera y points up, hence the sign flip.
  const Vec3 local((u + 0.5 - cam.principal.x()) / cam.focal,
                   -(v + 0.5 - cam.principal.y()) / cam.focal, -1.0);
  Ray ray;
  ray.origin = cam.center();
  ray.dir = (cam.rotation() * local).normalized();
  ray.t_near = t_near;
  ray.t_far = t_far;
  return ray;
}

std::optional<Projection> project_point(const Camera& cam, const Vec3& point) {
  const Vec3 local = cam.rotation().transpose() * (point - cam.center());
  const double depth = -local.z();
  if (!(depth > 0.0)) return std::nullopt;
  Projection p;
  p.u = cam.principal.x() + cam.focal * local.x() / depth;
  p.v = cam.principal.y() - cam.focal * local.y() / depth;
  p.depth = depth;
  return p;
}

ProxyGrid make_grid(const Vec3& p_min, const Vec3& p_max, int resolution) {
  if (resolution < 2) throw InputError("grid resolution must be >= 2");
  if (!(p_min.x() < p_max.x() && p_min.y() < p_max.y() && p_min.z() < p_max.z()))
    throw InputError("grid bounds must satisfy p_min < p_max componentwise");
  ProxyGrid grid;
  grid.p_min = p_min;
  grid.p_max = p_max;
  grid.resolution = resolution;
  grid.points.reserve(static_cast<std::size_t>(resolution) * resolution *
                      resolution);
  const Vec3 step = (p_max - p_min) / (resolution - 1);
  for (int ix = 0; ix < resolution; ++ix)
    for (int iy = 0; iy < resolution; ++iy)
      for (int iz = 0; iz < resolution; ++iz)
        grid.points.emplace_back(p_min.x() + ix * step.x(),
                                 p_min.y() + iy * step.y(),
                                 p_min.z() + iz * step.z());
  return grid;
}

bool is_visible(const Camera& cam, const Vec3& point,
                const DepthBounds& bounds) {
  const auto proj = project_point(cam, point);
  if (!proj) return false;
  if (!(proj->depth >= bounds.t_near && proj->depth < bounds.t_far))
    return false;
  return proj->u >= 0.0 && proj->u < cam.width && proj->v >= 0.0 &&
         proj->v < cam.height;
}

VisibilityMatrix visibility_matrix(const std::vector<Camera>& cams,
                                   const ProxyGrid& grid,
                                   const DepthBounds& bounds, int threads) {
  if (cams.empty()) throw InputError("visibility matrix needs >= 1 camera");
  if (grid.points.empty()) throw InputError("visibility matrix needs >= 1 point");
  VisibilityMatrix vis;
  vis.num_cameras = static_cast<int>(cams.size());
  vis.num_points = static_cast<int>(grid.points.size());
  vis.a.assign(static_cast<std::size_t>(vis.num_cameras) * vis.num_points, 0);
  parallel_for(0, vis.num_cameras, threads, [&](int i) {
    std::uint8_t* row = vis.a.data() + static_cast<std::size_t>(i) * vis.num_points;
    for (int j = 0; j < vis.num_points; ++j)
      row[j] = is_visible(cams[i], grid.points[j], bounds) ? 1 : 0;
  });
  return vis;
}

}  // namespace raysel
