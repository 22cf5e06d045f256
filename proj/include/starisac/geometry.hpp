#pragma once

#include <cmath>
#include <vector>

#include "starisac/config.hpp"
#include "starisac/rng.hpp"
#include "starisac/types.hpp"

namespace starisac {

// ULA response, phase progression -pi*m*cos(elev)*cos(azim).
inline VecC steering_bs(double elev, double azim, int m) {
  if (m < 1) throw std::invalid_argument("steering_bs: M must be >= 1");
  VecC a(m);
  double step = -kPi * std::cos(elev) * std::cos(azim);
  for (int i = 0; i < m; ++i) a(i) = std::polar(1.0, step * i);
  return a;
}

// UPA response as the Kronecker product of the x-axis vector
// (phase -pi*n*sin(elev)*cos(azim)) and the z-axis vector (phase -pi*n*sin(azim)),
// half-wavelength spacing, elements indexed row by row.
inline VecC steering_star(double elev, double azim, int nx, int nz) {
  if (nx < 1 || nz < 1) throw std::invalid_argument("steering_star: dims must be >= 1");
  VecC a(nx * nz);
  double step_x = -kPi * std::sin(elev) * std::cos(azim);
  double step_z = -kPi * std::sin(azim);
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz) a(ix * nz + iz) = std::polar(1.0, step_x * ix + step_z * iz);
  return a;
}

// Sensor ULA mounted on the STAR-RIS; same phase law as the BS array.
inline VecC steering_sensor(double elev, double azim, int ns) {
  if (ns < 1) throw std::invalid_argument("steering_sensor: N_s must be >= 1");
  return steering_bs(elev, azim, ns);
}

// varsigma(d) = varsigma_0 * (d/d0)^(-kappa), varsigma_0 given in dB.
inline double path_loss(double d, double kappa, double ref_db, double d0) {
  if (d <= 0.0) throw std::invalid_argument("path_loss: distance must be positive");
  if (d0 <= 0.0) throw std::invalid_argument("path_loss: reference distance must be positive");
  return db_to_lin(ref_db) * std::pow(d / d0, -kappa);
}

struct UserPlacement {
  double range = 0.0;  // r_k [m]
  double elev = 0.0;   // phi_k [rad], in [0, pi]
  double azim = 0.0;   // varphi_k [rad], in [-pi/2, pi/2]
};

struct Geometry {
  Eigen::Vector3d bs_position{0, 0, 0};
  Eigen::Vector3d star_position{0, 0, 0};
  std::vector<UserPlacement> users;  // indoor first, then outdoor
  double bs_elev = 0.0;              // phi_BS
  double bs_azim = 0.0;              // varphi_BS
  double bs_distance = 0.0;

  void validate() const {
    for (const auto& u : users) {
      if (u.range <= 0.0) throw std::invalid_argument("geometry: user range must be positive");
      if (u.elev < 0.0 || u.elev > kPi || u.azim < -kPi / 2 || u.azim > kPi / 2)
        throw std::invalid_argument("geometry: user angles outside sampling ranges");
    }
  }
};

// Angles of a point seen from the STAR-RIS under the UPA convention
// u_x = sin(elev)cos(azim), u_z = sin(azim).
inline void angles_from_position(const Eigen::Vector3d& p, const Eigen::Vector3d& origin,
                                 double& elev, double& azim) {
  Eigen::Vector3d d = p - origin;
  double r = d.norm();
  if (r <= 0.0) throw std::invalid_argument("angles_from_position: coincident points");
  azim = std::asin(std::clamp(d.z() / r, -1.0, 1.0));
  double ca = std::cos(azim);
  double sx = ca > 1e-12 ? std::clamp(d.x() / (r * ca), -1.0, 1.0) : 0.0;
  elev = std::asin(sx);
  if (d.y() < 0.0) elev = kPi - elev;  // rear half-space folds into [pi/2, pi]
  if (elev < 0.0) elev += kPi;
}

// Per-seed scenario draw: r ~ U[r_min, r_max], elev ~ U[0, 180deg],
// azim ~ U[-90deg, 90deg], independently per user.
inline Geometry sample_geometry(const SystemConfig& cfg, std::uint64_t seed) {
  Geometry g;
  g.bs_position = Eigen::Vector3d(cfg.bs_x, cfg.bs_y, cfg.bs_z);
  g.star_position = Eigen::Vector3d::Zero();
  g.bs_distance = (g.bs_position - g.star_position).norm();
  angles_from_position(g.bs_position, g.star_position, g.bs_elev, g.bs_azim);
  const int k = cfg.num_users();
  g.users.resize(k);
  for (int u = 0; u < k; ++u) {
    CounterRng rng(seed, CounterRng::substream(stream::kPlacement, u));
    g.users[u].range = cfg.user_r_min + (cfg.user_r_max - cfg.user_r_min) * rng.uniform(0);
    g.users[u].elev = kPi * rng.uniform(1);
    g.users[u].azim = kPi * (rng.uniform(2) - 0.5);
  }
  g.validate();
  return g;
}

}  // namespace starisac
