#pragma once

#include <fstream>
#include <string>

#include "starisac/geometry.hpp"
#include "starisac/rng.hpp"
#include "starisac/types.hpp"

namespace starisac {

// One Monte-Carlo draw of the Rician channels with the LoS/NLoS split kept
// around: composite = sqrt(1/varsigma) * ( sqrt(mu/(1+mu)) LoS + sqrt(1/(1+mu)) NLoS ).
struct ChannelSet {
  MatC h1;          // N x M, BS -> STAR-RIS
  MatC h2_in;       // K_T x N, STAR-RIS -> indoor users
  MatC h2_out;      // K_R x N, STAR-RIS -> outdoor users
  MatC h1_los, h1_nlos;
  MatC h2_in_los, h2_in_nlos;
  MatC h2_out_los, h2_out_nlos;
  double varsigma1 = 1.0;  // BS link path loss
  VecR p_in;               // per-indoor-user path losses
  VecR p_out;              // per-outdoor-user path losses
  int users_indoor = 0;

  int users_total() const { return static_cast<int>(h2_in.rows() + h2_out.rows()); }
  bool is_outdoor(int k) const { return k >= users_indoor; }

  // h_{2,k}: the k-th row of [H2_in; H2_out] as a column vector (conjugated).
  VecC h2(int k) const {
    if (k < users_indoor) return h2_in.row(k).adjoint();
    return h2_out.row(k - users_indoor).adjoint();
  }

  // Rician mixing weights for the k-th user link, used by the expectation
  // estimators: h = c_los * a_STAR + c_nlos * h_nlos.
  void out_mixing(int k, double rice, double& c_los, double& c_nlos) const {
    double vs = k < users_indoor ? p_in(k) : p_out(k - users_indoor);
    c_los = std::sqrt(1.0 / vs) * std::sqrt(rice / (1.0 + rice));
    c_nlos = std::sqrt(1.0 / vs) * std::sqrt(1.0 / (1.0 + rice));
  }

  VecC h2_nlos_row(int k) const {
    if (k < users_indoor) return h2_in_nlos.row(k).adjoint();
    return h2_out_nlos.row(k - users_indoor).adjoint();
  }
};

namespace detail_channel {

inline MatC draw_nlos(int rows, int cols, std::uint64_t seed, std::uint64_t link) {
  CounterRng rng(seed, link);
  MatC m(rows, cols);
  std::uint64_t ctr = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.cnormal(ctr++);
  return m;
}

inline MatC mix(const MatC& los, const MatC& nlos, double rice) {
  return std::sqrt(rice / (1.0 + rice)) * los + std::sqrt(1.0 / (1.0 + rice)) * nlos;
}

}  // namespace detail_channel

inline ChannelSet sample_channels(const SystemConfig& cfg, const Geometry& geom, std::uint64_t seed) {
  cfg.validate();
  geom.validate();
  const int m = cfg.bs_antennas;
  const int n = cfg.star_elements();
  const int kt = cfg.users_indoor;
  const int kr = cfg.users_outdoor;
  if (static_cast<int>(geom.users.size()) != kt + kr)
    throw std::invalid_argument("sample_channels: geometry/user count mismatch");

  ChannelSet cs;
  cs.users_indoor = kt;
  cs.varsigma1 = path_loss(geom.bs_distance, cfg.pl_exp_bs_star, cfg.pathloss_ref_db, cfg.pathloss_ref_dist);
  cs.p_in.resize(kt);
  cs.p_out.resize(kr);
  for (int k = 0; k < kt; ++k)
    cs.p_in(k) = path_loss(geom.users[k].range, cfg.pl_exp_star_in, cfg.pathloss_ref_db, cfg.pathloss_ref_dist);
  for (int k = 0; k < kr; ++k)
    cs.p_out(k) =
        path_loss(geom.users[kt + k].range, cfg.pl_exp_star_out, cfg.pathloss_ref_db, cfg.pathloss_ref_dist);

  cs.h1_los = steering_star(geom.bs_elev, geom.bs_azim, cfg.star_nx, cfg.star_nz) *
              steering_bs(geom.bs_elev, geom.bs_azim, m).adjoint();
  cs.h2_in_los.resize(kt, n);
  for (int k = 0; k < kt; ++k)
    cs.h2_in_los.row(k) = steering_star(geom.users[k].elev, geom.users[k].azim, cfg.star_nx, cfg.star_nz).adjoint();
  cs.h2_out_los.resize(kr, n);
  for (int k = 0; k < kr; ++k)
    cs.h2_out_los.row(k) =
        steering_star(geom.users[kt + k].elev, geom.users[kt + k].azim, cfg.star_nx, cfg.star_nz).adjoint();

  cs.h1_nlos = detail_channel::draw_nlos(n, m, seed, stream::kH1Nlos);
  cs.h2_in_nlos = detail_channel::draw_nlos(kt, n, seed, stream::kH2InNlos);
  cs.h2_out_nlos = detail_channel::draw_nlos(kr, n, seed, stream::kH2OutNlos);

  cs.h1 = std::sqrt(1.0 / cs.varsigma1) * detail_channel::mix(cs.h1_los, cs.h1_nlos, cfg.rice_h1);
  cs.h2_in = cs.p_in.cwiseInverse().cwiseSqrt().asDiagonal() *
             detail_channel::mix(cs.h2_in_los, cs.h2_in_nlos, cfg.rice_h2_in);
  cs.h2_out = cs.p_out.cwiseInverse().cwiseSqrt().asDiagonal() *
              detail_channel::mix(cs.h2_out_los, cs.h2_out_nlos, cfg.rice_h2_out);
  return cs;
}

}  // namespace starisac
