// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "triscc/scenario.hpp"
#include "triscc/types.hpp"

namespace triscc {

/// Reference sensing unit (the median pair) and the per-pair beamwidths that
/// make every footprint an equal circle.
struct BeamwidthPlan {
  MatR delta_theta;  // K x M, rad
  MatR delta_phi;    // K x M, rad
  double R0 = 0.0, theta0 = 0.0, phi0 = 0.0;
  double delta_theta0 = 0.0, delta_phi0 = 0.0;
};

/// Angle grids, desired-response matrices, and the steering matrix used by
/// the slot-II registration constraint.
struct RegistrationSpec {
  int L = 0;
  VecR theta_grid, phi_grid;       // L each
  MatC A;                          // N_t x L, columns a(theta_l, phi_l)
  std::vector<MatR> Rad;           // K matrices, L x L
  BeamwidthPlan widths;
  double gamma_th = 0.0;           // resolved bound (auto-calibrated when cfg says so)
  double best_fit_residual = 0.0;  // sum over devices of the rank-free fit
  std::vector<MatC> fit_W;         // per-device best-fit covariances (init point)
};

/// Footprint ellipse semi-axes of a beam of widths (dth, dph) hitting the
/// ground plane at distance R and incidence pitch theta.
std::pair<double, double> footprint_axes(double R, double theta, double dth, double dph);

/// Equal-circle beamwidth adjustment: reference = median over pairs of the
/// device-target distance; azimuth widths from the equal-footprint rule,
/// pitch widths from circularization.
BeamwidthPlan adjust_beamwidths(const Geometry& geom, double ref_azimuth_width);

/// Desired directional amplitude response on the (theta, phi) tensor grid:
/// sum of squashed-exponential lobes with -3 dB half-power width.
MatR desired_response(const VecR& theta_grid, const VecR& phi_grid,
                      const std::vector<std::pair<double, double>>& lobes,
                      double width_theta, double width_phi);

/// sum_k || A^H W̄_k^II A - Rad_k ||_F^2.
double registration_error(const RegistrationSpec& reg, const std::vector<MatC>& W_total_II);

/// Build grids, steering matrix, masks and the resolved gamma_th for a
/// scenario (lobes: all targets plus the AP direction per device; mask widths
/// are the per-device medians of the adjusted widths). Deterministic.
RegistrationSpec build_registration(const ScenarioConfig& cfg, const Geometry& geom);

}  // namespace triscc
