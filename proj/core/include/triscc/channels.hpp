// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "triscc/scenario.hpp"
#include "triscc/types.hpp"

namespace triscc {

/// Deterministic, splittable random stream. Substreams are derived by name so
/// each (draw, channel-kind) pair is independently reproducible. Gaussian
/// variates use an explicit Box-Muller transform so results do not depend on
/// the standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  /// Independent substream; `label` values must differ between substreams.
  Rng split(std::uint64_t label) const;

  std::uint64_t next_u64();
  double uniform();         ///< [0, 1)
  double normal();          ///< N(0, 1)
  cxd normal_complex();     ///< CN(0, 1): variance 1/2 per component

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum Slot : int { kSlotI = 0, kSlotII = 1 };

/// Realized radar rows z_{k,m,i}, communication matrices H_k, reflection
/// coefficients and receive gains for one Monte-Carlo draw.
struct ChannelSet {
  int K = 0, M = 0, N_t = 0, N = 0;
  std::vector<VecC> z;      // row vectors, length N_t; index via z_at(k,m,i)
  std::vector<MatC> H;      // K matrices, N x N_t
  std::vector<cxd> alpha;   // reflection coefficients, same indexing as z
  MatC b;                   // K x M receive gains, |b| = 1

  const VecC& z_at(int k, int m, int i) const { return z[(k * M + m) * K + i]; }
  VecC& z_at(int k, int m, int i) { return z[(k * M + m) * K + i]; }
  cxd alpha_at(int k, int m, int i) const { return alpha[(k * M + m) * K + i]; }
};

/// UPA steering vector per the half-wavelength Kronecker form:
/// rows (outer) progress with sin(theta)cos(phi), columns (inner) with
/// sin(theta)sin(phi).
VecC upa_steering(double theta, double varphi, int N_r, int N_c);

/// ULA steering [1, e^{-j pi sin(theta)}, ...], length N.
VecC ula_steering(double theta, int N);

/// Radar echo rows z_{k,m,i} = alpha_{k,m,i} b_{i,m} a^H(theta_{k,m}, phi_{k,m});
/// alpha drawn CN(0, S_rcs lambda^2 / ((4 pi)^3 d_{k,m}^2 d_{i,m}^2)).
void radar_channel(const Geometry& geom, const ScenarioConfig& cfg, Rng& rng,
                   ChannelSet& out);

/// Rician mix of the rank-1 LoS outer product and i.i.d. NLoS, scaled by
/// lambda/(4 pi d_k).
void comm_channel(const Geometry& geom, const ScenarioConfig& cfg, Rng& rng,
                  ChannelSet& out);

/// Full channel draw for one Monte-Carlo index (separate substreams per kind).
ChannelSet draw_channels(const Geometry& geom, const ScenarioConfig& cfg,
                         std::uint64_t draw_index);

/// Text dump of a channel set (documented layout: header, then one line per
/// complex entry) for regression comparisons.
void dump_channels(const ChannelSet& ch, std::ostream& os);

}  // namespace triscc
