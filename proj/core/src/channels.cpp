// SPDX-License-Identifier: Apache-2.0
#include "triscc/channels.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace triscc {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

Rng Rng::split(std::uint64_t label) const {
  // Fold the substream label into a fresh seed; independent of draw order.
  std::uint64_t sm = s_[0] ^ rotl(s_[1], 17) ^ (label * 0xd6e8feb86659fd93ULL);
  Rng r(0);
  for (auto& s : r.s_) s = splitmix64(sm);
  return r;
}

std::uint64_t Rng::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

cxd Rng::normal_complex() {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  double re = normal(), im = normal();
  return {re * inv_sqrt2, im * inv_sqrt2};
}

VecC upa_steering(double theta, double varphi, int N_r, int N_c) {
  const double u = std::sin(theta) * std::cos(varphi);
  const double v = std::sin(theta) * std::sin(varphi);
  VecC row(N_r), col(N_c);
  for (int n = 0; n < N_r; ++n) row(n) = std::polar(1.0, -kPi * u * n);
  for (int n = 0; n < N_c; ++n) col(n) = std::polar(1.0, -kPi * v * n);
  VecC a(N_r * N_c);
  for (int r = 0; r < N_r; ++r)
    for (int c = 0; c < N_c; ++c) a(r * N_c + c) = row(r) * col(c);
  return a;
}

VecC ula_steering(double theta, int N) {
  VecC a(N);
  const double u = std::sin(theta);
  for (int n = 0; n < N; ++n) a(n) = std::polar(1.0, -kPi * u * n);
  return a;
}

void radar_channel(const Geometry& geom, const ScenarioConfig& cfg, Rng& rng,
                   ChannelSet& out) {
  const int K = cfg.K, M = cfg.M, N_t = cfg.N_t();
  const double lam = cfg.wavelength_m();
  out.K = K;
  out.M = M;
  out.N_t = N_t;
  out.N = cfg.N;
  out.z.assign(static_cast<std::size_t>(K) * M * K, VecC());
  out.alpha.assign(static_cast<std::size_t>(K) * M * K, cxd(0, 0));
  out.b.resize(K, M);
  for (int i = 0; i < K; ++i)
    for (int m = 0; m < M; ++m)
      out.b(i, m) = std::polar(1.0, -2.0 * kPi * geom.d_dev_tgt(i, m) / lam);
  const double four_pi_cubed = std::pow(4.0 * kPi, 3);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const VecC a = upa_steering(geom.pitch_dev_tgt(k, m), geom.azim_dev_tgt(k, m),
                                  cfg.N_r, cfg.N_c);
      for (int i = 0; i < K; ++i) {
        const double var = cfg.target_rcs_m2 * lam * lam /
                           (four_pi_cubed * geom.d_dev_tgt(k, m) * geom.d_dev_tgt(k, m) *
                            geom.d_dev_tgt(i, m) * geom.d_dev_tgt(i, m));
        const cxd alpha = std::sqrt(var) * rng.normal_complex();
        out.alpha[(static_cast<std::size_t>(k) * M + m) * K + i] = alpha;
        out.z_at(k, m, i) = alpha * out.b(i, m) * a.conjugate();
      }
    }
  }
}

void comm_channel(const Geometry& geom, const ScenarioConfig& cfg, Rng& rng,
                  ChannelSet& out) {
  const int K = cfg.K, N = cfg.N, N_t = cfg.N_t();
  const double lam = cfg.wavelength_m();
  out.H.assign(K, MatC());
  const double los_w = std::sqrt(cfg.rician_factor / (cfg.rician_factor + 1.0));
  const double nlos_w = std::sqrt(1.0 / (cfg.rician_factor + 1.0));
  for (int k = 0; k < K; ++k) {
    const VecC e_r = ula_steering(std::asin(geom.ap_cosine(k)), N);
    const VecC e_t = upa_steering(geom.pitch_dev_ap(k), geom.azim_dev_ap(k),
                                  cfg.N_r, cfg.N_c);
    MatC H_nlos(N, N_t);
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < N_t; ++c) H_nlos(r, c) = rng.normal_complex();
    const double scale = lam / (4.0 * kPi * geom.d_dev_ap(k));
    out.H[k] = scale * (los_w * (e_r * e_t.adjoint()) + nlos_w * H_nlos);
  }
}

ChannelSet draw_channels(const Geometry& geom, const ScenarioConfig& cfg,
                         std::uint64_t draw_index) {
  ChannelSet ch;
  Rng base(cfg.rng_seed);
  Rng draw_stream = base.split(draw_index);
  Rng radar_stream = draw_stream.split(0xA11CE);
  Rng comm_stream = draw_stream.split(0xB0B);
  radar_channel(geom, cfg, radar_stream, ch);
  comm_channel(geom, cfg, comm_stream, ch);
  return ch;
}

void dump_channels(const ChannelSet& ch, std::ostream& os) {
  os << "triscc-channels v1\n";
  os << ch.K << ' ' << ch.M << ' ' << ch.N_t << ' ' << ch.N << '\n';
  os.precision(17);
  for (int k = 0; k < ch.K; ++k)
    for (int m = 0; m < ch.M; ++m)
      for (int i = 0; i < ch.K; ++i) {
        const VecC& z = ch.z_at(k, m, i);
        os << "z " << k << ' ' << m << ' ' << i;
        for (int n = 0; n < z.size(); ++n)
          os << ' ' << z(n).real() << ' ' << z(n).imag();
        os << '\n';
      }
  for (int k = 0; k < ch.K; ++k) {
    os << "H " << k;
    for (int r = 0; r < ch.H[k].rows(); ++r)
      for (int c = 0; c < ch.H[k].cols(); ++c)
        os << ' ' << ch.H[k](r, c).real() << ' ' << ch.H[k](r, c).imag();
    os << '\n';
  }
}

}  // namespace triscc
