// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace triscc {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

inline constexpr double kSpeedOfLight = 299792458.0;

/// Configuration or scenario input rejected with a named reason.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : std::runtime_error(key_path + ": " + what), key_path_(key_path) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

class DegenerateGeometryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace triscc
