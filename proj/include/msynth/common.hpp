#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace msynth {

using Eigen::Matrix3d;
using Eigen::Matrix3Xd;
using Eigen::Matrix3Xi;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;
using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Invalid or inconsistent run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem / parse failure on an input or output (CLI exit code 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite loss or gradient during training (CLI exit code 4).
struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Checkpoints disagree on basis / skeleton / normalization (CLI exit code 5).
struct CheckpointMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace msynth
