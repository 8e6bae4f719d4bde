#pragma once

#include "msynth/common.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace msynth {

/// One value in a recorded computation. Nodes form a DAG through `inputs`;
/// `id` increases with creation order, which is a valid topological order
/// because every op's inputs exist before the op.
struct Node {
  MatrixXd value;
  MatrixXd grad;  // allocated on first accumulation
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void()> back;  // adds this node's grad into its inputs' grads
  std::uint64_t id = 0;
  bool needsGrad = false;

  void accum(const MatrixXd& g);
};

using VarPtr = std::shared_ptr<Node>;

/// Leaf with gradient tracking (parameters) ...
VarPtr leaf(MatrixXd value);
/// ... or without (inputs, encodings).
VarPtr constant(MatrixXd value);

VarPtr matmul(const VarPtr& a, const VarPtr& b);
VarPtr add(const VarPtr& a, const VarPtr& b);
VarPtr sub(const VarPtr& a, const VarPtr& b);
VarPtr scale(const VarPtr& a, double s);
/// Adds a 1 x C row vector to every row of a rows x C matrix.
VarPtr addRowVector(const VarPtr& a, const VarPtr& row);
VarPtr gelu(const VarPtr& a);
/// Row-wise layer normalization with 1 x C gain and bias.
VarPtr layerNormRows(const VarPtr& x, const VarPtr& gain, const VarPtr& bias,
                     double eps = 1e-5);
VarPtr softmaxRows(const VarPtr& a);
VarPtr transposed(const VarPtr& a);
VarPtr concatCols(const VarPtr& a, const VarPtr& b);
VarPtr sliceCols(const VarPtr& a, Eigen::Index start, Eigen::Index count);
/// Mean of |pred - target| over all entries; the training loss. 1 x 1 output.
VarPtr meanAbsError(const VarPtr& pred, const MatrixXd& target);
/// Sum of a (.) weights; smooth scalar head used by gradient checks. 1 x 1.
VarPtr dotConstant(const VarPtr& a, const MatrixXd& weights);

/// Reverse-mode sweep from a scalar loss; fills grads of every reachable
/// node with needsGrad set. Throws on non-scalar loss.
void backward(const VarPtr& loss);

/// Value-only twins of the nonlinear ops, byte-identical arithmetic to the
/// recorded versions; shared by the graph-free inference paths.
MatrixXd geluValue(const MatrixXd& x);
MatrixXd layerNormRowsValue(const MatrixXd& x, const MatrixXd& gain, const MatrixXd& bias,
                            double eps = 1e-5);
MatrixXd softmaxRowsValue(const MatrixXd& x);

}  // namespace msynth
