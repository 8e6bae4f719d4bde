#include "msynth/nn/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace msynth {

namespace {

std::atomic<std::uint64_t> nextId{1};

VarPtr makeNode(MatrixXd value, std::vector<VarPtr> inputs) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->inputs = std::move(inputs);
  node->id = nextId.fetch_add(1, std::memory_order_relaxed);
  for (const auto& in : node->inputs) node->needsGrad = node->needsGrad || in->needsGrad;
  return node;
}

void checkSameShape(const VarPtr& a, const VarPtr& b, const char* op) {
  if (a->value.rows() != b->value.rows() || a->value.cols() != b->value.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

void Node::accum(const MatrixXd& g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

VarPtr leaf(MatrixXd value) {
  auto node = makeNode(std::move(value), {});
  node->needsGrad = true;
  return node;
}

VarPtr constant(MatrixXd value) { return makeNode(std::move(value), {}); }

VarPtr matmul(const VarPtr& a, const VarPtr& b) {
  if (a->value.cols() != b->value.rows()) {
    throw std::invalid_argument("matmul: inner dimensions differ");
  }
  auto out = makeNode(a->value * b->value, {a, b});
  Node* o = out.get();
  out->back = [o]() {
    Node& a = *o->inputs[0];
    Node& b = *o->inputs[1];
    if (a.needsGrad) a.accum(o->grad * b.value.transpose());
    if (b.needsGrad) b.accum(a.value.transpose() * o->grad);
  };
  return out;
}

VarPtr add(const VarPtr& a, const VarPtr& b) {
  checkSameShape(a, b, "add");
  auto out = makeNode(a->value + b->value, {a, b});
  Node* o = out.get();
  out->back = [o]() {
    if (o->inputs[0]->needsGrad) o->inputs[0]->accum(o->grad);
    if (o->inputs[1]->needsGrad) o->inputs[1]->accum(o->grad);
  };
  return out;
}

VarPtr sub(const VarPtr& a, const VarPtr& b) {
  checkSameShape(a, b, "sub");
  auto out = makeNode(a->value - b->value, {a, b});
  Node* o = out.get();
  out->back = [o]() {
    if (o->inputs[0]->needsGrad) o->inputs[0]->accum(o->grad);
    if (o->inputs[1]->needsGrad) o->inputs[1]->accum(-o->grad);
  };
  return out;
}

VarPtr scale(const VarPtr& a, double s) {
  auto out = makeNode(a->value * s, {a});
  Node* o = out.get();
  out->back = [o, s]() {
    if (o->inputs[0]->needsGrad) o->inputs[0]->accum(o->grad * s);
  };
  return out;
}

VarPtr addRowVector(const VarPtr& a, const VarPtr& row) {
  if (row->value.rows() != 1 || row->value.cols() != a->value.cols()) {
    throw std::invalid_argument("addRowVector: row must be 1 x cols(a)");
  }
  MatrixXd v = a->value;
  v.rowwise() += row->value.row(0);
  auto out = makeNode(std::move(v), {a, row});
  Node* o = out.get();
  out->back = [o]() {
    if (o->inputs[0]->needsGrad) o->inputs[0]->accum(o->grad);
    if (o->inputs[1]->needsGrad) o->inputs[1]->accum(o->grad.colwise().sum());
  };
  return out;
}

VarPtr gelu(const VarPtr& a) {
  // exact form x * Phi(x) with the Gaussian CDF
  const MatrixXd& x = a->value;
  MatrixXd phi =
      x.unaryExpr([](double v) { return 0.5 * (1.0 + std::erf(v / std::numbers::sqrt2)); });
  auto out = makeNode(x.cwiseProduct(phi), {a});
  Node* o = out.get();
  out->back = [o, phi = std::move(phi)]() {
    Node& a = *o->inputs[0];
    if (!a.needsGrad) return;
    const auto x = a.value.array();
    const MatrixXd density =
        ((-0.5 * x.square()).exp() / std::sqrt(2.0 * std::numbers::pi)).matrix();
    a.accum(o->grad.cwiseProduct(phi + a.value.cwiseProduct(density)));
  };
  return out;
}

VarPtr layerNormRows(const VarPtr& x, const VarPtr& gain, const VarPtr& bias, double eps) {
  const Eigen::Index cols = x->value.cols();
  if (gain->value.rows() != 1 || gain->value.cols() != cols || bias->value.rows() != 1 ||
      bias->value.cols() != cols) {
    throw std::invalid_argument("layerNormRows: gain/bias must be 1 x cols(x)");
  }
  const MatrixXd& v = x->value;
  VectorXd mean = v.rowwise().mean();
  MatrixXd centered = v.colwise() - mean;
  VectorXd invStd =
      (centered.array().square().rowwise().mean() + eps).sqrt().inverse().matrix();
  MatrixXd xhat = centered.array().colwise() * invStd.array();
  MatrixXd y = (xhat.array().rowwise() * gain->value.row(0).array()).matrix();
  y.rowwise() += bias->value.row(0);

  auto out = makeNode(std::move(y), {x, gain, bias});
  Node* o = out.get();
  out->back = [o, xhat = std::move(xhat), invStd = std::move(invStd)]() {
    Node& x = *o->inputs[0];
    Node& gain = *o->inputs[1];
    Node& bias = *o->inputs[2];
    const Eigen::Index c = x.value.cols();
    if (gain.needsGrad) gain.accum(o->grad.cwiseProduct(xhat).colwise().sum());
    if (bias.needsGrad) bias.accum(o->grad.colwise().sum());
    if (x.needsGrad) {
      const MatrixXd dXhat =
          (o->grad.array().rowwise() * gain.value.row(0).array()).matrix();
      // per-row: dx = inv/C * (C*dXhat - sum(dXhat) - xhat * sum(dXhat .* xhat))
      const VectorXd rowSum = dXhat.rowwise().sum();
      const VectorXd rowDot = dXhat.cwiseProduct(xhat).rowwise().sum();
      MatrixXd dx = static_cast<double>(c) * dXhat;
      dx.colwise() -= rowSum;
      dx -= (xhat.array().colwise() * rowDot.array()).matrix();
      dx.array().colwise() *= invStd.array() / static_cast<double>(c);
      x.accum(dx);
    }
  };
  return out;
}

VarPtr softmaxRows(const VarPtr& a) {
  MatrixXd y = a->value;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    y.row(r) = (y.row(r).array() - y.row(r).maxCoeff()).exp();
    y.row(r) /= y.row(r).sum();
  }
  auto out = makeNode(std::move(y), {a});
  Node* o = out.get();
  out->back = [o]() {
    Node& a = *o->inputs[0];
    if (!a.needsGrad) return;
    const MatrixXd& y = o->value;
    const VectorXd rowDot = o->grad.cwiseProduct(y).rowwise().sum();
    a.accum(y.cwiseProduct(o->grad.colwise() - rowDot));
  };
  return out;
}

VarPtr transposed(const VarPtr& a) {
  auto out = makeNode(a->value.transpose(), {a});
  Node* o = out.get();
  out->back = [o]() {
    if (o->inputs[0]->needsGrad) o->inputs[0]->accum(o->grad.transpose());
  };
  return out;
}

VarPtr concatCols(const VarPtr& a, const VarPtr& b) {
  if (a->value.rows() != b->value.rows()) {
    throw std::invalid_argument("concatCols: row counts differ");
  }
  MatrixXd v(a->value.rows(), a->value.cols() + b->value.cols());
  v << a->value, b->value;
  auto out = makeNode(std::move(v), {a, b});
  Node* o = out.get();
  out->back = [o]() {
    Node& a = *o->inputs[0];
    Node& b = *o->inputs[1];
    if (a.needsGrad) a.accum(o->grad.leftCols(a.value.cols()));
    if (b.needsGrad) b.accum(o->grad.rightCols(b.value.cols()));
  };
  return out;
}

VarPtr sliceCols(const VarPtr& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 1 || start + count > a->value.cols()) {
    throw std::invalid_argument("sliceCols: range out of bounds");
  }
  auto out = makeNode(a->value.middleCols(start, count), {a});
  Node* o = out.get();
  out->back = [o, start, count]() {
    Node& a = *o->inputs[0];
    if (!a.needsGrad) return;
    MatrixXd g = MatrixXd::Zero(a.value.rows(), a.value.cols());
    g.middleCols(start, count) = o->grad;
    a.accum(g);
  };
  return out;
}

VarPtr meanAbsError(const VarPtr& pred, const MatrixXd& target) {
  if (pred->value.rows() != target.rows() || pred->value.cols() != target.cols()) {
    throw std::invalid_argument("meanAbsError: shape mismatch");
  }
  MatrixXd diff = pred->value - target;
  MatrixXd lossValue(1, 1);
  lossValue(0, 0) = diff.cwiseAbs().mean();
  auto out = makeNode(std::move(lossValue), {pred});
  Node* o = out.get();
  out->back = [o, diff = std::move(diff)]() {
    Node& pred = *o->inputs[0];
    if (!pred.needsGrad) return;
    const double w = o->grad(0, 0) / static_cast<double>(diff.size());
    pred.accum(w * diff.array().sign().matrix());
  };
  return out;
}

VarPtr dotConstant(const VarPtr& a, const MatrixXd& weights) {
  if (a->value.rows() != weights.rows() || a->value.cols() != weights.cols()) {
    throw std::invalid_argument("dotConstant: shape mismatch");
  }
  MatrixXd v(1, 1);
  v(0, 0) = a->value.cwiseProduct(weights).sum();
  auto out = makeNode(std::move(v), {a});
  Node* o = out.get();
  out->back = [o, weights]() {
    if (o->inputs[0]->needsGrad) o->inputs[0]->accum(o->grad(0, 0) * weights);
  };
  return out;
}

void backward(const VarPtr& loss) {
  if (!loss || loss->value.size() != 1) {
    throw std::invalid_argument("backward: loss must be a single scalar");
  }
  // Collect the reachable subgraph, then run in descending creation order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{loss.get()};
  seen.insert(loss.get());
  while (!stack.empty()) {
    Node* node = stack.back();
    stack.pop_back();
    order.push_back(node);
    for (const auto& in : node->inputs) {
      if (in->needsGrad && seen.insert(in.get()).second) stack.push_back(in.get());
    }
  }
  std::sort(order.begin(), order.end(),
            [](const Node* a, const Node* b) { return a->id > b->id; });

  loss->grad = MatrixXd::Ones(1, 1);
  for (Node* node : order) {
    if (node->back && node->needsGrad && node->grad.size() != 0) node->back();
  }
}

MatrixXd geluValue(const MatrixXd& x) {
  const MatrixXd phi =
      x.unaryExpr([](double v) { return 0.5 * (1.0 + std::erf(v / std::numbers::sqrt2)); });
  return x.cwiseProduct(phi);
}

MatrixXd layerNormRowsValue(const MatrixXd& x, const MatrixXd& gain, const MatrixXd& bias,
                            double eps) {
  if (gain.rows() != 1 || gain.cols() != x.cols() || bias.rows() != 1 || bias.cols() != x.cols()) {
    throw std::invalid_argument("layerNormRowsValue: gain/bias must be 1 x cols(x)");
  }
  VectorXd mean = x.rowwise().mean();
  MatrixXd centered = x.colwise() - mean;
  VectorXd invStd =
      (centered.array().square().rowwise().mean() + eps).sqrt().inverse().matrix();
  MatrixXd xhat = centered.array().colwise() * invStd.array();
  MatrixXd y = (xhat.array().rowwise() * gain.row(0).array()).matrix();
  y.rowwise() += bias.row(0);
  return y;
}

MatrixXd softmaxRowsValue(const MatrixXd& x) {
  MatrixXd y = x;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    y.row(r) = (y.row(r).array() - y.row(r).maxCoeff()).exp();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

}  // namespace msynth
