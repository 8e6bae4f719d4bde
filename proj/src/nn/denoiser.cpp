#include "msynth/nn/denoiser.hpp"

#include <cmath>

namespace msynth {

void DenoiserConfig::validate() const {
  if (dX < 1 || dCond < 1 || dModel < 1 || dQkv < 1) {
    throw ConfigError("DenoiserConfig: dimensions must be positive");
  }
  if (heads < 1 || blocks < 1) throw ConfigError("DenoiserConfig: needs >= 1 head and block");
  if (dQkv % heads != 0) throw ConfigError("DenoiserConfig: dQkv must divide into heads");
  if (dModel % 2 != 0) throw ConfigError("DenoiserConfig: dModel must be even");
}

MatrixXd sinusoidalRow(double position, Eigen::Index dim) {
  MatrixXd row(1, dim);
  for (Eigen::Index i = 0; i < dim / 2; ++i) {
    const double rate = std::pow(10000.0, -2.0 * static_cast<double>(i) / dim);
    row(0, 2 * i) = std::sin(position * rate);
    row(0, 2 * i + 1) = std::cos(position * rate);
  }
  return row;
}

MatrixXd sinusoidalEncoding(Eigen::Index count, Eigen::Index dim) {
  MatrixXd enc(count, dim);
  for (Eigen::Index p = 0; p < count; ++p) {
    enc.row(p) = sinusoidalRow(static_cast<double>(p), dim);
  }
  return enc;
}

TransformerDenoiser::TransformerDenoiser(ParamStore& store, const std::string& prefix,
                                         const DenoiserConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  cfg_.validate();
  inW_ = store.add(prefix + ".in.W", glorotInit(cfg.dX + cfg.dCond, cfg.dModel, rng));
  inB_ = store.add(prefix + ".in.b", MatrixXd::Zero(1, cfg.dModel));
  noiseMlp_ = Mlp(store, prefix + ".noise", {cfg.dModel, 2 * cfg.dModel, cfg.dModel}, rng);
  for (int b = 0; b < cfg.blocks; ++b) {
    const std::string bp = prefix + ".block" + std::to_string(b);
    Block block;
    block.ln1Gain = store.add(bp + ".ln1.g", MatrixXd::Ones(1, cfg.dModel));
    block.ln1Bias = store.add(bp + ".ln1.b", MatrixXd::Zero(1, cfg.dModel));
    block.q = store.add(bp + ".q.W", glorotInit(cfg.dModel, cfg.dQkv, rng));
    block.qBias = store.add(bp + ".q.b", MatrixXd::Zero(1, cfg.dQkv));
    block.k = store.add(bp + ".k.W", glorotInit(cfg.dModel, cfg.dQkv, rng));
    block.kBias = store.add(bp + ".k.b", MatrixXd::Zero(1, cfg.dQkv));
    block.v = store.add(bp + ".v.W", glorotInit(cfg.dModel, cfg.dQkv, rng));
    block.vBias = store.add(bp + ".v.b", MatrixXd::Zero(1, cfg.dQkv));
    block.att = store.add(bp + ".att.W", glorotInit(cfg.dQkv, cfg.dModel, rng));
    block.attBias = store.add(bp + ".att.b", MatrixXd::Zero(1, cfg.dModel));
    block.ln2Gain = store.add(bp + ".ln2.g", MatrixXd::Ones(1, cfg.dModel));
    block.ln2Bias = store.add(bp + ".ln2.b", MatrixXd::Zero(1, cfg.dModel));
    block.ff = Mlp(store, bp + ".ff", {cfg.dModel, 2 * cfg.dModel, cfg.dModel}, rng);
    blocks_.push_back(std::move(block));
  }
  finalGain_ = store.add(prefix + ".final.g", MatrixXd::Ones(1, cfg.dModel));
  finalBias_ = store.add(prefix + ".final.b", MatrixXd::Zero(1, cfg.dModel));
  // Zero output projection: an untrained model predicts exactly zero.
  outW_ = store.add(prefix + ".out.W", MatrixXd::Zero(cfg.dModel, cfg.dX));
  outB_ = store.add(prefix + ".out.b", MatrixXd::Zero(1, cfg.dX));
}

VarPtr TransformerDenoiser::forward(const std::vector<VarPtr>& leaves, const VarPtr& xNoisy,
                                    const VarPtr& cond, int noiseLevel) const {
  if (xNoisy->value.cols() != cfg_.dX || cond->value.cols() != cfg_.dCond ||
      xNoisy->value.rows() != cond->value.rows()) {
    throw std::invalid_argument("TransformerDenoiser: input shapes do not match config");
  }
  if (noiseLevel < 1) throw std::invalid_argument("TransformerDenoiser: noise level must be >= 1");
  const Eigen::Index frames = xNoisy->value.rows();

  VarPtr h = addRowVector(matmul(concatCols(xNoisy, cond), leaves[inW_]), leaves[inB_]);
  if (cfg_.positionalEncoding) {
    h = add(h, constant(sinusoidalEncoding(frames, cfg_.dModel)));
  }
  const VarPtr noiseCode =
      noiseMlp_.forward(leaves, constant(sinusoidalRow(noiseLevel, cfg_.dModel)));
  h = addRowVector(h, noiseCode);

  const Eigen::Index headDim = cfg_.dQkv / cfg_.heads;
  for (const Block& block : blocks_) {
    const VarPtr normed = layerNormRows(h, leaves[block.ln1Gain], leaves[block.ln1Bias]);
    const VarPtr q = addRowVector(matmul(normed, leaves[block.q]), leaves[block.qBias]);
    const VarPtr k = addRowVector(matmul(normed, leaves[block.k]), leaves[block.kBias]);
    const VarPtr v = addRowVector(matmul(normed, leaves[block.v]), leaves[block.vBias]);

    VarPtr heads;
    for (int hIdx = 0; hIdx < cfg_.heads; ++hIdx) {
      const Eigen::Index off = hIdx * headDim;
      const VarPtr qh = sliceCols(q, off, headDim);
      const VarPtr kh = sliceCols(k, off, headDim);
      const VarPtr vh = sliceCols(v, off, headDim);
      const VarPtr weights = softmaxRows(
          scale(matmul(qh, transposed(kh)), 1.0 / std::sqrt(static_cast<double>(headDim))));
      const VarPtr attended = matmul(weights, vh);
      heads = hIdx == 0 ? attended : concatCols(heads, attended);
    }
    const VarPtr mixed = addRowVector(matmul(heads, leaves[block.att]), leaves[block.attBias]);
    h = add(h, mixed);

    const VarPtr ffIn = layerNormRows(h, leaves[block.ln2Gain], leaves[block.ln2Bias]);
    h = add(h, block.ff.forward(leaves, ffIn));
  }

  h = layerNormRows(h, leaves[finalGain_], leaves[finalBias_]);
  return addRowVector(matmul(h, leaves[outW_]), leaves[outB_]);
}

MatrixXd TransformerDenoiser::predict(const ParamStore& store, const MatrixXd& xNoisy,
                                      const MatrixXd& cond, int noiseLevel) const {
  const std::vector<VarPtr> leaves = constantLeaves(store);
  return forward(leaves, constant(xNoisy), constant(cond), noiseLevel)->value;
}

MatrixXd TransformerDenoiser::forwardValue(const ParamStore& store, const MatrixXd& xNoisy,
                                           const MatrixXd& cond, int noiseLevel) const {
  if (xNoisy.cols() != cfg_.dX || cond.cols() != cfg_.dCond || xNoisy.rows() != cond.rows()) {
    throw std::invalid_argument("TransformerDenoiser: input shapes do not match config");
  }
  if (noiseLevel < 1) throw std::invalid_argument("TransformerDenoiser: noise level must be >= 1");
  const Eigen::Index frames = xNoisy.rows();
  const auto value = [&store](std::size_t i) -> const MatrixXd& { return store.at(i).value; };

  MatrixXd packed(frames, cfg_.dX + cfg_.dCond);
  packed << xNoisy, cond;
  MatrixXd h = packed * value(inW_);
  h.rowwise() += value(inB_).row(0);
  if (cfg_.positionalEncoding) h += sinusoidalEncoding(frames, cfg_.dModel);
  const MatrixXd noiseCode = noiseMlp_.forwardValue(store, sinusoidalRow(noiseLevel, cfg_.dModel));
  h.rowwise() += noiseCode.row(0);

  const Eigen::Index headDim = cfg_.dQkv / cfg_.heads;
  const double invSqrt = 1.0 / std::sqrt(static_cast<double>(headDim));
  for (const Block& block : blocks_) {
    const MatrixXd normed = layerNormRowsValue(h, value(block.ln1Gain), value(block.ln1Bias));
    MatrixXd q = normed * value(block.q);
    q.rowwise() += value(block.qBias).row(0);
    MatrixXd k = normed * value(block.k);
    k.rowwise() += value(block.kBias).row(0);
    MatrixXd v = normed * value(block.v);
    v.rowwise() += value(block.vBias).row(0);

    MatrixXd heads(frames, cfg_.dQkv);
    for (int hIdx = 0; hIdx < cfg_.heads; ++hIdx) {
      const Eigen::Index off = hIdx * headDim;
      const MatrixXd qh = q.middleCols(off, headDim);
      const MatrixXd kh = k.middleCols(off, headDim);
      const MatrixXd vh = v.middleCols(off, headDim);
      const MatrixXd khT = kh.transpose();
      const MatrixXd weights = softmaxRowsValue((qh * khT) * invSqrt);
      heads.middleCols(off, headDim) = weights * vh;
    }
    MatrixXd mixed = heads * value(block.att);
    mixed.rowwise() += value(block.attBias).row(0);
    h += mixed;

    const MatrixXd ffIn = layerNormRowsValue(h, value(block.ln2Gain), value(block.ln2Bias));
    h += block.ff.forwardValue(store, ffIn);
  }

  h = layerNormRowsValue(h, value(finalGain_), value(finalBias_));
  MatrixXd out = h * value(outW_);
  out.rowwise() += value(outB_).row(0);
  return out;
}

std::vector<VarPtr> constantLeaves(const ParamStore& store) {
  std::vector<VarPtr> leaves;
  leaves.reserve(store.size());
  for (const Parameter& p : store.all()) leaves.push_back(constant(p.value));
  return leaves;
}

}  // namespace msynth
