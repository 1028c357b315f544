#pragma once

// Dense building blocks shared by the encoder and the pretraining head.
// Rows are sequence positions.

#include <Eigen/Dense>

#include <cmath>

namespace mekb::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::RowVectorXd;

inline constexpr double kLayerNormEps = 1e-6;

struct LayerNormCache {
  Matrix normalized;  // (x - mean) / sigma
  Eigen::VectorXd inv_sigma;
};

inline Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias,
                         LayerNormCache& cache) {
  const auto rows = x.rows();
  const auto cols = static_cast<double>(x.cols());
  cache.normalized.resize(x.rows(), x.cols());
  cache.inv_sigma.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mean = x.row(r).sum() / cols;
    const auto centered = (x.row(r).array() - mean).matrix();
    const double var = centered.squaredNorm() / cols;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    cache.inv_sigma(r) = inv;
    cache.normalized.row(r) = centered * inv;
  }
  Matrix y = cache.normalized.array().rowwise() * gain.row(0).array();
  y.rowwise() += bias.row(0);
  return y;
}

// Accumulates gain/bias gradients and returns dL/dx.
inline Matrix layer_norm_backward(const Matrix& dy, const Matrix& gain,
                                  const LayerNormCache& cache, Matrix& d_gain, Matrix& d_bias) {
  d_gain.row(0) += (dy.array() * cache.normalized.array()).colwise().sum().matrix();
  d_bias.row(0) += dy.colwise().sum();
  const double cols = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const Vector dxhat = (dy.row(r).array() * gain.row(0).array()).matrix();
    const double mean_d = dxhat.sum() / cols;
    const double mean_dx = dxhat.dot(cache.normalized.row(r)) / cols;
    dx.row(r) = cache.inv_sigma(r) *
                (dxhat.array() - mean_d - cache.normalized.row(r).array() * mean_dx).matrix();
  }
  return dx;
}

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

inline double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
  const double pdf = std::exp(-0.5 * x * x) * (0.5 * M_2_SQRTPI * M_SQRT1_2);
  return cdf + x * pdf;
}

inline Matrix gelu(const Matrix& x) { return x.unaryExpr([](double v) { return gelu(v); }); }

// Row-wise softmax with max subtraction.
inline Matrix softmax_rows(const Matrix& s) {
  Matrix out(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const double mx = s.row(r).maxCoeff();
    out.row(r) = (s.row(r).array() - mx).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

inline double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  const double mx = v.maxCoeff();
  return mx + std::log((v.array() - mx).exp().sum());
}

}  // namespace mekb::nn
