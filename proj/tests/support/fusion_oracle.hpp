#pragma once

#include <Eigen/Dense>

#include "mathseed/fusion.hpp"

namespace mathseed::testing {

// Concatenate columns then multiply, column of the output outermost.
inline Matrix naive_concat_project(const Matrix& ei, const Matrix& ec, const Matrix& w) {
  Matrix out(ei.rows, w.cols);
  for (std::size_t j = 0; j < w.cols; ++j) {
    for (std::size_t r = 0; r < ei.rows; ++r) {
      long double acc = 0;
      for (std::size_t k = 0; k < ei.cols + ec.cols; ++k) {
        const double x = k < ei.cols ? ei.data[r * ei.cols + k] : ec.data[r * ec.cols + (k - ei.cols)];
        acc += static_cast<long double>(x) * w.data[k * w.cols + j];
      }
      out.data[r * out.cols + j] = static_cast<double>(acc);
    }
  }
  return out;
}

// Minimum achievable MSE for sequence-level samples with an identity backbone:
// each adapter is an independent linear least-squares problem over its stacked rows.
inline double least_squares_mse(const std::vector<Sample>& data, std::size_t d_llm) {
  double sse = 0;
  std::size_t entries = 0;
  for (int which = 0; which < 2; ++which) {
    std::size_t n = 0, d = 0;
    for (const auto& s : data) {
      const Matrix& e = which == 0 ? s.a : s.b;
      n += e.rows;
      d = e.cols;
    }
    Eigen::MatrixXd x(n, d), y(n, d_llm);
    std::size_t row = 0;
    for (const auto& s : data) {
      const Matrix& e = which == 0 ? s.a : s.b;
      const std::size_t offset = which == 0 ? 0 : s.a.rows;
      for (std::size_t r = 0; r < e.rows; ++r, ++row) {
        for (std::size_t c = 0; c < d; ++c) x(row, c) = e(r, c);
        for (std::size_t c = 0; c < d_llm; ++c) y(row, c) = s.target(offset + r, c);
      }
    }
    const Eigen::MatrixXd w = x.colPivHouseholderQr().solve(y);
    sse += (x * w - y).squaredNorm();
    entries += n * d_llm;
  }
  return sse / static_cast<double>(entries);
}

}  // namespace mathseed::testing
