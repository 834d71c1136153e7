#include "gbart/kernels.hpp"

#include <cmath>
#include <string>

#include "gbart/errors.hpp"
#include "gbart/sampler.hpp"

namespace gbart::kernels {

namespace {

double predict_row(const FitResult& fit, std::span<const double> x) {
  double total = 0.0;
  for (const Ensemble& e : fit.snapshots) total += e.sum(x);
  return fit.transform.unscale(total / static_cast<double>(fit.snapshots.size()));
}

}  // namespace

void check_predict_input(const FitResult& fit, const Matrix& X) {
  if (X.cols() != fit.partition.num_predictors()) {
    throw InvalidInput("model expects " + std::to_string(fit.partition.num_predictors()) +
                       " predictors, got " + std::to_string(X.cols()));
  }
  if (fit.snapshots.empty()) throw InvalidInput("model has no posterior snapshots");
  for (double v : X.values()) {
    if (!std::isfinite(v)) throw InvalidInput("non-finite predictor value");
  }
}

std::vector<double> predict_serial(const FitResult& fit, const Matrix& X) {
  check_predict_input(fit, X);
  std::vector<double> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict_row(fit, X.row(i));
  return out;
}

std::vector<double> predict_parallel(const FitResult& fit, const Matrix& X) {
  check_predict_input(fit, X);
  const auto rows = static_cast<long>(X.rows());
  std::vector<double> out(X.rows());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < rows; ++i) out[i] = predict_row(fit, X.row(static_cast<std::size_t>(i)));
  return out;
}

}  // namespace gbart::kernels
