#pragma once

#include <vector>

#include "gbart/matrix.hpp"

namespace gbart {

struct FitResult;

/// Row-parallel kernels. Each has a serial reference with the same per-row
/// arithmetic, so both return bit-identical results.
namespace kernels {

/// Throws InvalidInput when X does not match the fit's predictor count or
/// holds non-finite values.
void check_predict_input(const FitResult& fit, const Matrix& X);

std::vector<double> predict_serial(const FitResult& fit, const Matrix& X);
std::vector<double> predict_parallel(const FitResult& fit, const Matrix& X);

}  // namespace kernels
}  // namespace gbart
