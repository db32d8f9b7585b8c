#pragma once

#include "loco/matrix.hpp"

namespace loco {

/// ||y_true - y_pred||^2 / ||y_true - mean(y_true)||^2.
double normalized_mse(const Vector& y_true, const Vector& y_pred);

double pearson(const Vector& a, const Vector& b);

struct CoefficientMetrics {
    double rel_mse = 0.0;  // ||beta_hat - beta_ref||^2 / ||beta_ref||^2
    double pearson = 0.0;
};

CoefficientMetrics coefficient_metrics(const Vector& beta_hat, const Vector& beta_ref);

}  // namespace loco
