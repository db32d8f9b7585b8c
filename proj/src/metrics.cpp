#include "loco/metrics.hpp"

#include <cmath>

namespace loco {

double normalized_mse(const Vector& y_true, const Vector& y_pred) {
    require(y_true.size() == y_pred.size(), "normalized_mse: length mismatch");
    if (y_true.size() < 2) throw DimensionError("normalized_mse: need at least 2 values");
    const double mu = mean(y_true);
    double err = 0.0, var = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double e = y_true[i] - y_pred[i];
        const double c = y_true[i] - mu;
        err += e * e;
        var += c * c;
    }
    if (var == 0.0) throw DegenerateError("normalized_mse: constant y_true");
    return err / var;
}

double pearson(const Vector& a, const Vector& b) {
    require(a.size() == b.size(), "pearson: length mismatch");
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw DegenerateError("pearson: zero-variance input");
    return sab / std::sqrt(saa * sbb);
}

CoefficientMetrics coefficient_metrics(const Vector& beta_hat, const Vector& beta_ref) {
    require(beta_hat.size() == beta_ref.size(), "coefficient_metrics: length mismatch");
    const double ref = norm2_sq(beta_ref);
    if (ref == 0.0) throw DegenerateError("coefficient_metrics: zero reference vector");
    double diff = 0.0;
    for (std::size_t i = 0; i < beta_hat.size(); ++i) {
        const double d = beta_hat[i] - beta_ref[i];
        diff += d * d;
    }
    return {diff / ref, pearson(beta_hat, beta_ref)};
}

}  // namespace loco
