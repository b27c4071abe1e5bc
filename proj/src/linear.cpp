#include "edumine/linear.hpp"

#include <algorithm>
#include <cmath>

namespace edumine::models {

LeastSquaresFit fit_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tolerance) {
  if (X.rows() != y.size()) throw DataError("least squares: row count of X and y differ");
  LeastSquaresFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(X.cols());
  fit.aliased.assign(static_cast<std::size_t>(X.cols()), 1);
  if (X.cols() == 0) return fit;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(tolerance);
  fit.rank = qr.rank();
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index k = 0; k < fit.rank; ++k) fit.aliased[static_cast<std::size_t>(perm(k))] = 0;
  if (fit.rank == 0) return fit;
  // solve() yields the basic solution: non-pivot (aliased) columns get zero.
  fit.coefficients = qr.solve(y);
  return fit;
}

LinearModel train_ols(const Dataset& train, std::string_view target) {
  PreparedMatrix p = prepare(train, target);
  const auto n = p.X.rows();
  if (n < 2) throw DataError("regression needs at least 2 rows with a target value");

  LinearModel m;
  m.transformer = std::move(p.transformer);

  // Fit on centered columns; the intercept is recovered from the means.
  const double y_mean = p.y.mean();
  const Eigen::RowVectorXd x_mean = p.X.colwise().mean();
  const Eigen::MatrixXd Xc = p.X.rowwise() - x_mean;
  const Eigen::VectorXd yc = p.y.array() - y_mean;

  const bool constant_target = (p.y.array() == p.y(0)).all();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p.X.cols());
  m.aliased.assign(static_cast<std::size_t>(p.X.cols()), 0);
  if (!constant_target) {
    auto fit = fit_least_squares(Xc, yc);
    beta = fit.coefficients;
    m.aliased = std::move(fit.aliased);
  }

  // Back to original units: interval columns were (x - mean) / scale.
  m.coefficients.assign(static_cast<std::size_t>(p.X.cols()), 0.0);
  double intercept = y_mean - x_mean.dot(beta);
  Eigen::Index col = 0;
  for (const auto& e : m.transformer.encodings) {
    if (!e.categorical()) {
      m.coefficients[static_cast<std::size_t>(col)] = beta(col) / e.scale;
      intercept -= beta(col) * e.fill / e.scale;
      ++col;
      continue;
    }
    for (std::size_t k = 0; k < e.width(); ++k, ++col) m.coefficients[static_cast<std::size_t>(col)] = beta(col);
  }
  m.intercept = constant_target ? p.y(0) : intercept;

  if (constant_target) {
    m.r_squared = 0.0;
  } else {
    const Eigen::VectorXd resid = yc - Xc * beta;
    const double sse = resid.squaredNorm();
    const double sst = yc.squaredNorm();
    m.r_squared = std::clamp(1.0 - sse / sst, 0.0, 1.0);
  }
  return m;
}

std::vector<double> predict(const LinearModel& model, const Dataset& data) {
  const Eigen::MatrixXd X = model.transformer.transform(data, false);
  const Eigen::Map<const Eigen::VectorXd> coef(model.coefficients.data(),
                                               static_cast<Eigen::Index>(model.coefficients.size()));
  const Eigen::VectorXd pred = (X * coef).array() + model.intercept;
  return {pred.data(), pred.data() + pred.size()};
}

}  // namespace edumine::models
