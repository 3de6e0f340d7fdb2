#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "f0bench/estimators.hpp"

namespace f0bench {

namespace {

constexpr double kSignalEigenFraction = 0.01;

int choose_model_order(const Eigen::VectorXd& eigenvalues, int max_order, int correlation_order) {
  const double largest = eigenvalues.maxCoeff();
  int count = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] > kSignalEigenFraction * largest) ++count;
  }
  count += count % 2;
  int cap = std::min(max_order, correlation_order - 1);
  cap -= cap % 2;
  return std::clamp(count, 2, std::max(cap, 2));
}

}  // namespace

std::pair<EstimateResult, EspritModel> estimate_esprit(const Waveform& window, int model_order,
                                                       int correlation_order, int max_order) {
  using Eigen::Index;
  using Eigen::MatrixXd;
  using cd = std::complex<double>;

  const auto length = static_cast<Index>(window.size());
  const Index order_n = correlation_order > 0 ? correlation_order : length / 3;
  if (order_n < 3 || length < 2 * order_n) {
    throw std::invalid_argument("ESPRIT needs window length >= 2 * correlation order >= 6");
  }
  if (model_order < 0 || model_order % 2 != 0) throw std::invalid_argument("ESPRIT model order must be even");
  if (model_order >= order_n) throw std::invalid_argument("ESPRIT model order must be below the correlation order");

  const WindowSpan span{window.t0, window.duration()};
  const double ts = 1.0 / window.fs;
  EspritModel model;
  model.correlation_order = static_cast<int>(order_n);
  model.sample_interval = ts;

  // Sample correlation matrix over all length-N snapshots.
  const Index snapshots = length - order_n + 1;
  MatrixXd data(order_n, snapshots);
  for (Index j = 0; j < snapshots; ++j) {
    for (Index i = 0; i < order_n; ++i) data(i, j) = window.samples[static_cast<std::size_t>(i + j)];
  }
  const MatrixXd corr = (data * data.transpose()) / static_cast<double>(snapshots);

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(corr);
  if (eig.info() != Eigen::Success) {
    return {EstimateResult::failure(Method::esprit, span, "correlation eigensolver did not converge"), model};
  }
  const int m = model_order > 0 ? model_order
                                : choose_model_order(eig.eigenvalues(), max_order, static_cast<int>(order_n));
  model.model_order = m;

  // Eigenvalues come out ascending: the signal subspace is the last m columns.
  const MatrixXd subspace = eig.eigenvectors().rightCols(m);
  const MatrixXd s1 = subspace.topRows(order_n - 1);
  const MatrixXd s2 = subspace.bottomRows(order_n - 1);
  const MatrixXd rotation = (s1.transpose() * s1).ldlt().solve(s1.transpose() * s2);
  const double subspace_residual = (s1 * rotation - s2).norm();

  Eigen::EigenSolver<MatrixXd> poles_solver(rotation, false);
  if (poles_solver.info() != Eigen::Success) {
    return {EstimateResult::failure(Method::esprit, span, "rotation eigensolver did not converge"), model};
  }
  const Eigen::VectorXcd poles = poles_solver.eigenvalues();

  // Complex amplitudes by least squares on the Vandermonde system.
  Eigen::MatrixXcd vandermonde(length, m);
  for (Index k = 0; k < m; ++k) {
    cd z{1.0, 0.0};
    for (Index n = 0; n < length; ++n) {
      vandermonde(n, k) = z;
      z *= poles[k];
    }
  }
  Eigen::VectorXcd x(length);
  for (Index n = 0; n < length; ++n) x[n] = window.samples[static_cast<std::size_t>(n)];
  const Eigen::VectorXcd weights = vandermonde.colPivHouseholderQr().solve(x);
  const double energy = x.squaredNorm();
  model.residual_power = energy > 0.0 ? (x - vandermonde * weights).squaredNorm() / energy : 0.0;

  for (Index k = 0; k < m; ++k) {
    const cd log_pole = std::log(poles[k]);
    model.components.push_back({std::abs(weights[k]), std::arg(weights[k]),
                                log_pole.imag() / (2.0 * std::numbers::pi * ts), log_pole.real() / ts});
  }
  std::sort(model.components.begin(), model.components.end(),
            [](const EspritComponent& a, const EspritComponent& b) { return a.frequency < b.frequency; });

  const EspritComponent* best = nullptr;
  for (const auto& c : model.components) {
    if (c.frequency < kEspritGate[0] || c.frequency > kEspritGate[1]) continue;
    if (!best || std::abs(c.frequency - kNominalF0) < std::abs(best->frequency - kNominalF0)) best = &c;
  }

  EstimateResult r;
  r.method = Method::esprit;
  r.window = span;
  r.diagnostics[diag::model_order] = m;
  r.diagnostics[diag::subspace_residual] = subspace_residual;
  r.diagnostics["correlation_order"] = static_cast<double>(order_n);
  if (!best) {
    r.failed = true;
    r.failure_reason = "no component inside the 40-70 Hz gate";
    return {r, model};
  }
  r.f0_hat = best->frequency;
  return {r, model};
}

}  // namespace f0bench
