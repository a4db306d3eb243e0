#include "smaup/sar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace smaup {

AreaVariable::AreaVariable(std::vector<double> values, const SpatialWeights& w)
    : values_(std::move(values)), weights_id_(w.id()) {
  if (values_.size() != w.n())
    throw InputError("variable has " + std::to_string(values_.size()) + " values but weights have " +
                     std::to_string(w.n()) + " areas");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i])) throw InputError("value " + std::to_string(i) + " is not finite");
}

void AreaVariable::require_on(const SpatialWeights& w) const {
  if (weights_id_ != w.id() || values_.size() != w.n())
    throw InputError("variable is not tied to these spatial weights");
}

SarSolver::SarSolver(const SpatialWeights& w, double rho)
    : rho_(rho), n_(w.n()), weights_id_(w.id()) {
  if (!(std::abs(rho) < 1.0)) throw InputError("SAR requires |rho| < 1, got " + std::to_string(rho));
  const auto n = static_cast<Eigen::Index>(n_);
  if (n_ <= kDenseLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto nb = w.neighbors(i);
      const auto wt = w.weights(i);
      for (std::size_t e = 0; e < nb.size(); ++e) a(static_cast<Eigen::Index>(i), nb[e]) -= rho * wt[e];
    }
    dense_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(a);
    const double rcond = dense_->rcond();
    if (!(rcond > 1e-14))
      throw NumericalError("I - rho W is singular at rho = " + std::to_string(rho));
  } else {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(n_ + 2 * w.edge_count());
    for (std::size_t i = 0; i < n_; ++i) {
      const auto row = static_cast<int>(i);
      entries.emplace_back(row, row, 1.0);
      const auto nb = w.neighbors(i);
      const auto wt = w.weights(i);
      for (std::size_t e = 0; e < nb.size(); ++e) entries.emplace_back(row, nb[e], -rho * wt[e]);
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    sparse_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    sparse_->compute(a);
    if (sparse_->info() != Eigen::Success)
      throw NumericalError("I - rho W is singular at rho = " + std::to_string(rho));
  }
}

std::vector<double> SarSolver::solve(std::span<const double> rhs) const {
  if (rhs.size() != n_) throw InputError("SAR solve: right-hand side has wrong length");
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  Eigen::VectorXd y = dense_ ? Eigen::VectorXd(dense_->solve(b)) : Eigen::VectorXd(sparse_->solve(b));
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(y[i])) throw NumericalError("SAR solve produced non-finite values at rho = " + std::to_string(rho_));
  return {y.data(), y.data() + n};
}

AreaVariable SarSolver::draw(const SpatialWeights& w, Rng& rng) const {
  if (w.id() != weights_id_) throw InputError("SAR solver was built on different weights");
  std::vector<double> eps(n_);
  for (auto& e : eps) e = rng.normal();
  if (rho_ == 0.0) return AreaVariable(std::move(eps), w);
  return AreaVariable(solve(eps), w);
}

AreaVariable generate_sar(const SpatialWeights& w, const SarSpec& spec) {
  if (!w.standardized() && std::abs(spec.rho) >= 1.0)
    throw NumericalError("singular SAR system at rho = " + std::to_string(spec.rho));
  Rng rng(spec.seed);
  return SarSolver(w, spec.rho).draw(w, rng);
}

namespace {

// Centered y and Wy reduce SSE(rho) to a quadratic in rho.
struct LikelihoodMoments {
  double yy = 0, yw = 0, ww = 0;
  std::size_t n = 0;
};

LikelihoodMoments moments(const SpatialWeights& w, std::span<const double> y) {
  const std::size_t n = y.size();
  const auto wy = w.lag(y);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const double mw = std::accumulate(wy.begin(), wy.end(), 0.0) / static_cast<double>(n);
  LikelihoodMoments m;
  m.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = y[i] - my;
    const double b = wy[i] - mw;
    m.yy += a * a;
    m.yw += a * b;
    m.ww += b * b;
  }
  return m;
}

double log_likelihood(const LikelihoodMoments& m, const std::vector<double>& eigenvalues, double rho) {
  const double sse = m.yy - 2.0 * rho * m.yw + rho * rho * m.ww;
  double logdet = 0.0;
  for (double lambda : eigenvalues) logdet += std::log(std::abs(1.0 - rho * lambda));
  const auto n = static_cast<double>(m.n);
  return -0.5 * n * std::log(sse / n) + logdet;
}

}  // namespace

double sar_log_likelihood(const SpatialWeights& w, std::span<const double> y, double rho) {
  if (y.size() != w.n()) throw InputError("log-likelihood: length mismatch");
  return log_likelihood(moments(w, y), w.eigenvalues(), rho);
}

double estimate_rho(const SpatialWeights& w, const AreaVariable& y) {
  y.require_on(w);
  if (w.n() < 3) throw InputError("rho estimation needs at least 3 areas");
  const auto m = moments(w, y.values());
  if (!(m.yy > 0.0)) throw DegenerateInputError("cannot estimate rho of a constant variable");
  const auto& ev = w.eigenvalues();
  auto f = [&](double rho) {
    const double v = log_likelihood(m, ev, rho);
    if (!std::isfinite(v)) throw DegenerateInputError("SAR likelihood is not finite at rho = " + std::to_string(rho));
    return v;
  };

  constexpr double kInvPhi = 0.6180339887498949;
  double lo = -0.999, hi = 0.999;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

AreaVariable rank_permute(const AreaVariable& y_source, const AreaVariable& x_reference) {
  if (y_source.size() != x_reference.size())
    throw InputError("rank_permute: source has " + std::to_string(y_source.size()) +
                     " values, reference has " + std::to_string(x_reference.size()));
  if (y_source.weights_id() != x_reference.weights_id())
    throw InputError("rank_permute: variables live on different weights");
  const std::size_t n = y_source.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto x = x_reference.values();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> sorted(y_source.values().begin(), y_source.values().end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r) out[order[r]] = sorted[r];
  return AreaVariable(std::move(out), y_source.weights_id());
}

TargetRhoResult generate_with_target_rho(const SpatialWeights& w, const SarSolver& reference,
                                         const AreaVariable& y_base, double window, int max_retries,
                                         std::uint64_t seed) {
  y_base.require_on(w);
  if (!(window > 0.0)) throw InputError("target-rho window must be positive");
  if (max_retries < 1) throw InputError("max_retries must be at least 1");
  const double target = reference.rho();
  std::optional<TargetRhoResult> best;
  for (int attempt = 1; attempt <= max_retries; ++attempt) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(attempt)}));
    const AreaVariable x = reference.draw(w, rng);
    AreaVariable candidate = rank_permute(y_base, x);
    const double rho_hat = estimate_rho(w, candidate);
    if (std::abs(rho_hat - target) < window) return {std::move(candidate), rho_hat, attempt};
    if (!best || std::abs(rho_hat - target) < std::abs(best->estimated_rho - target))
      best = TargetRhoResult{std::move(candidate), rho_hat, attempt};
  }
  best->attempts = max_retries;
  throw RetryExhaustedError("no permutation reached rho within " + std::to_string(window) + " of " +
                                std::to_string(target) + " after " + std::to_string(max_retries) +
                                " attempts",
                            std::move(*best));
}

TargetRhoResult generate_with_target_rho(const SpatialWeights& w, const AreaVariable& y_base, double target,
                                         double window, int max_retries, std::uint64_t seed) {
  return generate_with_target_rho(w, SarSolver(w, target), y_base, window, max_retries, seed);
}

}  // namespace smaup
