#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "smaup/error.hpp"
#include "smaup/rng.hpp"
#include "smaup/spatial_weights.hpp"

namespace smaup {

/// Real values, one per area, tied to the SpatialWeights they were built on.
class AreaVariable {
 public:
  /// Throws InputError if the length differs from w.n() or any value is
  /// not finite.
  AreaVariable(std::vector<double> values, const SpatialWeights& w);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::uint64_t weights_id() const noexcept { return weights_id_; }

  /// Throws InputError unless this variable was built on `w`.
  void require_on(const SpatialWeights& w) const;

  friend bool operator==(const AreaVariable&, const AreaVariable&) = default;

 private:
  AreaVariable(std::vector<double> values, std::uint64_t weights_id)
      : values_(std::move(values)), weights_id_(weights_id) {}
  friend AreaVariable rank_permute(const AreaVariable&, const AreaVariable&);

  std::vector<double> values_;
  std::uint64_t weights_id_;
};

struct SarSpec {
  double rho = 0.0;
  std::uint64_t seed = 0;
};

/// Factorization of (I - rho W), reusable across many innovation draws at a
/// fixed rho. Dense LU up to kDenseLimit areas, sparse LU above.
class SarSolver {
 public:
  static constexpr std::size_t kDenseLimit = 2500;

  /// Throws InputError if |rho| >= 1 and NumericalError if the system is
  /// singular.
  SarSolver(const SpatialWeights& w, double rho);

  double rho() const noexcept { return rho_; }
  std::size_t n() const noexcept { return n_; }

  /// Solves (I - rho W) y = rhs.
  std::vector<double> solve(std::span<const double> rhs) const;

  /// Draws standard-normal innovations from `rng` and solves.
  AreaVariable draw(const SpatialWeights& w, Rng& rng) const;

 private:
  double rho_;
  std::size_t n_;
  std::uint64_t weights_id_;
  std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> dense_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sparse_;
};

/// y = (I - rho W)^-1 eps with eps ~ iid N(0, 1) from Rng(spec.seed).
AreaVariable generate_sar(const SpatialWeights& w, const SarSpec& spec);

/// Concentrated SAR log-likelihood with an intercept, up to a constant:
/// -n/2 log(SSE(rho)/n) + sum_i log|1 - rho lambda_i|.
double sar_log_likelihood(const SpatialWeights& w, std::span<const double> y, double rho);

/// Maximum-likelihood estimate of rho by golden-section search on
/// (-0.999, 0.999) to tolerance 1e-6. Throws DegenerateInputError when the
/// likelihood is not finite (e.g. constant y).
double estimate_rho(const SpatialWeights& w, const AreaVariable& y);

/// Places the values of y_source so their rank order follows x_reference:
/// the largest source value goes to the area with the largest reference
/// value, and so on. Ties in the reference are broken by area index.
AreaVariable rank_permute(const AreaVariable& y_source, const AreaVariable& x_reference);

struct TargetRhoResult {
  AreaVariable variable;
  double estimated_rho;
  int attempts;
};

class RetryExhaustedError : public NumericalError {
 public:
  RetryExhaustedError(const std::string& what, TargetRhoResult best)
      : NumericalError(what), best_(std::move(best)) {}
  /// The attempt whose estimated rho was closest to the target.
  const TargetRhoResult& best() const noexcept { return best_; }

 private:
  TargetRhoResult best_;
};

/// Repeatedly draws a reference SAR field at `target` and rank-permutes
/// y_base onto it until the estimated rho lands in (target - window,
/// target + window). The result has exactly y_base's values.
TargetRhoResult generate_with_target_rho(const SpatialWeights& w, const AreaVariable& y_base,
                                         double target, double window, int max_retries,
                                         std::uint64_t seed);

/// Same, reusing a solver already factorized at the target rho.
TargetRhoResult generate_with_target_rho(const SpatialWeights& w, const SarSolver& reference,
                                         const AreaVariable& y_base, double window,
                                         int max_retries, std::uint64_t seed);

}  // namespace smaup
