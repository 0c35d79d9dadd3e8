#pragma once

#include <optional>

namespace fluxlat {

struct MicroParams {
  double lambda = 0.0;  // Gauss penalty
  double mu = 0.0;      // link field energy
  double omega = 0.0;   // hopping amplitude
};

/// Coupling in either the QED form (g^2) or the microscopic rotor form
/// (lambda, mu, omega). The two are bridged by g^4 = lambda*mu / (2 omega^2),
/// with the energy scale U0 = 2 mu / g^2 relating the dimensionless
/// Kogut-Susskind Hamiltonian to microscopic units.
class CouplingParams {
 public:
  CouplingParams() = default;

  static CouplingParams from_g2(double g2);
  static CouplingParams from_micro(double lambda, double mu, double omega);

  bool has_value() const { return g2_.has_value() || micro_.has_value(); }
  bool is_micro() const { return micro_.has_value(); }
  const MicroParams& micro() const;

  /// g^2, direct or via the bridge relation.
  double g2() const;

  /// U0 = 2 mu / g^2 (microscopic form only).
  double u0() const;

  /// lambda/mu and lambda/omega both at least min_ratio.
  bool in_qed_regime(double min_ratio = 100.0) const;

 private:
  std::optional<double> g2_;
  std::optional<MicroParams> micro_;
};

}  // namespace fluxlat
