#include "fluxlat/coupling.hpp"

#include <cmath>
#include <string>

#include "fluxlat/errors.hpp"

namespace fluxlat {

CouplingParams CouplingParams::from_g2(double g2) {
  if (!(g2 > 0.0)) throw ValidationError("coupling g2 must be positive");
  CouplingParams p;
  p.g2_ = g2;
  return p;
}

CouplingParams CouplingParams::from_micro(double lambda, double mu, double omega) {
  if (!(lambda > 0.0) || !(mu > 0.0) || !(omega > 0.0))
    throw ValidationError("microscopic couplings lambda, mu, omega must all be positive");
  CouplingParams p;
  p.micro_ = MicroParams{lambda, mu, omega};
  return p;
}

const MicroParams& CouplingParams::micro() const {
  if (!micro_) throw ValidationError("operation requires the microscopic coupling form");
  return *micro_;
}

double CouplingParams::g2() const {
  if (g2_) return *g2_;
  if (micro_) return std::sqrt(micro_->lambda * micro_->mu / 2.0) / micro_->omega;
  throw ValidationError("no coupling parameters set");
}

double CouplingParams::u0() const {
  const auto& m = micro();
  return 2.0 * m.mu / g2();
}

bool CouplingParams::in_qed_regime(double min_ratio) const {
  const auto& m = micro();
  return m.lambda / m.mu >= min_ratio && m.lambda / m.omega >= min_ratio;
}

}  // namespace fluxlat
