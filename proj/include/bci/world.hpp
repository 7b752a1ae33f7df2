#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bci/interference.hpp"

namespace bci {

enum class WorldFamily { Table, Linear, Interactive, Threshold };

// Ground-truth simulation object: deterministic potential outcomes
// Y_j(a_{T_j}) for every outcome unit, depending only on the treatments of
// its interference set. Allocation codes index the sorted T_j: bit b is the
// treatment of the b-th member, matching enumerate_allocations order.
// Nothing in the estimator reads this type.
class PotentialOutcomeWorld {
 public:
  static PotentialOutcomeWorld linear(InterferenceMapping mapping,
                                      std::vector<double> intercepts,
                                      std::vector<std::vector<double>> coefs);
  // intercept + linear part + gamma_j * sum_{b<b'} a_b a_b'
  static PotentialOutcomeWorld interactive(InterferenceMapping mapping,
                                           std::vector<double> intercepts,
                                           std::vector<std::vector<double>> coefs,
                                           std::vector<double> gamma);
  // scale_j * 1{ #treated in T_j >= q_j }
  static PotentialOutcomeWorld threshold(InterferenceMapping mapping,
                                         std::vector<double> scale,
                                         std::vector<int> q);
  // Explicit tables, tables[j] has exactly 2^{|T_j|} entries.
  static PotentialOutcomeWorld table(InterferenceMapping mapping,
                                     std::vector<std::vector<double>> tables);

  const InterferenceMapping& mapping() const { return mapping_; }
  WorldFamily family() const { return family_; }

  // Potential outcome for restricted allocation code over sorted T_j.
  double outcome(int j, std::uint64_t code) const;

  // Potential outcome for a full length-P allocation (restricts to T_j).
  double outcome_global(int j, const std::vector<std::uint8_t>& a) const;

  // Accessors for serialization.
  const std::vector<double>& intercepts() const { return intercepts_; }
  const std::vector<std::vector<double>>& coefs() const { return coefs_; }
  const std::vector<double>& gamma() const { return gamma_; }
  const std::vector<double>& scale() const { return scale_; }
  const std::vector<int>& q() const { return q_; }
  const std::vector<std::vector<double>>& tables() const { return tables_; }

 private:
  explicit PotentialOutcomeWorld(InterferenceMapping mapping)
      : mapping_(std::move(mapping)) {}

  InterferenceMapping mapping_;
  WorldFamily family_ = WorldFamily::Linear;
  std::vector<double> intercepts_;
  std::vector<std::vector<double>> coefs_;
  std::vector<double> gamma_;
  std::vector<double> scale_;
  std::vector<int> q_;
  std::vector<std::vector<double>> tables_;
};

struct SutvaCheck {
  bool ok = true;
  // Counterexample: (j, a, a') agreeing on T_j with different outcomes.
  int j = -1;
  std::vector<std::uint8_t> a, a2;
};

// Exhaustive check of structured SUTVA part (ii) for an arbitrary global
// outcome function: for each j, varying coordinates outside T_j must not
// change the outcome. Requires P <= cap.
SutvaCheck verify_structured_sutva(
    const InterferenceMapping& mapping,
    const std::function<double(int, const std::vector<std::uint8_t>&)>& fn,
    int cap = 20);

// Sampled variant for large P: checks `pairs` random allocation pairs per
// outcome unit that agree on T_j.
SutvaCheck verify_structured_sutva_sampled(
    const InterferenceMapping& mapping,
    const std::function<double(int, const std::vector<std::uint8_t>&)>& fn,
    int pairs, std::uint64_t seed);

}  // namespace bci
