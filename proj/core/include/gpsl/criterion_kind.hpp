#pragma once

#include <string>

namespace gpsl {

enum class CriterionKind { Eiv, Imiqr, Maxv, Maxiqr };

// true for criteria defined as integrals over the parameter space (they need
// a quadrature); false for the pointwise maximization heuristics
inline bool is_integrated(CriterionKind k) {
  return k == CriterionKind::Eiv || k == CriterionKind::Imiqr;
}

std::string criterion_name(CriterionKind k);
CriterionKind parse_criterion(const std::string& name);

}  // namespace gpsl
