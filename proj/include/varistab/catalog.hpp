#pragma once

// Built-in instances: generalized equations, parametric optimization problems
// and analytic scalar functions, each with its reference point and the check
// configuration it is meant to run with.

#include <optional>
#include <string>
#include <vector>

#include "varistab/dual.hpp"
#include "varistab/geneq.hpp"
#include "varistab/optstab.hpp"
#include "varistab/oracle.hpp"
#include "varistab/stability.hpp"

namespace varistab {

struct CatalogEntry {
  std::string id;
  std::string description;
  /// Listed by the catalog command (the remaining entries are controls).
  bool builtin = false;
  std::optional<GenEqProblem> geneq;
  std::optional<ParamOptProblem> opt;
  /// Exact solution mapping, when it is known in closed form.
  std::optional<SetValuedMap> mapping;
  CheckConfig config;
  /// Expected outcome of check_liplsc / check_calm on the generalized
  /// equation (documentation for tests and the README).
  std::optional<Outcome> expect_liplsc, expect_calm;
};

/// Graph X x {0} of the zero field, one polyhedral piece in (x, y).
GraphRep zero_field_graph(std::size_t dx, std::size_t dy);

/// Ids of the listed built-ins, in catalog order.
std::vector<std::string> builtin_ids();
/// Every id, built-ins first.
std::vector<std::string> catalog_ids();
/// Throws ContractViolation for an unknown id.
CatalogEntry catalog_entry(const std::string& id);
/// Entries carrying a generalized equation / an optimization problem.
std::vector<CatalogEntry> geneq_catalog();
std::vector<CatalogEntry> opt_catalog();

struct NamedFunction {
  std::string id;
  CatalogFunction fn;
  Vector reference;
};

/// Analytic functions (lsc) used by the slope/subdifferential comparisons.
std::vector<NamedFunction> function_catalog();

}  // namespace varistab
