#pragma once

// Bundled domains, forms, loops and covers, addressable by name from
// scenario files and the command line.

#include <string>
#include <vector>

#include "itint/cover.hpp"
#include "itint/geometry.hpp"
#include "itint/paths.hpp"

namespace itint::fixtures {

struct CatalogEntry {
  std::string kind;  // "domain", "form", "loop" or "cover"
  std::string name;
  std::string description;
};

std::vector<CatalogEntry> catalog();

// Throws DomainError for unknown names. Domains are shared singletons.
DomainPtr domain(const std::string& name);
bool has_domain(const std::string& name);

// Forms are closed-form expressions in the planar coordinates x, y and can
// be placed on any 2-dimensional domain where they are defined.
OneForm form(const std::string& name, const DomainPtr& on);
bool has_form(const std::string& name);
// Coefficient expressions as text, e.g. {"-y/(x^2+y^2)", "x/(x^2+y^2)"}.
std::vector<std::string> form_expressions(const std::string& name);

SampledPath loop(const std::string& name);
SampledPath loop(const std::string& name, const DomainPtr& on);
bool has_loop(const std::string& name);

// Covers are built once and live for the whole program.
const CoverSpace& cover(const std::string& name);
bool has_cover(const std::string& name);

}  // namespace itint::fixtures
