#pragma once

#include <string>
#include <vector>

#include "acid/curation.hpp"

namespace fixture {

struct CurationRow {
  const char* label;
  acid::curation::RepositoryProfile profile;
  acid::curation::CurationPolicy policy;
  bool accepted;
  std::vector<std::string> failed;
};

inline acid::curation::CurationPolicy waiver() {
  acid::curation::CurationPolicy p;
  p.enforce_contributors = false;
  return p;
}

inline acid::curation::CurationPolicy forks_allowed() {
  acid::curation::CurationPolicy p;
  p.require_original = false;
  return p;
}

// Twelve boundary profiles: every threshold at, just below and well past its
// inclusive bound, plus the contributor waiver for small teams.
inline std::vector<CurationRow> curation_table() {
  using acid::curation::CurationPolicy;
  const CurationPolicy def;
  return {
      {"all four at threshold", {0.11, false, 2.0, 10}, def, true, {}},
      {"waiver with 4 contributors", {0.11, false, 2.0, 4}, waiver(), true, {}},
      {"low ratio only", {0.05, false, 5.0, 50}, def, false, {"min_iac_ratio"}},
      {"ratio just below", {0.1099, false, 2.0, 10}, def, false, {"min_iac_ratio"}},
      {"fork", {0.11, true, 2.0, 10}, def, false, {"require_original"}},
      {"activity just below", {0.11, false, 1.99, 10}, def, false, {"min_commits_per_month"}},
      {"nine contributors", {0.11, false, 2.0, 9}, def, false, {"min_contributors"}},
      {"nine contributors, waived", {0.11, false, 2.0, 9}, waiver(), true, {}},
      {"fork allowed by policy", {1.0, true, 100.0, 1000}, forks_allowed(), true, {}},
      {"fails everything",
       {0.0, true, 0.0, 0},
       def,
       false,
       {"min_iac_ratio", "require_original", "min_commits_per_month", "min_contributors"}},
      {"zero contributors, waived", {0.11, false, 2.0, 0}, waiver(), true, {}},
      {"fork and idle, waived", {0.5, true, 1.0, 3}, waiver(), false, {"require_original", "min_commits_per_month"}},
  };
}

}  // namespace fixture
