#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace acid::curation {

struct RepositoryProfile {
  double iac_ratio = 0.0;
  bool is_fork_or_clone = false;
  double commits_per_month = 0.0;
  std::size_t contributor_count = 0;
};

/// Repository inclusion thresholds. All comparisons are inclusive.
struct CurationPolicy {
  double min_iac_ratio = 0.11;
  bool require_original = true;
  double min_commits_per_month = 2.0;
  std::size_t min_contributors = 10;
  // Off for proprietary teams, which are commonly smaller than the threshold.
  bool enforce_contributors = true;
};

inline constexpr const char* kMinIacRatio = "min_iac_ratio";
inline constexpr const char* kRequireOriginal = "require_original";
inline constexpr const char* kMinCommitsPerMonth = "min_commits_per_month";
inline constexpr const char* kMinContributors = "min_contributors";

struct CurationVerdict {
  bool accepted = false;
  std::vector<std::string> failed_criteria;
};

inline CurationVerdict evaluate_repo(const RepositoryProfile& profile, const CurationPolicy& policy) {
  CurationVerdict verdict;
  if (profile.iac_ratio < policy.min_iac_ratio) verdict.failed_criteria.emplace_back(kMinIacRatio);
  if (policy.require_original && profile.is_fork_or_clone) verdict.failed_criteria.emplace_back(kRequireOriginal);
  if (profile.commits_per_month < policy.min_commits_per_month)
    verdict.failed_criteria.emplace_back(kMinCommitsPerMonth);
  if (policy.enforce_contributors && profile.contributor_count < policy.min_contributors)
    verdict.failed_criteria.emplace_back(kMinContributors);
  verdict.accepted = verdict.failed_criteria.empty();
  return verdict;
}

}  // namespace acid::curation
