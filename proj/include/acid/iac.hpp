#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "acid/error.hpp"
#include "acid/vcs.hpp"

namespace acid::iac {

enum class Platform { Pulumi, AwsCdk, TerraformCdk, TerraformHcl, NotIac };

enum class Language { TypeScriptLike, PythonLike, GoLike, CSharpLike, JavaLike, FSharpLike, VBLike, HCL, Unknown };

struct IacProgramKind {
  Platform kind = Platform::NotIac;
  Language language = Language::Unknown;

  bool is_iac() const { return kind != Platform::NotIac; }
  friend bool operator==(const IacProgramKind&, const IacProgramKind&) = default;
};

constexpr std::string_view to_string(Platform p) {
  switch (p) {
    case Platform::Pulumi: return "Pulumi";
    case Platform::AwsCdk: return "AwsCdk";
    case Platform::TerraformCdk: return "TerraformCdk";
    case Platform::TerraformHcl: return "TerraformHcl";
    case Platform::NotIac: return "NotIac";
  }
  return "";
}

constexpr std::string_view to_string(Language l) {
  switch (l) {
    case Language::TypeScriptLike: return "TypeScript-like";
    case Language::PythonLike: return "Python-like";
    case Language::GoLike: return "Go-like";
    case Language::CSharpLike: return "CSharp-like";
    case Language::JavaLike: return "Java-like";
    case Language::FSharpLike: return "F#-like";
    case Language::VBLike: return "VB-like";
    case Language::HCL: return "HCL";
    case Language::Unknown: return "Unknown";
  }
  return "";
}

inline std::optional<Platform> parse_platform(std::string_view s) {
  for (Platform p : {Platform::Pulumi, Platform::AwsCdk, Platform::TerraformCdk, Platform::TerraformHcl,
                     Platform::NotIac}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

inline std::optional<Language> parse_language(std::string_view s) {
  for (Language l : {Language::TypeScriptLike, Language::PythonLike, Language::GoLike, Language::CSharpLike,
                     Language::JavaLike, Language::FSharpLike, Language::VBLike, Language::HCL,
                     Language::Unknown}) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

/// Lower-cased extension including the dot, or "" when there is none.
inline std::string extension_of(std::string_view path) {
  auto slash = path.rfind('/');
  std::string_view base = slash == std::string_view::npos ? path : path.substr(slash + 1);
  auto dot = base.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return {};
  std::string ext(base.substr(dot));
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

inline Language language_of(std::string_view path) {
  static const std::map<std::string, Language, std::less<>> table{
      {".ts", Language::TypeScriptLike},  {".tsx", Language::TypeScriptLike}, {".js", Language::TypeScriptLike},
      {".jsx", Language::TypeScriptLike}, {".mjs", Language::TypeScriptLike}, {".cjs", Language::TypeScriptLike},
      {".py", Language::PythonLike},      {".go", Language::GoLike},          {".cs", Language::CSharpLike},
      {".java", Language::JavaLike},      {".fs", Language::FSharpLike},      {".fsx", Language::FSharpLike},
      {".vb", Language::VBLike},          {".tf", Language::HCL},
  };
  auto it = table.find(extension_of(path));
  return it == table.end() ? Language::Unknown : it->second;
}

inline constexpr std::string_view kDefaultLanguageTable = R"(# Officially supported source extensions per PL-IaC platform.
# key = platform, value = whitespace-separated extension list
Pulumi       = .ts .tsx .js .mjs .cjs .py .go .cs .java .fs .fsx .vb
AwsCdk       = .ts .js .py .go .cs .java
TerraformCdk = .ts .py .go .cs .java
)";

/// Platform -> supported extensions.
class LanguageTable {
 public:
  static LanguageTable parse(std::string_view text) {
    LanguageTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto eq = line.find('=');
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (eq == std::string::npos)
        throw Error(ErrorKind::FormatError, "language table line " + std::to_string(line_no) + ": missing '='");
      std::istringstream key_in(line.substr(0, eq));
      std::string key;
      key_in >> key;
      auto platform = parse_platform(key);
      if (!platform || *platform == Platform::NotIac || *platform == Platform::TerraformHcl)
        throw Error(ErrorKind::FormatError,
                    "language table line " + std::to_string(line_no) + ": unknown platform '" + key + "'");
      std::istringstream values(line.substr(eq + 1));
      std::string ext;
      auto& set = table.supported_[*platform];
      while (values >> ext) {
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext.front() != '.') ext.insert(ext.begin(), '.');
        set.insert(ext);
      }
    }
    return table;
  }

  static LanguageTable from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read language table " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static const LanguageTable& defaults() {
    static const LanguageTable table = parse(kDefaultLanguageTable);
    return table;
  }

  bool supports(Platform platform, std::string_view extension) const {
    auto it = supported_.find(platform);
    return it != supported_.end() && it->second.contains(std::string(extension));
  }

 private:
  std::map<Platform, std::set<std::string>> supported_;
};

/// Directory ("" for the root) -> platform named by its marker file.
using MarkerDirs = std::map<std::string, Platform>;

inline std::string parent_dir(std::string_view path) {
  auto slash = path.rfind('/');
  return slash == std::string_view::npos ? std::string{} : std::string(path.substr(0, slash));
}

inline std::optional<Platform> marker_platform(std::string_view basename) {
  if (basename == "Pulumi.yaml" || basename == "Pulumi.yml") return Platform::Pulumi;
  if (basename == "cdk.json") return Platform::AwsCdk;
  if (basename == "cdktf.json") return Platform::TerraformCdk;
  return std::nullopt;
}

/// When one directory holds several markers, Pulumi wins over AwsCdk over TerraformCdk.
inline MarkerDirs find_markers(const std::vector<std::string>& tree) {
  MarkerDirs markers;
  for (const auto& path : tree) {
    auto slash = path.rfind('/');
    std::string_view base = slash == std::string::npos ? std::string_view(path) : std::string_view(path).substr(slash + 1);
    auto platform = marker_platform(base);
    if (!platform) continue;
    auto [it, inserted] = markers.emplace(parent_dir(path), *platform);
    if (!inserted && static_cast<int>(*platform) < static_cast<int>(it->second)) it->second = *platform;
  }
  return markers;
}

inline IacProgramKind classify_file(std::string_view path, const MarkerDirs& markers,
                                    const LanguageTable& languages = LanguageTable::defaults()) {
  const std::string ext = extension_of(path);
  if (ext == ".tf") return {Platform::TerraformHcl, Language::HCL};
  const Language lang = language_of(path);
  if (lang == Language::Unknown) return {};

  // Deepest marker directory containing the file.
  std::string dir = parent_dir(path);
  while (true) {
    auto it = markers.find(dir);
    if (it != markers.end()) {
      if (languages.supports(it->second, ext)) return {it->second, lang};
      return {};
    }
    if (dir.empty()) return {};
    dir = parent_dir(dir);
  }
}

struct RepoIacProfile {
  std::size_t total_files = 0;
  std::size_t iac_files = 0;
  double iac_ratio = 0.0;
  std::set<std::string> program_paths;
  MarkerDirs markers;
};

inline RepoIacProfile profile_repo(const std::vector<std::string>& tree,
                                   const LanguageTable& languages = LanguageTable::defaults()) {
  if (tree.empty()) throw Error(ErrorKind::EmptyTree, "repository tree has no files");
  RepoIacProfile profile;
  profile.markers = find_markers(tree);
  std::set<std::string_view> seen;
  for (const auto& path : tree) {
    if (!seen.insert(path).second) continue;
    if (classify_file(path, profile.markers, languages).is_iac()) profile.program_paths.insert(path);
  }
  profile.total_files = seen.size();
  profile.iac_files = profile.program_paths.size();
  profile.iac_ratio = static_cast<double>(profile.iac_files) / static_cast<double>(std::max<std::size_t>(1, profile.total_files));
  return profile;
}

inline bool is_iac_path(std::string_view path, const RepoIacProfile& profile,
                        const LanguageTable& languages = LanguageTable::defaults()) {
  return profile.program_paths.contains(std::string(path)) ||
         classify_file(path, profile.markers, languages).is_iac();
}

/// True when any touched path is an IaC program; files gone from the head tree
/// fall back to head markers plus their extension.
inline bool is_iac_commit(const vcs::CommitRecord& commit, const RepoIacProfile& profile,
                          const LanguageTable& languages = LanguageTable::defaults()) {
  return std::any_of(commit.file_changes.begin(), commit.file_changes.end(),
                     [&](const vcs::FileChange& fc) { return is_iac_path(fc.path, profile, languages); });
}

}  // namespace acid::iac
