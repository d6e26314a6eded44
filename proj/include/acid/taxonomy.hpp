#pragma once

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace acid {

// The eight defect categories, in reporting order.
enum class Category {
  Conditional,
  ConfigurationData,
  Dependency,
  Documentation,
  Idempotency,
  Security,
  Service,
  Syntax,
};

inline constexpr std::array<Category, 8> kAllCategories{
    Category::Conditional,   Category::ConfigurationData, Category::Dependency,
    Category::Documentation, Category::Idempotency,       Category::Security,
    Category::Service,       Category::Syntax,
};

enum class Subcategory {
  // ConfigurationData
  Cache,
  Credential,
  FileSystem,
  Network,
  Storage,
  // Service
  Resource,
  Panic,
};

inline constexpr std::array<Subcategory, 7> kAllSubcategories{
    Subcategory::Cache,   Subcategory::Credential, Subcategory::FileSystem, Subcategory::Network,
    Subcategory::Storage, Subcategory::Resource,   Subcategory::Panic,
};

constexpr Category parent_of(Subcategory sub) {
  switch (sub) {
    case Subcategory::Resource:
    case Subcategory::Panic:
      return Category::Service;
    default:
      return Category::ConfigurationData;
  }
}

constexpr bool has_subcategories(Category c) {
  return c == Category::ConfigurationData || c == Category::Service;
}

constexpr std::size_t index_of(Category c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index_of(Subcategory s) { return static_cast<std::size_t>(s); }

/// Identifier form, used in JSON, rule files and label strings.
constexpr std::string_view id_of(Category c) {
  switch (c) {
    case Category::Conditional: return "Conditional";
    case Category::ConfigurationData: return "ConfigurationData";
    case Category::Dependency: return "Dependency";
    case Category::Documentation: return "Documentation";
    case Category::Idempotency: return "Idempotency";
    case Category::Security: return "Security";
    case Category::Service: return "Service";
    case Category::Syntax: return "Syntax";
  }
  return "";
}

/// Human-readable form, used in CSV tables.
constexpr std::string_view display_name(Category c) {
  if (c == Category::ConfigurationData) return "Configuration Data";
  return id_of(c);
}

constexpr std::string_view id_of(Subcategory s) {
  switch (s) {
    case Subcategory::Cache: return "Cache";
    case Subcategory::Credential: return "Credential";
    case Subcategory::FileSystem: return "FileSystem";
    case Subcategory::Network: return "Network";
    case Subcategory::Storage: return "Storage";
    case Subcategory::Resource: return "Resource";
    case Subcategory::Panic: return "Panic";
  }
  return "";
}

namespace detail {
inline std::string fold_name(std::string_view name) {
  std::string out;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}
}  // namespace detail

/// Accepts "ConfigurationData", "Configuration Data", "configuration_data", ...
inline std::optional<Category> parse_category(std::string_view name) {
  const std::string folded = detail::fold_name(name);
  for (Category c : kAllCategories) {
    if (detail::fold_name(id_of(c)) == folded) return c;
  }
  return std::nullopt;
}

inline std::optional<Subcategory> parse_subcategory(std::string_view name) {
  const std::string folded = detail::fold_name(name);
  for (Subcategory s : kAllSubcategories) {
    if (detail::fold_name(id_of(s)) == folded) return s;
  }
  return std::nullopt;
}

}  // namespace acid
