#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dphase/domain.hpp"
#include "dphase/eigensolver.hpp"
#include "dphase/weights.hpp"

namespace dphase::cli {

enum class ValueType { real, integer, text, boolean, int_list };

struct KeySpec {
  std::string name;
  ValueType type;
  std::string fallback;  // empty: no default, readers supply one
  std::string help;
};

/// Every key the tool understands.
const std::vector<KeySpec>& known_keys();

/// Flat `key = value` settings with dotted section names. Values are checked
/// against their key's type when set; unknown keys are rejected.
class RunConfig {
 public:
  RunConfig();

  /// `#` starts a comment; blank lines are skipped.
  void load_file(const std::string& path);
  void load_text(const std::string& text, const std::string& origin = "<text>");
  void set(const std::string& key, const std::string& value);
  /// "key=value".
  void assign(const std::string& assignment);

  bool is_set(const std::string& key) const { return explicit_.count(key) > 0; }
  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<int> int_list(const std::string& key) const;

  double real_or(const std::string& key, double fallback) const { return is_set(key) ? real(key) : fallback; }
  long integer_or(const std::string& key, long fallback) const { return is_set(key) ? integer(key) : fallback; }
  std::string text_or(const std::string& key, const std::string& fallback) const {
    return is_set(key) ? text(key) : fallback;
  }

  /// `fallback` with every explicitly set mesh.* key applied.
  DomainSpec domain(DomainSpec fallback) const;
  SolverOptions solver() const;
  WeightSpec weight() const;

 private:
  const KeySpec& spec(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::set<std::string> explicit_;
};

}  // namespace dphase::cli
