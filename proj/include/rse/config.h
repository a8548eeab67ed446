#ifndef RSE_CONFIG_H_
#define RSE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rse {

// Flat `key = value` experiment configuration. `#` starts a comment; later
// assignments override earlier ones.
class Config {
 public:
  static Config Parse(std::string_view text);
  static Config Load(const std::filesystem::path& path);

  void Set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  std::string GetString(const std::string& key, const std::string& def) const;
  std::string RequireString(const std::string& key) const;
  double GetDouble(const std::string& key, double def) const;
  int GetInt(const std::string& key, int def) const;
  std::uint64_t GetUint(const std::string& key, std::uint64_t def) const;
  bool GetBool(const std::string& key, bool def) const;
  // Comma-separated list.
  std::vector<std::string> GetList(const std::string& key,
                                   const std::vector<std::string>& def) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  // Sorted `key=value` lines; identical settings give identical text.
  std::string Canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace rse

#endif  // RSE_CONFIG_H_
