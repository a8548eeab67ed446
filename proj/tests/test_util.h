#ifndef RSE_TESTS_TEST_UTIL_H_
#define RSE_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rse/attacks.h"
#include "rse/corpus.h"
#include "rse/lexicon.h"

namespace rse::testing {

inline std::filesystem::path SourcePath(const std::string& rel) {
  return std::filesystem::path(RSE_SOURCE_DIR) / rel;
}

inline std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rse_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Oracle backed by an arbitrary function of the tokens.
class FunctionOracle : public ProbabilityOracle {
 public:
  using Fn = std::function<std::vector<double>(std::span<const std::string>)>;
  explicit FunctionOracle(Fn fn) : fn_(std::move(fn)) {}
  std::vector<double> Query(std::span<const std::string> tokens) override {
    return fn_(tokens);
  }

 private:
  Fn fn_;
};

}  // namespace rse::testing

#endif  // RSE_TESTS_TEST_UTIL_H_
