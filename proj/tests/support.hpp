#pragma once

#include <filesystem>
#include <string>

#include "phishpond/error.hpp"

namespace testsupport {

inline std::filesystem::path data_dir() { return PHISHPOND_DATA_DIR; }
inline std::filesystem::path example(const std::string& name) {
  return data_dir() / "examples" / name;
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag);
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Runs f and returns the Errc it threw; fails the check otherwise.
template <typename F>
phishpond::Errc error_of(F&& f) {
  try {
    f();
  } catch (const phishpond::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected phishpond::Error");
}

}  // namespace testsupport
