#pragma once

#include "slice/parser.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace slice::test {

inline const std::vector<std::string> kCorpus = {"cut_choose", "surplus", "selfridge_conway",
                                                 "selfridge_conway_surplus", "waste_makes_haste"};

inline std::string corpus_path(const std::string& name) {
  return std::string(SLICE_SOURCE_DIR) + "/corpus/" + name + ".slice";
}

inline std::string source_path(const std::string& rel) { return std::string(SLICE_SOURCE_DIR) + "/" + rel; }

inline Program corpus_program(const std::string& name) { return load_program(corpus_path(name)); }

inline ExprPtr corpus_expr(const std::string& name) { return desugar(corpus_program(name)); }

inline ExprPtr parse_expr(const std::string& text) { return desugar(parse(text)); }

// A directory holding a shell script posing as a solver, put at the front of
// SLICE_SOLVER_PATH for the lifetime of the object.
class FakeSolver {
 public:
  FakeSolver(const std::string& name, const std::string& body) {
    std::string templ = (std::filesystem::temp_directory_path() / "slice-fake-XXXXXX").string();
    dir_ = ::mkdtemp(templ.data());
    std::filesystem::path bin = std::filesystem::path(dir_) / name;
    std::ofstream(bin) << "#!/bin/sh\n" << body << "\n";
    std::filesystem::permissions(bin, std::filesystem::perms::owner_all);
    const char* old = std::getenv("SLICE_SOLVER_PATH");
    had_old_ = old != nullptr;
    if (old) old_ = old;
    ::setenv("SLICE_SOLVER_PATH", (dir_ + (old ? ":" + old_ : "")).c_str(), 1);
  }
  ~FakeSolver() {
    if (had_old_)
      ::setenv("SLICE_SOLVER_PATH", old_.c_str(), 1);
    else
      ::unsetenv("SLICE_SOLVER_PATH");
    std::filesystem::remove_all(dir_);
  }
  FakeSolver(const FakeSolver&) = delete;
  FakeSolver& operator=(const FakeSolver&) = delete;

 private:
  std::string dir_, old_;
  bool had_old_ = false;
};

}  // namespace slice::test
