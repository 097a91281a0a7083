#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace derivroots::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Entry point behind the derivroots executable. Subcommands: convergence,
// anticonc, counterexample, moments, perturbation, frostman, jensen,
// validate. Returns 0 on success, 2 for configuration or usage errors, 1
// for failures while running.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Line number (1-based) of the field named by a dotted path such as
// "measure.components[1].weight" in JSON source text, or 0 if not found.
// Keys are matched in sequence, so the result is the first occurrence of
// the last key after the occurrences of its parents.
std::size_t locate_field(const std::string& source, const std::string& path);

// Creates <base>/<name>, <base>/<name>-2, ... and returns the first that
// did not exist.
std::filesystem::path make_unique_directory(const std::filesystem::path& base, const std::string& name);

}  // namespace derivroots::cli
