#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "freeprob/measure.hpp"

namespace freeprob {

enum ExitCode { kExitOk = 0, kExitComputation = 1, kExitUsage = 2, kExitVerificationFailed = 3 };

// Runs the command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

// CSV path, or an inline spec such as semicircle:r=2, nu:lambda=8, power:alpha=1, uniform:a=-1,b=1,
// uniform-circle, quarter-circle:r=2, marchenko-pastur:rho=1, spike:k=2,n=8.
GridMeasure parse_measure(const std::string& spec, size_t cells);

// Writes through a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// One tidy CSV per JSON-lines report file in the directory; returns the files written.
std::vector<std::filesystem::path> export_plot_data(const std::filesystem::path& dir);

}  // namespace freeprob
