// cli.hpp - the spikealloc command line (gen, solve, rank, bench).
#ifndef SPIKEALLOC_CLI_HPP
#define SPIKEALLOC_CLI_HPP

#include <ostream>

namespace spikealloc::cli
{

// Directory for generated files when --out is not given.
inline constexpr const char *kOutDirEnv = "SPIKEALLOC_OUT_DIR";

enum ExitCode : int
{
    exit_ok = 0,
    exit_failure = 1, // I/O, parse or constraint error
    exit_usage = 2,   // bad flags or configuration
    exit_timeout = 3, // loihi run hit max_ticks
    exit_budget = 4,  // oracle refused the search
};

// Runs one command line. Data goes to out, diagnostics to err.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace spikealloc::cli

#endif
