#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mis/certifier.hpp"
#include "mis/config.hpp"
#include "mis/solver.hpp"

namespace mis::cli {

/// Shell data laid out on the grid: radial uses state_at(r); planar mirrors it
/// with u(x) = sign(x) sigma s(|x|).
Profile shell_profile(const ShellData& data, GridKind mode);

struct PreparedRun {
    RunSetup setup;
    double T_upper = 0.0;  // NaN when the background sound speed is unusable
    std::vector<std::string> notes;
};

/// Monitor constants for a run of the shell data, independent of whether the
/// data certifies.
PreparedRun prepare_shell_run(const ShellData& data, const ConstitutiveSet& set, const CertifyOptions& opts);

/// Subcommand dispatch; returns the process exit code.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mis::cli
