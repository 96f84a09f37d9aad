#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "magdirac/config.hpp"
#include "magdirac/error.hpp"

namespace magdirac {

/// Exit status of the command-line tool for an error code:
/// 2 configuration, 4 I/O, 3 everything numerical.
int exit_code_for(Errc code);

/// Cache directory: the config value, else $MAGDIRAC_CACHE, else <out>/cache.
std::filesystem::path resolve_cache_dir(const RunConfig& cfg);

/// Writes <dir>/error.json describing `e`. Best effort; never throws.
void write_error_record(const std::filesystem::path& dir, const Error& e);

/// Runs the configured task, writing <out>/<task>.csv and <out>/run.json.
/// Check tasks throw CheckFailed when a tolerance is missed (after writing
/// their CSV). Progress lines go to `log`.
void run_task(const RunConfig& cfg, std::ostream& log);

/// run_task with errors turned into an error record and an exit status.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace magdirac
