#ifndef WGF_DRIVER_HPP
#define WGF_DRIVER_HPP

#include <string>

namespace wgf {

/// Exit codes: 0 success, 2 validation failure, 3 solver failure,
/// 4 failed diagnostic assertion (diagnose only).
int cmd_run(const std::string& config_path, const std::string& out_override,
            bool override_tau_guard, bool quiet);

int cmd_compare(const std::string& config_path, const std::string& out_override,
                bool override_tau_guard, bool quiet);

int cmd_diagnose(const std::string& artifact_dir, bool quiet);

} // namespace wgf

#endif
