// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace lwa {

// Exit-code contract used by the CLI: 0 ok, 2 config, 3 unreachable target,
// 4 calibration failure, 5 I/O.

struct config_error : std::runtime_error {
    std::string key_path;
    config_error(const std::string& path, const std::string& msg)
        : std::runtime_error("config error at '" + path + "': " + msg), key_path(path) {}
};

struct degenerate_network_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct unreachable_target_error : std::runtime_error {
    double reachable_lo, reachable_hi;   // degrees
    unreachable_target_error(const std::string& msg, double lo, double hi)
        : std::runtime_error(msg), reachable_lo(lo), reachable_hi(hi) {}
};

struct calibration_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lwa
