// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

namespace dsa {

using WarningHandler = std::function<void(const std::string&)>;

// Installs a process-wide sink for warnings. Passing an empty handler
// restores the default (stderr). Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

// Emits a warning. Identical messages are only reported once per process
// unless reset_warnings() is called.
void warn(const std::string& message);

void reset_warnings();

}  // namespace dsa
