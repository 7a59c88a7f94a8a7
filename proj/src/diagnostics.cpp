// SPDX-License-Identifier: Apache-2.0
#include "dsa/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace dsa {
namespace {

std::mutex& warn_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler_slot() {
  static WarningHandler h;
  return h;
}

std::set<std::string>& seen() {
  static std::set<std::string> s;
  return s;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(warn_mutex());
  WarningHandler old = std::move(handler_slot());
  handler_slot() = std::move(handler);
  return old;
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(warn_mutex());
  if (!seen().insert(message).second) return;
  if (handler_slot()) {
    handler_slot()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

void reset_warnings() {
  std::lock_guard<std::mutex> lock(warn_mutex());
  seen().clear();
}

}  // namespace dsa
