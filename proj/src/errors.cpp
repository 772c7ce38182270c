#include "pml/errors.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace pml {

namespace {
std::mutex g_warn_mutex;
WarningHandler g_handler;
}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  g_handler = std::move(handler);
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  if (g_handler) {
    g_handler(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

}  // namespace pml
