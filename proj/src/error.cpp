#include "biasamp/error.hpp"

#include <iostream>
#include <mutex>

namespace biasamp {

namespace {
std::mutex g_log_mu;
LogSink& sink() {
  static LogSink s = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return s;
}
}  // namespace

void set_log_sink(LogSink s) {
  std::lock_guard<std::mutex> lk(g_log_mu);
  sink() = std::move(s);
}

void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lk(g_log_mu);
  if (sink()) sink()(msg);
}

}  // namespace biasamp
