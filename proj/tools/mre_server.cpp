// mre-server: hosts interactive training sessions over TCP.
// The bind address comes from MRE_BIND (host:port), default 127.0.0.1:7878.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

#include "mre/bridge/server.hpp"

namespace {
volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bridge server for interactive training sessions"};
  mre::bridge::ServerOptions base;
  base.port = 7878;
  app.add_option("--tick-rate", base.tick_rate, "Ticks per second in realtime pace")
      ->check(CLI::Range(0.1, 1000.0));
  app.add_option("--model-dir", base.model_dir, "Directory for saved models");
  app.add_option("--frame-queue", base.frame_queue, "Frames buffered per client before dropping")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto options = mre::bridge::options_from_env(base);
    mre::bridge::BridgeServer server(options);
    server.start();
    std::cout << "listening on " << options.host << ":" << server.port() << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
