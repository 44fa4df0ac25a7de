#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "plantsim/plant_models.hpp"

namespace httplib {
class Server;
}

namespace plantsim::service {

inline constexpr int kMaxBatch = 1000;

// Named override maps, one per UI session.
class SessionStore {
 public:
  void put(const std::string& name, const std::string& preset, const models::Overrides& overrides);
  bool get(const std::string& name, std::string& preset, models::Overrides& overrides) const;
  bool erase(const std::string& name);

 private:
  struct Entry {
    std::string preset;
    models::Overrides overrides;
  };
  mutable std::mutex mu_;
  std::map<std::string, Entry> sessions_;
};

struct Options {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path ui_dir;  // served at / when it exists
};

// Default port: PLANTSIM_PORT when set and valid, else 8080.
int default_port();

class Service {
 public:
  explicit Service(Options options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the socket and returns the bound port; throws plantsim::Error.
  int bind();
  // Serves until stop(); call after bind().
  void run();
  void stop();
  int port() const { return port_; }

 private:
  Options options_;
  std::unique_ptr<httplib::Server> server_;
  SessionStore sessions_;
  int port_ = 0;
};

}  // namespace plantsim::service
