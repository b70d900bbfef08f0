// Copyright 2026 The IEFF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IEFF_SERVICE_H_
#define IEFF_SERVICE_H_

// The /v1 wire API over a live simulation session.
//
// SimulationService is transport-free: handle() maps an ApiRequest to an
// ApiResponse. HttpServer adapts it to HTTP. Reads are served from an
// immutable view that the writer republishes after every mutation, so readers
// never block on the simulation.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "ieff/command_queue.h"
#include "ieff/harness.h"
#include "ieff/serialization.h"

namespace httplib {
class Server;
}

namespace ieff {

struct ApiRequest {
  std::string method;  // GET, POST, PATCH or DELETE
  std::string path;    // e.g. /v1/rollouts/rollout-1/pause
  std::map<std::string, std::string> query;
  std::string body;
  // X-Request-Id; the server assigns one when empty.
  std::string request_id;
  // Idempotency-Key; replays of a keyed mutation return the first response.
  std::string idempotency_key;
};

struct ApiResponse {
  int status = 200;
  // Envelope: payload (or error), day, snapshot_version, request_id.
  Json body;
};

// HTTP status used for each error code.
int http_status_for(ErrorCode code);

class SimulationService {
 public:
  SimulationService(WorldConfig world, ScenarioConfig scenario);
  ~SimulationService();

  SimulationService(const SimulationService&) = delete;
  SimulationService& operator=(const SimulationService&) = delete;

  ApiResponse handle(const ApiRequest& request);

  // Report of everything simulated so far, taken on the writer.
  RunReport report();

  bool auto_stepping() const;

 private:
  struct View;
  using Action = std::function<Json()>;

  std::shared_ptr<const View> view() const;
  void publish_view();
  ApiResponse read(const ApiRequest& request, const std::string& id_echo);
  ApiResponse mutate(const ApiRequest& request, const std::string& id_echo);
  Json step_days(int days);
  Json rollout_view(const Rollout& rollout) const;
  ApiResponse envelope(int status, Json payload, const std::string& id_echo) const;
  ApiResponse error(int status, std::string_view code, const std::string& message,
                    const std::string& id_echo) const;
  Json start_auto(double seconds_per_day);
  Json stop_auto();
  Json auto_status() const;

  Simulation sim_;
  std::shared_ptr<const View> view_;
  // Writer-only.
  std::map<std::string, std::pair<std::string, ApiResponse>> idempotent_;
  std::atomic<std::uint64_t> next_request_{1};

  std::mutex auto_mu_;
  std::condition_variable auto_cv_;
  bool auto_stop_ = false;
  std::atomic<double> seconds_per_day_{0.0};
  std::atomic<bool> auto_running_{false};
  std::thread auto_thread_;

  // Declared last: destroyed first, after the timer has been joined.
  CommandQueue queue_;
};

// Binds the service to HTTP. Address forms: "host:port", ":port" or "port";
// port 0 selects a free port.
class HttpServer {
 public:
  explicit HttpServer(SimulationService& service);
  ~HttpServer();

  // Returns the bound port. Throws kIoError when the address cannot be bound.
  int bind(const std::string& address);
  // Serves until stop().
  void listen();
  void stop();

 private:
  SimulationService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace ieff

#endif  // IEFF_SERVICE_H_
