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

#include "ieff/service.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <vector>

#include "httplib.h"

namespace ieff {
namespace {

constexpr int kMaxStepDays = 10000;

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const std::size_t j = path.find('/', i);
    out.push_back(path.substr(i, j == std::string::npos ? std::string::npos : j - i));
    i = j == std::string::npos ? path.size() : j;
  }
  return out;
}

int parse_int(const std::string& text, const std::string& what) {
  int value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, what + " must be an integer, got '" + text + "'");
  }
  return value;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json j = parse_json(body, "request body");
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "request body must be a JSON object");
  return j;
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kFeatureConflict:
    case ErrorCode::kIllegalTransition:
    case ErrorCode::kSimulationFinished:
      return 409;
    case ErrorCode::kUnknownFeature:
    case ErrorCode::kInvalidSchedule:
      return 422;
    default:
      return 500;
  }
}

struct SimulationService::View {
  int day = 0;
  std::uint64_t version = 0;
  Json state;
  Json rollouts = Json::array();
  std::vector<Json> metrics;
  std::vector<int> metric_days;
};

SimulationService::SimulationService(WorldConfig world, ScenarioConfig scenario)
    : sim_(std::move(world), std::move(scenario)) {
  publish_view();
}

SimulationService::~SimulationService() { stop_auto(); }

std::shared_ptr<const SimulationService::View> SimulationService::view() const {
  return std::atomic_load(&view_);
}

Json SimulationService::rollout_view(const Rollout& rollout) const {
  Json j = rollout;
  j["coverage"] = sim_.control_plane().current_fraction(rollout);
  return j;
}

void SimulationService::publish_view() {
  auto next = std::make_shared<View>();
  const ControlPlane& cp = sim_.control_plane();
  next->day = cp.day();
  next->version = cp.snapshot()->version();
  next->state = control_plane_to_json(cp);
  next->state["snapshot_version"] = next->version;
  next->state["scenario"] = sim_.scenario().name;
  next->state["horizon_days"] = sim_.world().config().simulation_days;
  next->state["finished"] = sim_.done();
  next->state["aborted"] = sim_.aborted();
  Json rollouts = Json::array();
  for (const auto& r : cp.rollouts()) rollouts.push_back(rollout_view(r));
  next->state["rollouts"] = rollouts;
  next->rollouts = std::move(rollouts);
  // Earlier points never change, so they are shared with the previous view.
  if (auto prev = view()) {
    next->metrics = prev->metrics;
    next->metric_days = prev->metric_days;
  }
  for (std::size_t i = next->metrics.size(); i < sim_.metrics().size(); ++i) {
    next->metrics.push_back(sim_.metrics()[i]);
    next->metric_days.push_back(sim_.metrics()[i].day);
  }
  std::atomic_store(&view_, std::shared_ptr<const View>(std::move(next)));
}

ApiResponse SimulationService::envelope(int status, Json payload,
                                        const std::string& id_echo) const {
  const auto v = view();
  ApiResponse response;
  response.status = status;
  response.body = Json{{"payload", std::move(payload)},
                       {"day", v->day},
                       {"snapshot_version", v->version},
                       {"request_id", id_echo}};
  return response;
}

ApiResponse SimulationService::error(int status, std::string_view code,
                                     const std::string& message,
                                     const std::string& id_echo) const {
  ApiResponse response = envelope(status, nullptr, id_echo);
  response.body.erase("payload");
  response.body["error"] = Json{{"code", code}, {"message", message}};
  return response;
}

ApiResponse SimulationService::handle(const ApiRequest& request) {
  const std::string id_echo = request.request_id.empty()
                                  ? "req-" + std::to_string(next_request_.fetch_add(1))
                                  : request.request_id;
  try {
    return request.method == "GET" ? read(request, id_echo)
                                   : mutate(request, id_echo);
  } catch (const Error& e) {
    return error(http_status_for(e.code()), error_code_name(e.code()), e.what(), id_echo);
  } catch (const nlohmann::json::exception& e) {
    return error(400, error_code_name(ErrorCode::kParseError), e.what(), id_echo);
  } catch (const std::exception& e) {
    return error(500, "internal", e.what(), id_echo);
  }
}

ApiResponse SimulationService::read(const ApiRequest& request, const std::string& id_echo) {
  const auto segments = split_path(request.path);
  const auto v = view();
  if (segments.size() < 2 || segments[0] != "v1") {
    return error(404, "not-found", "no route for " + request.path, id_echo);
  }
  const std::string& resource = segments[1];
  if (segments.size() == 2 && resource == "state") {
    Json state = v->state;
    state["auto"] = auto_status();
    return envelope(200, std::move(state), id_echo);
  }
  if (resource == "rollouts" && segments.size() == 2) {
    return envelope(200, v->rollouts, id_echo);
  }
  if (resource == "rollouts" && segments.size() == 3) {
    for (const auto& r : v->rollouts) {
      if (r.at("id") == segments[2]) return envelope(200, r, id_echo);
    }
    throw Error(ErrorCode::kNotFound, "no rollout '" + segments[2] + "'");
  }
  if (resource == "metrics" && segments.size() == 2) {
    int since = 0;
    if (auto it = request.query.find("since_day"); it != request.query.end()) {
      since = parse_int(it->second, "since_day");
    }
    const auto first = std::lower_bound(v->metric_days.begin(), v->metric_days.end(), since);
    Json points = Json::array();
    for (auto i = static_cast<std::size_t>(first - v->metric_days.begin());
         i < v->metrics.size(); ++i) {
      points.push_back(v->metrics[i]);
    }
    const int next = v->metric_days.empty() ? since : std::max(since, v->metric_days.back() + 1);
    return envelope(200, Json{{"since_day", since}, {"next_since_day", next}, {"points", points}},
                    id_echo);
  }
  const bool known = resource == "rollouts" || resource == "clock";
  return error(known ? 405 : 404, known ? "method-not-allowed" : "not-found",
               "no route for GET " + request.path, id_echo);
}

ApiResponse SimulationService::mutate(const ApiRequest& request, const std::string& id_echo) {
  const auto segments = split_path(request.path);
  const std::string& method = request.method;
  auto route_error = [&](bool known) {
    return error(known ? 405 : 404, known ? "method-not-allowed" : "not-found",
                 "no route for " + method + " " + request.path, id_echo);
  };
  if (segments.size() < 2 || segments[0] != "v1") return route_error(false);

  // The auto-step timer is itself a producer on the queue, so it is
  // controlled from the calling thread.
  if (segments.size() == 3 && segments[1] == "clock" && segments[2] == "auto") {
    if (method == "POST") {
      const Json body = parse_body(request.body);
      if (!body.contains("seconds_per_day") || !body.at("seconds_per_day").is_number()) {
        throw Error(ErrorCode::kInvalidArgument, "seconds_per_day (number) is required");
      }
      return envelope(200, start_auto(body.at("seconds_per_day").get<double>()), id_echo);
    }
    if (method == "DELETE") return envelope(200, stop_auto(), id_echo);
    return route_error(true);
  }

  int status = 200;
  Action action;
  if (segments[1] == "rollouts") {
    if (segments.size() == 2 && method == "POST") {
      const RolloutPolicy policy = parse_body(request.body).get<RolloutPolicy>();
      status = 201;
      action = [this, policy] {
        return rollout_view(sim_.control_plane().create_rollout(policy));
      };
    } else if (segments.size() == 4 && method == "POST" &&
               (segments[3] == "pause" || segments[3] == "resume" || segments[3] == "rollback")) {
      const std::string id = segments[2];
      const std::string verb = segments[3];
      action = [this, id, verb] {
        ControlPlane& cp = sim_.control_plane();
        if (verb == "pause") return rollout_view(cp.pause(id));
        if (verb == "resume") return rollout_view(cp.resume(id));
        return rollout_view(cp.rollback(id));
      };
    } else if (segments.size() == 4 && method == "PATCH" && segments[3] == "rate") {
      const Json body = parse_body(request.body);
      if (!body.contains("rate_per_day") || !body.at("rate_per_day").is_number()) {
        throw Error(ErrorCode::kInvalidArgument, "rate_per_day (number) is required");
      }
      const double rate = body.at("rate_per_day").get<double>();
      const std::string id = segments[2];
      action = [this, id, rate] { return rollout_view(sim_.control_plane().set_rate(id, rate)); };
    } else {
      return route_error(true);
    }
  } else if (segments[1] == "clock" && segments.size() == 3 && segments[2] == "step") {
    if (method != "POST") return route_error(true);
    int days = 1;
    if (auto it = request.query.find("days"); it != request.query.end()) {
      days = parse_int(it->second, "days");
    }
    if (days < 1 || days > kMaxStepDays) {
      throw Error(ErrorCode::kInvalidArgument,
                  "days must lie in [1, " + std::to_string(kMaxStepDays) + "]");
    }
    action = [this, days] { return step_days(days); };
  } else {
    return route_error(segments[1] == "state" || segments[1] == "metrics");
  }

  const std::string fingerprint = method + " " + request.path + " " + request.body;
  auto result = queue_.submit([&]() -> ApiResponse {
    if (!request.idempotency_key.empty()) {
      if (auto it = idempotent_.find(request.idempotency_key); it != idempotent_.end()) {
        if (it->second.first != fingerprint) {
          return error(409, "idempotency-conflict",
                       "idempotency key '" + request.idempotency_key +
                           "' was already used for a different request",
                       id_echo);
        }
        ApiResponse replay = it->second.second;
        replay.body["request_id"] = id_echo;
        replay.body["idempotent_replay"] = true;
        return replay;
      }
    }
    ApiResponse response;
    try {
      Json payload = action();
      publish_view();
      response = envelope(status, std::move(payload), id_echo);
    } catch (const Error& e) {
      publish_view();
      response = error(http_status_for(e.code()), error_code_name(e.code()), e.what(), id_echo);
    }
    if (!request.idempotency_key.empty()) {
      idempotent_.emplace(request.idempotency_key, std::make_pair(fingerprint, response));
    }
    return response;
  });
  return result.get();
}

Json SimulationService::step_days(int days) {
  if (sim_.done()) {
    throw Error(ErrorCode::kSimulationFinished,
                sim_.aborted() ? "simulation aborted by a guardrail rollback"
                               : "simulation reached its horizon");
  }
  Json points = Json::array();
  for (int i = 0; i < days && !sim_.done(); ++i) points.push_back(sim_.step());
  return Json{{"day", sim_.day()},
              {"finished", sim_.done()},
              {"aborted", sim_.aborted()},
              {"points", points}};
}

RunReport SimulationService::report() {
  return queue_.submit([this] { return sim_.report(); }).get();
}

bool SimulationService::auto_stepping() const { return auto_running_.load(); }

Json SimulationService::auto_status() const {
  const bool running = auto_running_.load();
  return Json{{"enabled", running},
              {"seconds_per_day", running ? Json(seconds_per_day_.load()) : Json(nullptr)}};
}

Json SimulationService::start_auto(double seconds_per_day) {
  if (!std::isfinite(seconds_per_day) || seconds_per_day <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "seconds_per_day must be positive");
  }
  stop_auto();
  {
    std::lock_guard lock(auto_mu_);
    auto_stop_ = false;
  }
  seconds_per_day_ = seconds_per_day;
  auto_running_ = true;
  auto_thread_ = std::thread([this, seconds_per_day] {
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(seconds_per_day));
    for (;;) {
      {
        std::unique_lock lock(auto_mu_);
        if (auto_cv_.wait_for(lock, period, [this] { return auto_stop_; })) break;
      }
      const bool finished = queue_
                                .submit([this] {
                                  if (!sim_.done()) {
                                    sim_.step();
                                    publish_view();
                                  }
                                  return sim_.done();
                                })
                                .get();
      if (finished) break;
    }
    auto_running_ = false;
  });
  return auto_status();
}

Json SimulationService::stop_auto() {
  {
    std::lock_guard lock(auto_mu_);
    auto_stop_ = true;
  }
  auto_cv_.notify_all();
  if (auto_thread_.joinable()) auto_thread_.join();
  auto_running_ = false;
  return auto_status();
}

// ---------------------------------------------------------------------------

HttpServer::HttpServer(SimulationService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [k, v] : req.params) request.query.emplace(k, v);
    request.body = req.body;
    request.request_id = req.get_header_value("X-Request-Id");
    request.idempotency_key = req.get_header_value("Idempotency-Key");
    const ApiResponse response = service_.handle(request);
    res.status = response.status;
    res.set_header("X-Request-Id", response.body.value("request_id", ""));
    res.set_content(response.body.dump(), "application/json");
  };
  const char* pattern = R"(/v1/.*)";
  server_->Get(pattern, handler);
  server_->Post(pattern, handler);
  server_->Patch(pattern, handler);
  server_->Delete(pattern, handler);
  server_->Put(pattern, handler);
  server_->Options(pattern, [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server_->set_default_headers({
      {"Access-Control-Allow-Origin", "*"},
      {"Access-Control-Allow-Methods", "GET, POST, PATCH, DELETE, OPTIONS"},
      {"Access-Control-Allow-Headers", "Content-Type, X-Request-Id, Idempotency-Key"},
  });
  // SO_REUSEADDR only: the library default adds SO_REUSEPORT, which would let a
  // second server silently share an occupied port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    Json body{{"error", {{"code", "not-found"}, {"message", "no route for " + req.path}}}};
    res.set_content(body.dump(), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& address) {
  std::string host = "127.0.0.1";
  std::string port_text = address;
  if (const auto colon = address.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = address.substr(0, colon);
    port_text = address.substr(colon + 1);
  }
  int port = 0;
  try {
    port = parse_int(port_text, "port");
  } catch (const Error&) {
    throw Error(ErrorCode::kIoError, "bad bind address '" + address + "'");
  }
  if (port < 0 || port > 65535) throw Error(ErrorCode::kIoError, "port out of range");
  int bound = -1;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (server_->bind_to_port(host, port)) {
    bound = port;
  }
  if (bound < 0) throw Error(ErrorCode::kIoError, "cannot bind " + address);
  return bound;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace ieff
