#include "qm/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <mutex>
#include <optional>
#include <random>
#include <semaphore>
#include <thread>
#include <unordered_map>

#include "qm/experiments.hpp"
#include "qm/fem.hpp"
#include "qm/json_io.hpp"
#include "qm/mesh.hpp"
#include "qm/modulus.hpp"

namespace qm::service {

namespace {

using io::json;
using Clock = std::chrono::steady_clock;

enum class JobState { Queued, Running, Done, Failed };
enum class JobKind { Quad, Ring, Sweep };

const char* to_string(JobState s) {
  switch (s) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "?";
}

const char* to_string(JobKind k) {
  switch (k) {
    case JobKind::Quad: return "quad";
    case JobKind::Ring: return "ring";
    case JobKind::Sweep: return "sweep";
  }
  return "?";
}

struct Job {
  std::string id;
  JobKind kind = JobKind::Quad;
  JobState state = JobState::Queued;
  double progress = 0.0;
  json request;
  json result;
  std::string error;
  std::optional<SolutionField> solution;
  Clock::time_point finished{};

  // sweep parameters
  experiments::ExperimentId experiment = experiments::ExperimentId::Transposition;
  experiments::SweepGrid grid;
  AdaptiveOptions options;
};

// Bad request carrying a machine-readable reason.
struct BadRequest {
  std::string reason;
  std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& reason, const std::string& message) {
  send_json(res, status, {{"error", message}, {"reason", reason}});
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw BadRequest{"bad-json", "request body must be a JSON object"};
  return body;
}

double number_field(const json& body, const char* key, double fallback) {
  if (!body.contains(key)) return fallback;
  if (!body.at(key).is_number()) throw BadRequest{"bad-parameter", std::string(key) + " must be a number"};
  return body.at(key).get<double>();
}

AdaptiveOptions solve_options(const json& body, double tol, std::size_t max_dofs, std::size_t limit) {
  AdaptiveOptions o;
  o.tol = number_field(body, "tol", tol);
  const double dofs = number_field(body, "max_dofs", static_cast<double>(max_dofs));
  if (!(o.tol > 0.0) || o.tol > 0.5) throw BadRequest{"bad-parameter", "tol must lie in (0, 0.5]"};
  if (!(dofs >= 1000.0) || dofs > static_cast<double>(limit)) {
    throw BadRequest{"bad-parameter", "max_dofs must lie in [1000, " + std::to_string(limit) + "]"};
  }
  o.max_dofs = static_cast<std::size_t>(dofs);
  return o;
}

}  // namespace

struct Service::Impl {
  ServiceOptions opts;
  mutable std::mutex mutex;
  std::unordered_map<std::string, std::shared_ptr<Job>> jobs;
  std::deque<std::shared_ptr<Job>> queue;
  std::condition_variable_any queue_cv;
  std::vector<std::jthread> sweepers;
  std::counting_semaphore<1024> solve_slots;
  std::mt19937_64 rng{std::random_device{}()};

  explicit Impl(ServiceOptions o)
      : opts(std::move(o)),
        solve_slots(static_cast<std::ptrdiff_t>(std::clamp<unsigned>(
            opts.solve_workers ? opts.solve_workers : std::thread::hardware_concurrency(), 1u, 1024u))) {
    const unsigned n = std::max(1u, opts.sweep_workers);
    for (unsigned w = 0; w < n; ++w) {
      sweepers.emplace_back([this](std::stop_token st) { sweep_loop(st); });
    }
  }

  ~Impl() {
    for (auto& t : sweepers) t.request_stop();
    queue_cv.notify_all();
    sweepers.clear();  // joins
  }

  std::string new_id() {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    return buf;
  }

  // Caller holds the mutex.
  void evict_expired() {
    const auto now = Clock::now();
    for (auto it = jobs.begin(); it != jobs.end();) {
      const Job& j = *it->second;
      const bool finished = j.state == JobState::Done || j.state == JobState::Failed;
      if (finished && now - j.finished > opts.job_ttl) {
        it = jobs.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::shared_ptr<Job> add_job(JobKind kind, json request) {
    auto job = std::make_shared<Job>();
    job->kind = kind;
    job->request = std::move(request);
    std::lock_guard lock(mutex);
    evict_expired();
    do {
      job->id = new_id();
    } while (jobs.contains(job->id));
    jobs.emplace(job->id, job);
    return job;
  }

  std::shared_ptr<Job> find(const std::string& id) {
    std::lock_guard lock(mutex);
    evict_expired();
    const auto it = jobs.find(id);
    return it == jobs.end() ? nullptr : it->second;
  }

  void finish(Job& job, JobState state, json result, std::string error = {}) {
    std::lock_guard lock(mutex);
    job.state = state;
    job.result = std::move(result);
    job.error = std::move(error);
    job.finished = Clock::now();
    if (state == JobState::Done) job.progress = 1.0;
  }

  void sweep_loop(std::stop_token st) {
    while (true) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(mutex);
        queue_cv.wait(lock, st, [this] { return !queue.empty(); });
        if (st.stop_requested()) return;
        job = queue.front();
        queue.pop_front();
        job->state = JobState::Running;
      }
      spdlog::info("sweep {} started ({} points)", job->id,
                   static_cast<long>(job->grid.nx) * static_cast<long>(job->grid.ny));
      try {
        const auto result = experiments::run_sweep(
            job->experiment, job->grid, job->options, opts.sweep_jobs,
            [this, job](std::size_t done, std::size_t total) {
              std::lock_guard lock(mutex);
              // Stays below 1 until the result is stored.
              job->progress = std::min(0.999, static_cast<double>(done) / static_cast<double>(total));
            },
            st);
        finish(*job, JobState::Done, io::to_json(result));
        spdlog::info("sweep {} done", job->id);
      } catch (const std::exception& e) {
        finish(*job, JobState::Failed, nullptr, e.what());
        spdlog::error("sweep {} failed: {}", job->id, e.what());
      }
    }
  }

  json job_json(const Job& job) {
    std::lock_guard lock(mutex);
    json j = {{"id", job.id}, {"kind", to_string(job.kind)}, {"state", to_string(job.state)}, {"progress", job.progress}};
    if (job.state == JobState::Done) j["result"] = job.result;
    if (job.state == JobState::Failed) j["error"] = job.error;
    return j;
  }

  // Maps exceptions thrown by `fn` to HTTP errors.
  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const BadRequest& e) {
      send_error(res, 400, e.reason, e.message);
    } catch (const GeometryError& e) {
      send_error(res, 400, e.reason(), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "bad-json", e.what());
    } catch (const std::invalid_argument& e) {
      send_error(res, 400, "bad-parameter", e.what());
    } catch (const std::exception& e) {
      spdlog::error("request failed: {}", e.what());
      send_error(res, 500, "solver-failure", e.what());
    }
  }

  struct SlotGuard {
    std::counting_semaphore<1024>& s;
    explicit SlotGuard(std::counting_semaphore<1024>& sem) : s(sem) { s.acquire(); }
    ~SlotGuard() { s.release(); }
  };

  void post_quad(const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const Quadrilateral q = io::quad_from_json(body);
      const AdaptiveOptions o = solve_options(body, opts.quad_tol, opts.quad_max_dofs, opts.max_dofs_limit);
      auto job = add_job(JobKind::Quad, body);
      ModulusResult r;
      {
        SlotGuard slot(solve_slots);
        r = quad_modulus(q, o);
      }
      json out = io::to_json(r);
      out["id"] = job->id;
      {
        std::lock_guard lock(mutex);
        job->solution = std::move(r.solution);
      }
      finish(*job, JobState::Done, out);
      send_json(res, r.converged ? 200 : 422, out);
    });
  }

  void post_ring(const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const RingCondenser ring = io::ring_from_json(body);
      const AdaptiveOptions o = solve_options(body, opts.ring_tol, opts.ring_max_dofs, opts.max_dofs_limit);
      auto job = add_job(JobKind::Ring, body);
      CapacityResult r;
      {
        SlotGuard slot(solve_slots);
        r = ring_capacity(ring, o);
      }
      json out = io::to_json(r);
      out["id"] = job->id;
      {
        std::lock_guard lock(mutex);
        job->solution = std::move(r.solution);
      }
      finish(*job, JobState::Done, out);
      send_json(res, r.converged ? 200 : 422, out);
    });
  }

  static experiments::ExperimentId experiment_from(const json& body) {
    if (!body.contains("experiment") || !body.at("experiment").is_string()) {
      throw BadRequest{"bad-experiment", "\"experiment\" must be one of trans, dupl, area, sum"};
    }
    const auto id = experiments::parse_experiment(body.at("experiment").get<std::string>());
    if (!id) throw BadRequest{"bad-experiment", "unknown experiment " + body.at("experiment").get<std::string>()};
    return *id;
  }

  void post_sweep(const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const auto id = experiment_from(body);
      experiments::SweepGrid grid = experiments::SweepGrid::defaults(id);
      grid.alpha = number_field(body, "alpha", grid.alpha);
      grid.beta = number_field(body, "beta", grid.beta);
      if (body.contains("grid")) grid = io::grid_from_json(body.at("grid"), grid);
      grid.validate();
      if (static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny) > opts.max_grid_points) {
        throw BadRequest{"bad-parameter", "grid exceeds " + std::to_string(opts.max_grid_points) + " points"};
      }
      const AdaptiveOptions o = solve_options(body, opts.sweep_tol, 200000, opts.max_dofs_limit);
      auto job = add_job(JobKind::Sweep, body);
      {
        std::lock_guard lock(mutex);
        job->experiment = id;
        job->grid = grid;
        job->options = o;
        queue.push_back(job);
      }
      queue_cv.notify_one();
      send_json(res, 202, {{"id", job->id}, {"kind", "sweep"}, {"state", "queued"}, {"progress", 0.0}});
    });
  }

  void get_sweep(const httplib::Request& req, httplib::Response& res) {
    const auto job = find(req.matches[1]);
    if (!job || job->kind != JobKind::Sweep) {
      send_error(res, 404, "unknown-id", "no sweep job with this id");
      return;
    }
    send_json(res, 200, job_json(*job));
  }

  void post_point(const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const auto id = experiment_from(body);
      experiments::SweepGrid grid = experiments::SweepGrid::defaults(id);
      grid.alpha = number_field(body, "alpha", grid.alpha);
      grid.beta = number_field(body, "beta", grid.beta);
      if (!body.contains("x") || !body.contains("y")) throw BadRequest{"bad-parameter", "x and y are required"};
      const double x = number_field(body, "x", 0.0);
      const double y = number_field(body, "y", 0.0);
      const AdaptiveOptions o = solve_options(body, opts.point_tol, 200000, opts.max_dofs_limit);
      experiments::Record r;
      {
        SlotGuard slot(solve_slots);
        r = experiments::evaluate_point(id, x, y, grid, o);
      }
      send_json(res, 200, io::to_json(r));
    });
  }

  void get_solution(const httplib::Request& req, httplib::Response& res) {
    const auto job = find(req.matches[1]);
    if (!job) {
      send_error(res, 404, "unknown-id", "no job with this id");
      return;
    }
    std::lock_guard lock(mutex);
    if (!job->solution) {
      send_error(res, 404, "no-solution", "this job has no solution field");
      return;
    }
    json out = io::solution_to_json(*job->solution);
    out["id"] = job->id;
    out["kind"] = to_string(job->kind);
    send_json(res, 200, out);
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() = default;

std::size_t Service::job_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->jobs.size();
}

void Service::install(httplib::Server& server) {
  Impl* s = impl_.get();
  server.set_default_headers({{"Access-Control-Allow-Origin", s->opts.cors_origin}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });
  server.Post("/api/quad", [s](const httplib::Request& q, httplib::Response& r) { s->post_quad(q, r); });
  server.Post("/api/ring", [s](const httplib::Request& q, httplib::Response& r) { s->post_ring(q, r); });
  server.Post("/api/sweeps", [s](const httplib::Request& q, httplib::Response& r) { s->post_sweep(q, r); });
  server.Post("/api/point", [s](const httplib::Request& q, httplib::Response& r) { s->post_point(q, r); });
  server.Get(R"(/api/sweeps/([0-9A-Za-z]+))",
             [s](const httplib::Request& q, httplib::Response& r) { s->get_sweep(q, r); });
  server.Get(R"(/api/solution/([0-9A-Za-z]+))",
             [s](const httplib::Request& q, httplib::Response& r) { s->get_solution(q, r); });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send_error(res, res.status, res.status == 404 ? "not-found" : "error", httplib::status_message(res.status));
    }
  });
}

int serve(const std::string& addr, ServiceOptions options) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) {
    spdlog::error("address must look like host:port, got {}", addr);
    return 1;
  }
  const std::string host = addr.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    spdlog::error("bad port in {}", addr);
    return 1;
  }
  Service service(std::move(options));
  httplib::Server server;
  service.install(server);
  if (port == 0) {
    port = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    port = -1;
  }
  if (port < 0) {
    spdlog::error("cannot bind {}", addr);
    return 1;
  }
  std::fprintf(stderr, "listening on %s:%d\n", host.c_str(), port);
  return server.listen_after_bind() ? 0 : 1;
}

}  // namespace qm::service
