#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace qm::service {

struct ServiceOptions {
  double quad_tol = 1e-3;  // small default budget keeps single solves interactive
  std::size_t quad_max_dofs = 50000;
  double ring_tol = 1e-3;
  std::size_t ring_max_dofs = 50000;
  double point_tol = 1e-4;  // single sweep-point re-runs
  double sweep_tol = 1e-3;
  std::size_t max_dofs_limit = 200000;
  std::size_t max_grid_points = 10000;
  unsigned solve_workers = 0;  // concurrent synchronous solves; 0 = machine parallelism
  unsigned sweep_workers = 1;  // concurrent sweep jobs
  unsigned sweep_jobs = 0;     // threads per sweep; 0 = machine parallelism
  std::chrono::seconds job_ttl{3600};
  std::string cors_origin = "*";
};

/// HTTP JSON API over the solver. Jobs live in memory and are evicted once
/// finished for longer than the TTL.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Registers all routes and CORS handling on `server`.
  void install(httplib::Server& server);

  std::size_t job_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocking server loop. `addr` is "host:port"; port 0 picks a free port.
/// Returns nonzero if the address cannot be bound.
int serve(const std::string& addr, ServiceOptions options = {});

}  // namespace qm::service
