#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "qm/geometry.hpp"
#include "qm/modulus.hpp"

namespace qm::experiments {

enum class ExperimentId { Transposition, Duplication, EqualArea, SumInequality };

std::optional<ExperimentId> parse_experiment(std::string_view name);  // trans|dupl|area|sum
std::string_view to_string(ExperimentId id);

enum class Sign { Positive, Negative, Indeterminate, Skipped };
std::string_view to_string(Sign s);

/// One evaluation of an inequality lhs <= rhs. `bracket` is the sum of the
/// bracket widths of every modulus on both sides, so a sign is only claimed
/// when |delta| exceeds it.
struct Record {
  double x = 0.0;
  double y = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double delta = 0.0;  // rhs - lhs
  double bracket = 0.0;
  bool skipped = false;
  std::string skip_reason;
  std::vector<double> moduli;  // the individual moduli, in formula order
  /// Sum inequality only: slack of the lower bound M(h)+M(k) >= h+k-2.
  std::optional<double> lower_slack;

  Sign sign() const;
};

/// QM(a,b,0,1) <= QM(1+i|a-1|, i|b|, 0, 1).
Record exp_transposition(Point a, Point b, const AdaptiveOptions& options);

/// QM(A,B,0,1) + QM(conj(1-B), conj(1-A), 0, 1) <= QM(A, B, 1-A, 1-B).
Record exp_duplication(Point a, Point b, const AdaptiveOptions& options);

/// QM(1+2r e^{i alpha}, 2s e^{i beta}, 0, 1) <= QM(t+ir, is, -is, t-ir) with
/// t chosen so both quadrilaterals have equal area.
Record exp_equal_area(double r, double s, double alpha, double beta, const AdaptiveOptions& options);

/// h+k-1 >= M(h)+M(k) >= h+k-2 from the closed form. lhs = M(h)+M(k),
/// rhs = h+k-1, so delta is the upper slack and lower_slack = 1 - delta.
Record exp_sum_inequality(double h, double k);

struct SweepGrid {
  double x_min = 0.05;
  double x_max = 1.95;
  int nx = 20;
  double y_min = 0.05;
  double y_max = 1.95;
  int ny = 20;
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const;
  double x(int i) const;
  double y(int j) const;

  /// Parses "xmin:xmax:nx,ymin:ymax:ny".
  static SweepGrid parse(const std::string& text);
  /// Defaults per experiment: the figure configurations.
  static SweepGrid defaults(ExperimentId id);
};

struct SweepSummary {
  std::size_t total = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t indeterminate = 0;
  std::size_t skipped = 0;
  double min_delta = 0.0;
  double min_x = 0.0;
  double min_y = 0.0;
  std::optional<double> min_lower_slack;
  std::vector<std::size_t> negative_records;  // indices flagged for review
};

struct SweepResult {
  ExperimentId experiment;
  SweepGrid grid;
  std::vector<Record> records;  // row-major: x outer, y inner

  SweepSummary summary() const;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Evaluates the experiment at every grid point. Invalid geometry and solver
/// failures are recorded as skipped points; output order is independent of
/// `jobs`. Points not started when `stop` is requested are skipped as
/// "cancelled".
SweepResult run_sweep(ExperimentId id, const SweepGrid& grid, const AdaptiveOptions& options,
                      unsigned jobs = 0, const ProgressFn& progress = {}, std::stop_token stop = {});

/// Evaluates a single grid coordinate of an experiment.
Record evaluate_point(ExperimentId id, double x, double y, const SweepGrid& grid,
                      const AdaptiveOptions& options);

/// Columns x,y,lhs,rhs,delta,bracket,skipped with 12 significant digits.
void write_csv(std::ostream& out, const SweepResult& result);

}  // namespace qm::experiments
