#include "qm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "qm/elliptic.hpp"

namespace qm::experiments {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kAngleSlack = 1e-12;

Point pt(cplx z) { return to_point(z); }
cplx cz(Point p) { return to_complex(p); }

void finish(Record& r) { r.delta = r.rhs - r.lhs; }

}  // namespace

std::optional<ExperimentId> parse_experiment(std::string_view name) {
  if (name == "trans") return ExperimentId::Transposition;
  if (name == "dupl") return ExperimentId::Duplication;
  if (name == "area") return ExperimentId::EqualArea;
  if (name == "sum") return ExperimentId::SumInequality;
  return std::nullopt;
}

std::string_view to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::Transposition: return "trans";
    case ExperimentId::Duplication: return "dupl";
    case ExperimentId::EqualArea: return "area";
    case ExperimentId::SumInequality: return "sum";
  }
  return "?";
}

std::string_view to_string(Sign s) {
  switch (s) {
    case Sign::Positive: return "positive";
    case Sign::Negative: return "negative";
    case Sign::Indeterminate: return "indeterminate";
    case Sign::Skipped: return "skipped";
  }
  return "?";
}

Sign Record::sign() const {
  if (skipped) return Sign::Skipped;
  if (!(std::abs(delta) > bracket)) return Sign::Indeterminate;
  return delta > 0.0 ? Sign::Positive : Sign::Negative;
}

Record exp_transposition(Point a, Point b, const AdaptiveOptions& options) {
  const cplx za = cz(a);
  const cplx zb = cz(b);
  if (!(a.y > 0.0) || !(b.y > 0.0)) throw GeometryError("constraint", "Im a and Im b must be positive");
  // Closed angle ranges: the figure with alpha = pi/2 sits on the boundary.
  const double arg_b = std::arg(zb);
  const double arg_a1 = std::arg(za - 1.0);
  if (arg_b < kPi / 2.0 - kAngleSlack || arg_b > kPi + kAngleSlack) {
    throw GeometryError("constraint", "arg b must lie in [pi/2, pi]");
  }
  if (arg_a1 < -kAngleSlack || arg_a1 > kPi / 2.0 + kAngleSlack) {
    throw GeometryError("constraint", "arg(a-1) must lie in [0, pi/2]");
  }
  const Quadrilateral left = quad_from_points(a, b, {0.0, 0.0}, {1.0, 0.0});
  const Quadrilateral right =
      quad_from_points({1.0, std::abs(za - 1.0)}, {0.0, std::abs(zb)}, {0.0, 0.0}, {1.0, 0.0});
  const ModulusResult ml = quad_modulus(left, options);
  const ModulusResult mr = quad_modulus(right, options);
  Record r;
  r.lhs = ml.value;
  r.rhs = mr.value;
  r.bracket = ml.width() + mr.width();
  r.moduli = {ml.value, mr.value};
  finish(r);
  return r;
}

Record exp_duplication(Point a, Point b, const AdaptiveOptions& options) {
  const cplx za = cz(a);
  const cplx zb = cz(b);
  const Quadrilateral q1 = quad_from_points(a, b, {0.0, 0.0}, {1.0, 0.0});
  const Quadrilateral q2 =
      quad_from_points(pt(std::conj(1.0 - zb)), pt(std::conj(1.0 - za)), {0.0, 0.0}, {1.0, 0.0});
  const Quadrilateral q3 = quad_from_points(a, b, pt(1.0 - za), pt(1.0 - zb));
  const ModulusResult m1 = quad_modulus(q1, options);
  const ModulusResult m2 = quad_modulus(q2, options);
  const ModulusResult m3 = quad_modulus(q3, options);
  Record r;
  r.lhs = m1.value + m2.value;
  r.rhs = m3.value;
  r.bracket = m1.width() + m2.width() + m3.width();
  r.moduli = {m1.value, m2.value, m3.value};
  finish(r);
  return r;
}

Record exp_equal_area(double rr, double s, double alpha, double beta, const AdaptiveOptions& options) {
  if (alpha < -kAngleSlack || alpha > kPi / 2.0 + kAngleSlack) {
    throw GeometryError("constraint", "alpha must lie in [0, pi/2]");
  }
  if (beta < kPi / 2.0 - kAngleSlack || beta > kPi + kAngleSlack) {
    throw GeometryError("constraint", "beta must lie in [pi/2, pi]");
  }
  const double t = equal_area_t(rr, s, alpha, beta);
  const Quadrilateral q1 = quad_from_points(pt(1.0 + 2.0 * rr * std::polar(1.0, alpha)),
                                            pt(2.0 * s * std::polar(1.0, beta)), {0.0, 0.0}, {1.0, 0.0});
  const Quadrilateral q2 = quad_from_points({t, rr}, {0.0, s}, {0.0, -s}, {t, -rr});
  const double a1 = polygon_area(q1.domain());
  const double a2 = polygon_area(q2.domain());
  if (std::abs(a1 - a2) > 1e-10 * std::max(1.0, a1)) {
    throw std::logic_error("equal-area construction failed");
  }
  const ModulusResult m1 = quad_modulus(q1, options);
  const ModulusResult m2 = quad_modulus(q2, options);
  Record r;
  r.lhs = m1.value;
  r.rhs = m2.value;
  r.bracket = m1.width() + m2.width();
  r.moduli = {m1.value, m2.value};
  finish(r);
  return r;
}

Record exp_sum_inequality(double h, double k) {
  if (!(h > 1.0) || !(k > 1.0)) throw GeometryError("constraint", "h and k must exceed 1");
  const double mh = elliptic::bowman_modulus(h);
  const double mk = elliptic::bowman_modulus(k);
  Record r;
  r.lhs = mh + mk;
  r.rhs = h + k - 1.0;
  r.bracket = 0.0;
  r.moduli = {mh, mk};
  finish(r);
  r.lower_slack = r.lhs - (h + k - 2.0);
  return r;
}

void SweepGrid::validate() const {
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
  if (!(x_min < x_max) || !(y_min < y_max)) throw std::invalid_argument("grid ranges need min < max");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(y_min) || !std::isfinite(y_max)) {
    throw std::invalid_argument("grid ranges must be finite");
  }
}

double SweepGrid::x(int i) const { return x_min + (x_max - x_min) * i / (nx - 1); }
double SweepGrid::y(int j) const { return y_min + (y_max - y_min) * j / (ny - 1); }

SweepGrid SweepGrid::parse(const std::string& text) {
  SweepGrid g;
  char sep1 = 0, sep2 = 0, comma = 0, sep3 = 0, sep4 = 0;
  std::istringstream in(text);
  in >> g.x_min >> sep1 >> g.x_max >> sep2 >> g.nx >> comma >> g.y_min >> sep3 >> g.y_max >> sep4 >> g.ny;
  std::string rest;
  in >> rest;
  if (!in.eof() || !rest.empty() || sep1 != ':' || sep2 != ':' || comma != ',' || sep3 != ':' || sep4 != ':') {
    throw std::invalid_argument("grid must look like xmin:xmax:nx,ymin:ymax:ny");
  }
  g.validate();
  return g;
}

SweepGrid SweepGrid::defaults(ExperimentId id) {
  SweepGrid g;
  switch (id) {
    case ExperimentId::Transposition:
      g.alpha = kPi / 8.0;
      g.beta = 3.0 * kPi / 4.0;
      break;
    case ExperimentId::Duplication:
      break;
    case ExperimentId::EqualArea:
      g.alpha = kPi / 4.0;
      g.beta = 3.0 * kPi / 4.0;
      break;
    case ExperimentId::SumInequality:
      g.x_min = g.y_min = 1.25;
      g.x_max = g.y_max = 4.0;
      g.nx = g.ny = 12;
      break;
  }
  return g;
}

Record evaluate_point(ExperimentId id, double x, double y, const SweepGrid& grid,
                      const AdaptiveOptions& options) {
  Record r;
  try {
    switch (id) {
      case ExperimentId::Transposition:
        // f(x,y) = QM(1+xi, yi, 0, 1) - QM(1 + x e^{i alpha}, y e^{i beta}, 0, 1)
        r = exp_transposition(pt(1.0 + x * std::polar(1.0, grid.alpha)), pt(y * std::polar(1.0, grid.beta)),
                              options);
        break;
      case ExperimentId::Duplication: {
        // A = x + iy, B = e^{i arg(A-1)}
        const cplx a{x, y};
        r = exp_duplication(pt(a), pt(std::polar(1.0, std::arg(a - 1.0))), options);
        break;
      }
      case ExperimentId::EqualArea:
        r = exp_equal_area(x, y, grid.alpha, grid.beta, options);
        break;
      case ExperimentId::SumInequality:
        r = exp_sum_inequality(x, y);
        break;
    }
  } catch (const GeometryError& e) {
    r = Record{};
    r.skipped = true;
    r.skip_reason = e.reason();
  } catch (const std::exception& e) {
    r = Record{};
    r.skipped = true;
    r.skip_reason = std::string("failed: ") + e.what();
  }
  if (r.skipped) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.lhs = r.rhs = r.delta = r.bracket = nan;
  }
  r.x = x;
  r.y = y;
  return r;
}

SweepResult run_sweep(ExperimentId id, const SweepGrid& grid, const AdaptiveOptions& options, unsigned jobs,
                      const ProgressFn& progress, std::stop_token stop) {
  grid.validate();
  SweepResult result{id, grid, {}};
  const std::size_t total = static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny);
  result.records.resize(total);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, total));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&]() {
    for (std::size_t k = next++; k < total; k = next++) {
      const int i = static_cast<int>(k / static_cast<std::size_t>(grid.ny));
      const int j = static_cast<int>(k % static_cast<std::size_t>(grid.ny));
      Record& rec = result.records[k];
      if (stop.stop_requested()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.x = grid.x(i);
        rec.y = grid.y(j);
        rec.lhs = rec.rhs = rec.delta = rec.bracket = nan;
        rec.skipped = true;
        rec.skip_reason = "cancelled";
      } else {
        rec = evaluate_point(id, grid.x(i), grid.y(j), grid, options);
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, total);
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
  }
  return result;
}

SweepSummary SweepResult::summary() const {
  SweepSummary s;
  s.total = records.size();
  s.min_delta = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < records.size(); ++k) {
    const Record& r = records[k];
    switch (r.sign()) {
      case Sign::Positive: ++s.positive; break;
      case Sign::Negative:
        ++s.negative;
        s.negative_records.push_back(k);
        break;
      case Sign::Indeterminate: ++s.indeterminate; break;
      case Sign::Skipped: ++s.skipped; continue;
    }
    if (r.delta < s.min_delta) {
      s.min_delta = r.delta;
      s.min_x = r.x;
      s.min_y = r.y;
    }
    if (r.lower_slack) {
      s.min_lower_slack = std::min(s.min_lower_slack.value_or(std::numeric_limits<double>::infinity()),
                                   *r.lower_slack);
    }
  }
  return s;
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << "x,y,lhs,rhs,delta,bracket,skipped\n";
  char buf[256];
  for (const Record& r : result.records) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n", r.x, r.y, r.lhs, r.rhs, r.delta,
                  r.bracket, r.skipped ? 1 : 0);
    out << buf;
  }
}

}  // namespace qm::experiments
