#include "gcpreg/warp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gcpreg {

namespace {

void require_degree(int degree) {
  if (degree < kMinDegree || degree > kMaxDegree) {
    throw Error(ErrorCode::InvalidArgument,
                "polynomial degree must be in 1..4, got " +
                    std::to_string(degree));
  }
}

// Powers u^0..u^N.
void powers(double u, int n, double* out) {
  out[0] = 1.0;
  for (int k = 1; k <= n; ++k) out[k] = out[k - 1] * u;
}

double poly_eval(const std::vector<double>& c, int degree, double u,
                 double v) {
  double pu[kMaxDegree + 1];
  double pv[kMaxDegree + 1];
  powers(u, degree, pu);
  powers(v, degree, pv);
  double acc = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; j <= degree - i; ++j) acc += c[idx++] * pu[i] * pv[j];
  }
  return acc;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

std::size_t monomial_index(int degree, int i, int j) {
  // Row i starts after sum_{r<i} (degree - r + 1) entries.
  std::size_t idx = 0;
  for (int r = 0; r < i; ++r) idx += static_cast<std::size_t>(degree - r + 1);
  return idx + j;
}

// Re-expands normalized-frame coefficients in the original frame.
std::vector<double> to_raw(const std::vector<double>& c, int degree,
                           const Normalization& n) {
  const double alpha = 1.0 / n.scan_scale;
  const double beta = -n.scan_center / n.scan_scale;
  const double gamma = 1.0 / n.pixel_scale;
  const double delta = -n.pixel_center / n.pixel_scale;
  std::vector<double> raw(c.size(), 0.0);
  std::size_t idx = 0;
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; j <= degree - i; ++j, ++idx) {
      if (c[idx] == 0.0) continue;
      for (int k = 0; k <= i; ++k) {
        const double xk =
            binomial(i, k) * std::pow(alpha, k) * std::pow(beta, i - k);
        for (int l = 0; l <= j; ++l) {
          const double yl =
              binomial(j, l) * std::pow(gamma, l) * std::pow(delta, j - l);
          raw[monomial_index(degree, k, l)] += c[idx] * xk * yl;
        }
      }
    }
  }
  return raw;
}

Eigen::MatrixXd design_matrix(std::span<const PointPair> pairs, int degree,
                              const Normalization& norm) {
  const auto m = static_cast<Eigen::Index>(monomial_count(degree));
  Eigen::MatrixXd a(static_cast<Eigen::Index>(pairs.size()), m);
  double pu[kMaxDegree + 1];
  double pv[kMaxDegree + 1];
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const Point2 u = norm.apply(pairs[r].ref);
    powers(u.scan, degree, pu);
    powers(u.pixel, degree, pv);
    Eigen::Index col = 0;
    for (int i = 0; i <= degree; ++i) {
      for (int j = 0; j <= degree - i; ++j) {
        a(static_cast<Eigen::Index>(r), col++) = pu[i] * pv[j];
      }
    }
  }
  return a;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::vector<std::pair<int, int>> monomial_exponents(int degree) {
  std::vector<std::pair<int, int>> out;
  out.reserve(monomial_count(degree));
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; j <= degree - i; ++j) out.emplace_back(i, j);
  }
  return out;
}

Normalization Normalization::fit_box(std::span<const Point2> points) {
  if (points.empty()) return identity();
  double smin = points[0].scan, smax = points[0].scan;
  double pmin = points[0].pixel, pmax = points[0].pixel;
  for (const auto& p : points) {
    smin = std::min(smin, p.scan);
    smax = std::max(smax, p.scan);
    pmin = std::min(pmin, p.pixel);
    pmax = std::max(pmax, p.pixel);
  }
  Normalization n;
  n.scan_center = 0.5 * (smin + smax);
  n.pixel_center = 0.5 * (pmin + pmax);
  n.scan_scale = smax > smin ? 0.5 * (smax - smin) : 1.0;
  n.pixel_scale = pmax > pmin ? 0.5 * (pmax - pmin) : 1.0;
  return n;
}

WarpModel::WarpModel(int degree)
    : degree_(degree),
      scan_(monomial_count(std::clamp(degree, kMinDegree, kMaxDegree)), 0.0),
      pixel_(scan_.size(), 0.0) {
  require_degree(degree);
  scan_[monomial_index(degree, 1, 0)] = 1.0;
  pixel_[monomial_index(degree, 0, 1)] = 1.0;
}

WarpModel::WarpModel(int degree, Normalization norm,
                     std::vector<double> scan_coeffs,
                     std::vector<double> pixel_coeffs)
    : degree_(degree),
      norm_(norm),
      scan_(std::move(scan_coeffs)),
      pixel_(std::move(pixel_coeffs)) {
  require_degree(degree);
  if (scan_.size() != monomial_count(degree) ||
      pixel_.size() != monomial_count(degree)) {
    throw Error(ErrorCode::SizeMismatch,
                "degree " + std::to_string(degree) + " needs " +
                    std::to_string(monomial_count(degree)) +
                    " coefficients per axis");
  }
  if (norm_.scan_scale == 0.0 || norm_.pixel_scale == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "normalization scale is zero");
  }
}

WarpModel WarpModel::from_raw(int degree, std::vector<double> a,
                              std::vector<double> b) {
  return WarpModel(degree, Normalization::identity(), std::move(a),
                   std::move(b));
}

WarpModel WarpModel::shift(double d_scan, double d_pixel) {
  WarpModel m(1);
  m.scan_[monomial_index(1, 0, 0)] = d_scan;
  m.pixel_[monomial_index(1, 0, 0)] = d_pixel;
  return m;
}

std::vector<double> WarpModel::raw_scan_coeffs() const {
  return to_raw(scan_, degree_, norm_);
}
std::vector<double> WarpModel::raw_pixel_coeffs() const {
  return to_raw(pixel_, degree_, norm_);
}

double WarpModel::a(int i, int j) const {
  if (i < 0 || j < 0 || i + j > degree_) {
    throw Error(ErrorCode::InvalidArgument, "exponent outside model degree");
  }
  return raw_scan_coeffs()[monomial_index(degree_, i, j)];
}

double WarpModel::b(int i, int j) const {
  if (i < 0 || j < 0 || i + j > degree_) {
    throw Error(ErrorCode::InvalidArgument, "exponent outside model degree");
  }
  return raw_pixel_coeffs()[monomial_index(degree_, i, j)];
}

Point2 WarpModel::evaluate(Point2 ref) const {
  const Point2 u = norm_.apply(ref);
  return {poly_eval(scan_, degree_, u.scan, u.pixel),
          poly_eval(pixel_, degree_, u.scan, u.pixel)};
}

bool WarpModel::extrapolates(Point2 ref) const {
  if (!domain_) return false;
  const auto& [lo, hi] = *domain_;
  return ref.scan < lo.scan || ref.scan > hi.scan || ref.pixel < lo.pixel ||
         ref.pixel > hi.pixel;
}

std::vector<PointPair> matched_pairs(const std::vector<MatchResult>& matches) {
  std::vector<PointPair> out;
  for (const auto& m : matches) {
    if (!m.matched()) continue;
    out.push_back({{static_cast<double>(m.ref_coord.scan),
                    static_cast<double>(m.ref_coord.pixel)},
                   {static_cast<double>(m.sensed_coord.scan),
                    static_cast<double>(m.sensed_coord.pixel)}});
  }
  return out;
}

double rms(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(values.size()));
}

FitResult fit_warp(std::span<const PointPair> all_pairs, int degree,
                   const FitOptions& opts, std::span<const std::string> ids) {
  const auto start = std::chrono::steady_clock::now();
  require_degree(degree);

  std::vector<PointPair> fit_pairs;
  std::vector<std::string> fit_ids;
  std::vector<PointPair> held;
  for (std::size_t i = 0; i < all_pairs.size(); ++i) {
    if (opts.holdout_every > 1 && (i + 1) % opts.holdout_every == 0) {
      held.push_back(all_pairs[i]);
      continue;
    }
    fit_pairs.push_back(all_pairs[i]);
    fit_ids.push_back(i < ids.size() ? ids[i] : std::to_string(i));
  }

  const std::size_t needed = monomial_count(degree);
  if (fit_pairs.size() < needed) {
    throw InsufficientPointsError(needed, fit_pairs.size());
  }

  std::vector<Point2> refs;
  refs.reserve(fit_pairs.size());
  for (const auto& p : fit_pairs) refs.push_back(p.ref);
  const Normalization norm = Normalization::fit_box(refs);

  const Eigen::MatrixXd a = design_matrix(fit_pairs, degree, norm);
  Eigen::VectorXd obs_scan(a.rows());
  Eigen::VectorXd obs_pixel(a.rows());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    obs_scan(r) = fit_pairs[static_cast<std::size_t>(r)].sensed.scan;
    obs_pixel(r) = fit_pairs[static_cast<std::size_t>(r)].sensed.pixel;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < a.cols()) {
    throw Error(ErrorCode::DegenerateGeometry,
                "DegenerateGeometry: design matrix rank " +
                    std::to_string(qr.rank()) + " < " +
                    std::to_string(a.cols()));
  }
  const Eigen::VectorXd cs = qr.solve(obs_scan);
  const Eigen::VectorXd cp = qr.solve(obs_pixel);

  FitResult out{WarpModel(degree, norm, to_std(cs), to_std(cp)), FitReport{}};
  {
    Point2 lo = refs.front(), hi = refs.front();
    for (const auto& p : refs) {
      lo = {std::min(lo.scan, p.scan), std::min(lo.pixel, p.pixel)};
      hi = {std::max(hi.scan, p.scan), std::max(hi.pixel, p.pixel)};
    }
    out.model.set_domain(lo, hi);
  }

  FitReport& rep = out.report;
  rep.degree = degree;
  rep.matched_count = fit_pairs.size();
  rep.input_count = all_pairs.size();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  rep.condition_number = sv(sv.size() - 1) > 0.0
                             ? sv(0) / sv(sv.size() - 1)
                             : std::numeric_limits<double>::infinity();

  std::vector<double> rs;
  std::vector<double> rp;
  for (std::size_t i = 0; i < fit_pairs.size(); ++i) {
    const Point2 pred = out.model.evaluate(fit_pairs[i].ref);
    Residual res{fit_ids[i], fit_pairs[i].sensed.scan - pred.scan,
                 fit_pairs[i].sensed.pixel - pred.pixel};
    rs.push_back(res.scan);
    rp.push_back(res.pixel);
    rep.residuals.push_back(std::move(res));
  }
  rep.rmse_scan = rms(rs);
  rep.rmse_pixel = rms(rp);

  if (!held.empty()) {
    std::vector<double> hs;
    std::vector<double> hp;
    for (const auto& p : held) {
      const Point2 pred = out.model.evaluate(p.ref);
      hs.push_back(p.sensed.scan - pred.scan);
      hp.push_back(p.sensed.pixel - pred.pixel);
    }
    rep.holdout_rmse_scan = rms(hs);
    rep.holdout_rmse_pixel = rms(hp);
    rep.holdout_count = held.size();
  }

  rep.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return out;
}

FitResult fit_warp(const std::vector<MatchResult>& matches, int degree,
                   const FitOptions& opts) {
  const auto pairs = matched_pairs(matches);
  std::vector<std::string> ids;
  for (const auto& m : matches) {
    if (m.matched()) ids.push_back(m.gcp_id);
  }
  auto result = fit_warp(pairs, degree, opts, ids);
  result.report.input_count = matches.size();
  return result;
}

std::vector<DegreeOutcome> degree_sweep(std::span<const PointPair> pairs,
                                        int min_degree, int max_degree) {
  std::vector<DegreeOutcome> out;
  for (int d = min_degree; d <= max_degree; ++d) {
    DegreeOutcome o;
    o.degree = d;
    try {
      o.report = fit_warp(pairs, d).report;
    } catch (const Error& e) {
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace gcpreg
