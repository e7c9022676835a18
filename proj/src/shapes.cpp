#include "wibp/shapes.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "wibp/kernels/kernels.hpp"

namespace wibp {

std::string_view shape_tag_name(ShapeTag tag) {
  switch (tag) {
    case ShapeTag::ball: return "ball";
    case ShapeTag::ellipsoid: return "ellipsoid";
    case ShapeTag::halfspace: return "halfspace";
    case ShapeTag::polytope: return "polytope";
    case ShapeTag::cylinder: return "cylinder";
    case ShapeTag::translate: return "translate";
    case ShapeTag::quadric: return "quadric";
  }
  return "unknown";
}

std::optional<double> Shape::margin_at(const Vec&) const { return std::nullopt; }

void Shape::contains_batch(const double* block, std::size_t count, const double* offset,
                           std::uint8_t* mask) const {
  const int n = dim();
  Vec x(n);
  for (std::size_t j = 0; j < count; ++j) {
    for (int i = 0; i < n; ++i)
      x[i] = block[static_cast<std::size_t>(i) * count + j] - (offset ? offset[i] : 0.0);
    mask[j] = contains(x) ? 1 : 0;
  }
}

namespace {

void require_finite(const Vec& v, const char* what) {
  if (v.size() == 0 || !v.allFinite()) throw SchemaError(std::string(what) + " must be a non-empty finite vector");
}

// Calls visit(subset) for every k-subset of {0, ..., m-1} in lexicographic order.
// visit returns false to stop early.
bool for_each_subset(int m, int k, const std::function<bool(const std::vector<int>&)>& visit) {
  if (k > m || k < 0) return true;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    if (!visit(idx)) return false;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return true;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

class Ball final : public Shape {
 public:
  Ball(Vec c, double r) : c_(std::move(c)), r_(r) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  ShapeTag tag() const override { return ShapeTag::ball; }
  bool contains(const Vec& x) const override { return (x - c_).squaredNorm() < r_ * r_; }
  double distance(const Vec& x) const override { return std::max((x - c_).norm() - r_, 0.0); }
  Certificate certify() const override { return {c_, r_, c_.norm() + r_}; }
  std::optional<double> margin_at(const Vec& x) const override { return r_ - (x - c_).norm(); }
  void contains_batch(const double* block, std::size_t count, const double* offset,
                      std::uint8_t* mask) const override {
    const auto n = static_cast<std::size_t>(dim());
    Vec center = c_;
    if (offset) for (std::size_t i = 0; i < n; ++i) center[static_cast<Eigen::Index>(i)] += offset[i];
    const std::vector<double> ones(n, 1.0);
    std::vector<double> sq(count);
    const auto& k = kernels::active();
    k.weighted_sqdist(block, count, n, count, center.data(), ones.data(), sq.data());
    k.less_than(sq.data(), r_ * r_, count, mask, false);
  }

 private:
  Vec c_;
  double r_;
};

class Ellipsoid final : public Shape {
 public:
  Ellipsoid(Vec c, Vec a, std::optional<Mat> frame)
      : c_(std::move(c)), a_(std::move(a)), frame_(std::move(frame)) {
    inv_a2_ = a_.array().square().inverse().matrix();
  }
  int dim() const override { return static_cast<int>(c_.size()); }
  ShapeTag tag() const override { return ShapeTag::ellipsoid; }

  Vec local(const Vec& x) const { return frame_ ? Vec(frame_->transpose() * (x - c_)) : Vec(x - c_); }
  double level(const Vec& x) const { return local(x).cwiseProduct(local(x)).dot(inv_a2_); }

  bool contains(const Vec& x) const override { return level(x) < 1.0; }

  double distance(const Vec& x) const override {
    const Vec z = local(x);
    const double q = z.cwiseProduct(z).dot(inv_a2_);
    if (q <= 1.0) return 0.0;
    // closest point p_i = a_i^2 z_i / (a_i^2 + t), with t > 0 the root of
    // sum (a_i z_i / (a_i^2 + t))^2 = 1
    const Vec a2 = a_.array().square().matrix();
    auto excess = [&](double t) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double r = a_[i] * z[i] / (a2[i] + t);
        s += r * r;
      }
      return s - 1.0;
    };
    double lo = 0.0;
    double hi = std::sqrt(a2.cwiseProduct(z.cwiseProduct(z)).sum());
    for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    Vec p(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) p[i] = a2[i] * z[i] / (a2[i] + t);
    return (z - p).norm();
  }

  Certificate certify() const override { return {c_, a_.minCoeff(), c_.norm() + a_.maxCoeff()}; }

  std::optional<double> margin_at(const Vec& x) const override {
    return a_.minCoeff() * (1.0 - std::sqrt(std::max(level(x), 0.0)));
  }

  void contains_batch(const double* block, std::size_t count, const double* offset,
                      std::uint8_t* mask) const override {
    if (frame_) {
      Shape::contains_batch(block, count, offset, mask);
      return;
    }
    const auto n = static_cast<std::size_t>(dim());
    Vec center = c_;
    if (offset) for (std::size_t i = 0; i < n; ++i) center[static_cast<Eigen::Index>(i)] += offset[i];
    std::vector<double> sq(count);
    const auto& k = kernels::active();
    k.weighted_sqdist(block, count, n, count, center.data(), inv_a2_.data(), sq.data());
    k.less_than(sq.data(), 1.0, count, mask, false);
  }

 private:
  Vec c_;
  Vec a_;
  std::optional<Mat> frame_;  // columns: principal axes
  Vec inv_a2_;
};

class Halfspace final : public Shape {
 public:
  Halfspace(Vec a, double c) : a_(std::move(a)), c_(c), norm_(a_.norm()) {}
  int dim() const override { return static_cast<int>(a_.size()); }
  ShapeTag tag() const override { return ShapeTag::halfspace; }
  bool contains(const Vec& x) const override { return a_.dot(x) < c_; }
  double distance(const Vec& x) const override { return std::max((a_.dot(x) - c_) / norm_, 0.0); }
  Certificate certify() const override {
    // the point at signed distance -1 from the hyperplane
    return {a_ * ((c_ - norm_) / (norm_ * norm_)), 1.0, std::nullopt};
  }
  std::optional<double> margin_at(const Vec& x) const override { return (c_ - a_.dot(x)) / norm_; }
  void contains_batch(const double* block, std::size_t count, const double* offset,
                      std::uint8_t* mask) const override {
    const auto n = static_cast<std::size_t>(dim());
    const std::vector<double> zero(n, 0.0);
    std::vector<double> dots(count);
    const auto& k = kernels::active();
    k.affine_dot(block, count, n, count, a_.data(), offset ? offset : zero.data(), dots.data());
    k.less_than(dots.data(), c_, count, mask, false);
  }

 private:
  Vec a_;
  double c_;
  double norm_;
};

class Polytope final : public Shape {
 public:
  explicit Polytope(std::vector<Face> faces) : faces_(std::move(faces)) {
    const int n = static_cast<int>(faces_.front().normal.size());
    const int m = static_cast<int>(faces_.size());
    a_.resize(m, n);
    c_.resize(m);
    norms_.resize(m);
    for (int i = 0; i < m; ++i) {
      a_.row(i) = faces_[static_cast<std::size_t>(i)].normal.transpose();
      c_[i] = faces_[static_cast<std::size_t>(i)].offset;
      norms_[i] = a_.row(i).norm();
    }
    cert_ = compute_certificate();
  }

  int dim() const override { return static_cast<int>(a_.cols()); }
  ShapeTag tag() const override { return ShapeTag::polytope; }

  bool contains(const Vec& x) const override {
    for (Eigen::Index i = 0; i < a_.rows(); ++i)
      if (!(a_.row(i).dot(x) < c_[i])) return false;
    return true;
  }

  void contains_batch(const double* block, std::size_t count, const double* offset,
                      std::uint8_t* mask) const override {
    const auto n = static_cast<std::size_t>(dim());
    const std::vector<double> zero(n, 0.0);
    std::vector<double> dots(count);
    Vec row(dim());
    const auto& k = kernels::active();
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      row = a_.row(i).transpose();
      k.affine_dot(block, count, n, count, row.data(), offset ? offset : zero.data(), dots.data());
      k.less_than(dots.data(), c_[i], count, mask, i > 0);
    }
  }

  std::optional<double> margin_at(const Vec& x) const override {
    double m = kInf;
    for (Eigen::Index i = 0; i < a_.rows(); ++i) m = std::min(m, (c_[i] - a_.row(i).dot(x)) / norms_[i]);
    return m;
  }

  // Exact Euclidean projection by active-set enumeration: the nearest point is
  // the projection onto the affine hull of some face set S with non-negative
  // multipliers (KKT), so the first feasible such projection is optimal.
  double distance(const Vec& x) const override {
    const Vec viol = a_ * x - c_;
    if ((viol.array() <= 0.0).all()) return 0.0;
    const int m = static_cast<int>(a_.rows());
    const int n = dim();
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int p, int q) {
      return viol[p] / norms_[p] > viol[q] / norms_[q];
    });
    const double feas_tol = 1e-10 * (1.0 + c_.cwiseAbs().maxCoeff() + x.norm());
    double best = kInf;
    bool done = false;
    for (int k = 1; k <= std::min(n, m) && !done; ++k) {
      for_each_subset(m, k, [&](const std::vector<int>& pick) {
        Mat as(k, n);
        Vec cs(k);
        for (int r = 0; r < k; ++r) {
          const int f = order[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
          as.row(r) = a_.row(f);
          cs[r] = c_[f];
        }
        const Mat gram = as * as.transpose();
        Eigen::FullPivLU<Mat> lu(gram);
        if (lu.rank() < k) return true;
        const Vec lambda = lu.solve(as * x - cs);
        const Vec z = x - as.transpose() * lambda;
        if (((a_ * z - c_).array() > feas_tol).any()) return true;
        const double d = (x - z).norm();
        best = std::min(best, d);
        if ((lambda.array() >= -1e-12).all()) {
          done = true;
          return false;
        }
        return true;
      });
    }
    return best;
  }

  Certificate certify() const override { return cert_; }

 private:
  Certificate compute_certificate() const {
    const int m = static_cast<int>(a_.rows());
    // Chebyshev center capped at radius 1, in coordinates of the row space.
    Eigen::ColPivHouseholderQR<Mat> qr(a_.transpose());
    const int rank = static_cast<int>(qr.rank());
    if (rank == 0) throw SchemaError("polytope: all face normals vanish");
    const Mat q_full = qr.householderQ();
    const Mat basis = q_full.leftCols(rank);
    const Mat ar = a_ * basis;  // m x rank
    Mat rows(m + 1, rank + 1);
    Vec rhs(m + 1);
    rows.topLeftCorner(m, rank) = ar;
    rows.block(0, rank, m, 1) = norms_;
    rhs.head(m) = c_;
    rows.row(m).setZero();
    rows(m, rank) = 1.0;
    rhs[m] = 1.0;
    double best_r = -kInf;
    Vec best_w;
    for_each_subset(m + 1, rank + 1, [&](const std::vector<int>& pick) {
      Mat sys(rank + 1, rank + 1);
      Vec b(rank + 1);
      for (int r = 0; r <= rank; ++r) {
        sys.row(r) = rows.row(pick[static_cast<std::size_t>(r)]);
        b[r] = rhs[pick[static_cast<std::size_t>(r)]];
      }
      Eigen::FullPivLU<Mat> lu(sys);
      if (lu.rank() < rank + 1) return true;
      const Vec sol = lu.solve(b);
      const double scale = 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff());
      if (((rows * sol - rhs).array() > scale).any()) return true;
      if (sol[rank] > best_r) {
        best_r = sol[rank];
        best_w = sol.head(rank);
      }
      return true;
    });
    if (!(best_r > 1e-9))
      throw SchemaError("polytope: empty interior (faces admit no interior ball)");
    Certificate cert;
    cert.interior = basis * best_w;
    cert.margin = best_r;
    cert.outer_radius = outer_radius(rank);
    return cert;
  }

  std::optional<double> outer_radius(int rank) const {
    const int m = static_cast<int>(a_.rows());
    const int n = dim();
    if (rank < n) return std::nullopt;
    const double ray_tol = 1e-12 * a_.cwiseAbs().maxCoeff();
    bool unbounded = false;
    auto recedes = [&](const Vec& d) { return ((a_ * d).array() <= ray_tol).all(); };
    if (n == 1) {
      unbounded = recedes(Vec::Constant(1, 1.0)) || recedes(Vec::Constant(1, -1.0));
    } else {
      for_each_subset(m, n - 1, [&](const std::vector<int>& pick) {
        Mat sys(n - 1, n);
        for (int r = 0; r < n - 1; ++r) sys.row(r) = a_.row(pick[static_cast<std::size_t>(r)]);
        Eigen::FullPivLU<Mat> lu(sys);
        if (lu.dimensionOfKernel() != 1) return true;
        const Vec d = lu.kernel().col(0).normalized();
        if (recedes(d) || recedes(-d)) {
          unbounded = true;
          return false;
        }
        return true;
      });
    }
    if (unbounded) return std::nullopt;
    double r = 0.0;
    for_each_subset(m, n, [&](const std::vector<int>& pick) {
      Mat sys(n, n);
      Vec b(n);
      for (int k = 0; k < n; ++k) {
        sys.row(k) = a_.row(pick[static_cast<std::size_t>(k)]);
        b[k] = c_[pick[static_cast<std::size_t>(k)]];
      }
      Eigen::FullPivLU<Mat> lu(sys);
      if (lu.rank() < n) return true;
      const Vec v = lu.solve(b);
      if (((a_ * v - c_).array() > 1e-9 * (1.0 + c_.cwiseAbs().maxCoeff())).any()) return true;
      r = std::max(r, v.norm());
      return true;
    });
    return r * (1.0 + 1e-9) + 1e-12;
  }

  std::vector<Face> faces_;
  Mat a_;
  Vec c_;
  Vec norms_;
  Certificate cert_;
};

class Cylinder final : public Shape {
 public:
  Cylinder(ShapePtr base, Vec axis) : base_(std::move(base)), axis_(std::move(axis)) {
    const Certificate bc = base_->certify();
    if (std::abs(axis_.dot(bc.interior)) > 1e-9 * (1.0 + bc.interior.norm()))
      throw SchemaError("cylinder: the base's interior point must be orthogonal to the axis");
    cert_ = {project(bc.interior), bc.margin, std::nullopt};
  }
  Vec project(const Vec& x) const { return x - axis_.dot(x) * axis_; }
  int dim() const override { return base_->dim(); }
  ShapeTag tag() const override { return ShapeTag::cylinder; }
  bool contains(const Vec& x) const override { return base_->contains(project(x)); }
  double distance(const Vec& x) const override { return base_->distance(project(x)); }
  Certificate certify() const override { return cert_; }
  std::optional<double> margin_at(const Vec& x) const override { return base_->margin_at(project(x)); }
  void contains_batch(const double* block, std::size_t count, const double* offset,
                      std::uint8_t* mask) const override {
    const auto n = static_cast<std::size_t>(dim());
    std::vector<double> copy(block, block + n * count);
    kernels::active().reject_direction(copy.data(), count, n, count, axis_.data());
    if (offset) {
      Vec off = Eigen::Map<const Vec>(offset, dim());
      const Vec p = project(off);
      base_->contains_batch(copy.data(), count, p.data(), mask);
    } else {
      base_->contains_batch(copy.data(), count, nullptr, mask);
    }
  }

 private:
  ShapePtr base_;
  Vec axis_;
  Certificate cert_;
};

class Translate final : public Shape {
 public:
  Translate(ShapePtr inner, Vec v) : inner_(std::move(inner)), v_(std::move(v)) {}
  int dim() const override { return inner_->dim(); }
  ShapeTag tag() const override { return ShapeTag::translate; }
  bool contains(const Vec& x) const override { return inner_->contains(x - v_); }
  double distance(const Vec& x) const override { return inner_->distance(x - v_); }
  Certificate certify() const override {
    Certificate c = inner_->certify();
    c.interior += v_;
    if (c.outer_radius) *c.outer_radius += v_.norm();
    return c;
  }
  std::optional<double> margin_at(const Vec& x) const override { return inner_->margin_at(x - v_); }
  void contains_batch(const double* block, std::size_t count, const double* offset,
                      std::uint8_t* mask) const override {
    Vec off = v_;
    if (offset) off += Eigen::Map<const Vec>(offset, dim());
    inner_->contains_batch(block, count, off.data(), mask);
  }

 private:
  ShapePtr inner_;
  Vec v_;
};

class Quadric final : public Shape {
 public:
  Quadric(Mat a, Vec b, double c, std::shared_ptr<const Ellipsoid> shape)
      : a_(std::move(a)), b_(std::move(b)), c_(c), ellipsoid_(std::move(shape)) {}
  int dim() const override { return static_cast<int>(b_.size()); }
  ShapeTag tag() const override { return ShapeTag::quadric; }
  bool contains(const Vec& x) const override { return x.dot(a_ * x) + b_.dot(x) + c_ < 0.0; }
  double distance(const Vec& x) const override { return ellipsoid_->distance(x); }
  Certificate certify() const override { return ellipsoid_->certify(); }
  std::optional<double> margin_at(const Vec& x) const override { return ellipsoid_->margin_at(x); }

 private:
  Mat a_;
  Vec b_;
  double c_;
  std::shared_ptr<const Ellipsoid> ellipsoid_;
};

}  // namespace

ShapePtr make_ball(const Vec& center, double radius) {
  require_finite(center, "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw SchemaError("ball: radius must be positive");
  return std::make_shared<Ball>(center, radius);
}

ShapePtr make_ellipsoid(const Vec& center, const Vec& semiaxes) {
  require_finite(center, "ellipsoid center");
  require_finite(semiaxes, "ellipsoid semiaxes");
  if (center.size() != semiaxes.size()) throw SchemaError("ellipsoid: center/semiaxes dimension mismatch");
  if ((semiaxes.array() <= 0.0).any()) throw SchemaError("ellipsoid: semiaxes must be positive");
  return std::make_shared<Ellipsoid>(center, semiaxes, std::nullopt);
}

ShapePtr make_halfspace(const Vec& normal, double offset) {
  require_finite(normal, "halfspace normal");
  if (!(normal.norm() > 0.0)) throw SchemaError("halfspace: normal must be non-zero");
  if (!std::isfinite(offset)) throw SchemaError("halfspace: offset must be finite");
  return std::make_shared<Halfspace>(normal, offset);
}

ShapePtr make_polytope(std::vector<Face> faces) {
  if (faces.empty()) throw SchemaError("polytope: the face list is empty");
  const auto n = faces.front().normal.size();
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto where = "polytope face " + std::to_string(i);
    if (faces[i].normal.size() != n || n == 0) throw SchemaError(where + ": normal dimension mismatch");
    if (!faces[i].normal.allFinite() || !std::isfinite(faces[i].offset))
      throw SchemaError(where + ": non-finite entry");
    if (!(faces[i].normal.norm() > 0.0)) throw SchemaError(where + ": zero normal");
  }
  return std::make_shared<Polytope>(std::move(faces));
}

ShapePtr make_cylinder(ShapePtr base, const Vec& axis) {
  require_finite(axis, "cylinder axis");
  if (axis.size() != base->dim()) throw SchemaError("cylinder: axis dimension mismatch");
  if (!(axis.norm() > 0.0)) throw SchemaError("cylinder: axis must be non-zero");
  return std::make_shared<Cylinder>(std::move(base), axis.normalized());
}

ShapePtr make_translate(ShapePtr inner, const Vec& shift) {
  require_finite(shift, "translate vector");
  if (shift.size() != inner->dim()) throw SchemaError("translate: dimension mismatch");
  return std::make_shared<Translate>(std::move(inner), shift);
}

ShapePtr make_quadric(const Mat& a, const Vec& b, double c) {
  const auto n = b.size();
  if (a.rows() != n || a.cols() != n) throw SchemaError("quadric: matrix/linear dimension mismatch");
  if (!a.allFinite() || !b.allFinite() || !std::isfinite(c)) throw SchemaError("quadric: non-finite entry");
  if (!(a - a.transpose()).isZero(1e-12 * (1.0 + a.cwiseAbs().maxCoeff())))
    throw SchemaError("quadric: matrix must be symmetric");
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw SchemaError("quadric: matrix must be positive definite (the level set is not a bounded convex body)");
  const Vec center = -0.5 * sym.ldlt().solve(b);
  const double level = center.dot(sym * center) - c;
  if (!(level > 0.0)) throw SchemaError("quadric: empty level set");
  const Vec semiaxes = (level / es.eigenvalues().array()).sqrt().matrix();
  auto ell = std::make_shared<Ellipsoid>(center, semiaxes, Mat(es.eigenvectors()));
  return std::make_shared<Quadric>(sym, b, c, std::move(ell));
}

}  // namespace wibp
