// Nonsymmetric eigensolver for the oracles, kept independent of Eigen's
// decompositions so the relaxation and the checks share no eigen code.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "dstab/error.hpp"
#include "dstab/oracle.hpp"

namespace dstab {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

void balance(MatrixXd& a) {
  const double radix = 2.0;
  const double sqrdx = radix * radix;
  const Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

void hessenberg(MatrixXd& a) {
  const Index n = a.rows();
  for (Index k = 0; k + 2 < n; ++k) {
    Eigen::VectorXd v = a.col(k).tail(n - k - 1);
    const double alpha = v.norm();
    if (alpha == 0.0) continue;
    v[0] += v[0] >= 0.0 ? alpha : -alpha;
    const double vn = v.squaredNorm();
    if (vn == 0.0) continue;
    // H = I - 2 v v^T / v^T v applied on both sides.
    auto block = a.bottomRows(n - k - 1);
    Eigen::RowVectorXd left = v.transpose() * block;
    block.noalias() -= (2.0 / vn) * v * left;
    auto cols = a.rightCols(n - k - 1);
    Eigen::VectorXd right = cols * v;
    cols.noalias() -= (2.0 / vn) * right * v.transpose();
    for (Index i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (destroys a).
std::vector<std::complex<double>> hqr(MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  const double eps = std::numeric_limits<double>::epsilon();
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  }
  int nn = n - 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        w[static_cast<std::size_t>(nn--)] = x + t;
      } else {
        y = a(nn - 1, nn - 1);
        double ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + ww;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            w[static_cast<std::size_t>(nn - 1)] = w[static_cast<std::size_t>(nn)] = x + z;
            if (z != 0.0) w[static_cast<std::size_t>(nn)] = x - ww / z;
          } else {
            w[static_cast<std::size_t>(nn)] = {x + p, -z};
            w[static_cast<std::size_t>(nn - 1)] = std::conj(w[static_cast<std::size_t>(nn)]);
          }
          nn -= 2;
        } else {
          if (its == 60) throw Error("eigenvalues: QR iteration did not converge");
          if (its == 10 || its == 20 || its == 40) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return w;
}

bool eigen_order(const std::complex<double>& a, const std::complex<double>& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error("eigenvalues: matrix is not square");
  if (m.rows() == 0) return {};
  if (!m.allFinite()) throw Error("eigenvalues: matrix has non-finite entries");
  MatrixXd a = m;
  balance(a);
  hessenberg(a);
  auto w = hqr(a);
  std::sort(w.begin(), w.end(), eigen_order);
  return w;
}

std::vector<Eigenpair> eigenpairs(const Eigen::MatrixXd& m) {
  const auto values = eigenvalues(m);
  const Index n = m.rows();
  const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
  const double scale = std::max(1.0, m.cwiseAbs().rowwise().sum().maxCoeff());
  std::vector<Eigenpair> out;
  out.reserve(values.size());
  for (const auto& lambda : values) {
    Eigenpair best;
    best.value = lambda;
    best.residual = std::numeric_limits<double>::infinity();
    // Inverse iteration with a slightly perturbed shift.
    for (double rel : {1e-13, 1e-10, 1e-7}) {
      const std::complex<double> shift = lambda + std::complex<double>(rel * scale, 0.0);
      Eigen::MatrixXcd shifted = mc;
      shifted.diagonal().array() -= shift;
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
      Eigen::VectorXcd v(n);
      for (Index i = 0; i < n; ++i) v[i] = {1.0 + 0.1 * static_cast<double>(i), 0.0};
      v.normalize();
      bool finite = true;
      for (int step = 0; step < 3 && finite; ++step) {
        v = lu.solve(v);
        const double nv = v.norm();
        finite = std::isfinite(nv) && nv > 0.0;
        if (finite) v /= nv;
      }
      if (!finite) continue;
      Eigen::VectorXcd res = mc * v - lambda * v;
      const double rn = res.norm();
      if (rn < best.residual) {
        best.residual = rn;
        best.vector = v;
      }
      if (rn <= 1e-12 * scale) break;
    }
    if (!std::isfinite(best.residual)) throw Error("eigenpairs: inverse iteration failed");
    out.push_back(std::move(best));
  }
  return out;
}

}  // namespace dstab
