// Copyright 2026 The SPADE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPADE_TESTS_ORACLES_HPP_
#define SPADE_TESTS_ORACLES_HPP_

// Reference implementations written straight from the formulas, with no
// shared code paths with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Least squares [z 1][s t]^T = v through a QR solve.
inline std::pair<double, double> affine_lsq(const std::vector<double>& z, const std::vector<double>& v) {
  Eigen::MatrixXd a(z.size(), 2);
  Eigen::VectorXd b(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    a(i, 0) = z[i];
    a(i, 1) = 1.0;
    b(i) = v[i];
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
  return {x(0), x(1)};
}

// Direct double loop of the joint bilateral sum. Values of 0 mean "no
// neighbour".
inline std::vector<double> jbu(int w, int h, const std::vector<double>& eps, const std::vector<int>& known,
                               const std::vector<double>& guide, int r, double ss, double sr) {
  std::vector<double> out(eps.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      long double num = 0, den = 0;
      for (int qy = 0; qy < h; ++qy) {
        for (int qx = 0; qx < w; ++qx) {
          if (std::abs(qx - x) > r || std::abs(qy - y) > r) continue;
          if (!known[qy * w + qx]) continue;
          const double d2 = double((qx - x) * (qx - x) + (qy - y) * (qy - y));
          const double dg = guide[y * w + x] - guide[qy * w + qx];
          const double f = std::exp(-d2 / (2 * ss * ss));
          const double g = std::exp(-dg * dg / (2 * sr * sr));
          num += (long double)(eps[qy * w + qx] * f * g);
          den += (long double)(f * g);
        }
      }
      if (den > 0) out[y * w + x] = double(num / den);
    }
  }
  return out;
}

// Plain softmax(q k^T / sqrt(d)) v per head; x is [L, C] row major.
inline std::vector<double> dense_attention(const std::vector<double>& x, int len, int channels, int heads) {
  const int d = channels / heads;
  std::vector<double> out(x.size(), 0.0);
  for (int hd = 0; hd < heads; ++hd) {
    for (int i = 0; i < len; ++i) {
      std::vector<double> s(len);
      double mx = -1e300;
      for (int j = 0; j < len; ++j) {
        double dot = 0;
        for (int c = 0; c < d; ++c) dot += x[i * channels + hd * d + c] * x[j * channels + hd * d + c];
        s[j] = dot / std::sqrt(double(d));
        mx = std::max(mx, s[j]);
      }
      double z = 0;
      for (double& e : s) z += (e = std::exp(e - mx));
      for (int j = 0; j < len; ++j) {
        for (int c = 0; c < d; ++c) out[i * channels + hd * d + c] += s[j] / z * x[j * channels + hd * d + c];
      }
    }
  }
  return out;
}

struct Metrics {
  double mae, rmse, absrel, silog, imae;
};

inline Metrics metrics(const std::vector<double>& p, const std::vector<double>& g, double cap) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 0 && g[i] <= cap) idx.push_back(i);
  }
  const double n = double(idx.size());
  Metrics m{0, 0, 0, 0, 0};
  double alpha = 0;
  for (auto i : idx) alpha += std::log(g[i]) - std::log(p[i]);
  alpha /= n;
  for (auto i : idx) {
    m.mae += std::abs(p[i] - g[i]) / n;
    m.rmse += (p[i] - g[i]) * (p[i] - g[i]) / n;
    m.absrel += std::abs(p[i] - g[i]) / g[i] / n;
    m.imae += std::abs(1 / p[i] - 1 / g[i]) / n;
    const double e = std::log(p[i]) - std::log(g[i]) + alpha;
    m.silog += e * e / n;
  }
  m.rmse = std::sqrt(m.rmse);
  m.silog = std::sqrt(m.silog);
  return m;
}

inline double rmse_loss(const std::vector<double>& p, const std::vector<double>& t, const std::vector<double>& m) {
  double acc = 0, n = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (m[i] == 0) continue;
    acc += (p[i] - t[i]) * (p[i] - t[i]);
    n += 1;
  }
  return std::sqrt(acc / n);
}

inline double silog_loss(const std::vector<double>& p, const std::vector<double>& t, const std::vector<double>& m) {
  double s1 = 0, s2 = 0, n = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (m[i] == 0) continue;
    const double g = std::log(p[i]) - std::log(t[i]);
    s1 += g;
    s2 += g * g;
    n += 1;
  }
  const double inner = s2 / n - 0.85 * (s1 / n) * (s1 / n);
  return 10.0 * std::sqrt(std::max(0.0, inner));
}

// Triple loop: scales, rows, columns. Downsampling is a masked 2x2 mean.
inline double grad_loss(std::vector<double> p, std::vector<double> t, std::vector<double> m, int h, int w,
                        int scales = 3) {
  std::vector<double> r(p.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = t[i] - p[i];
  double total = 0;
  int used = 0;
  for (int k = 0; k < scales; ++k) {
    if (k > 0) {
      const int nh = h / 2, nw = w / 2;
      std::vector<double> nr(nh * nw, 0.0), nm(nh * nw, 0.0);
      for (int y = 0; y < nh; ++y) {
        for (int x = 0; x < nw; ++x) {
          double sum = 0, cnt = 0;
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const int i = (2 * y + dy) * w + 2 * x + dx;
              if (m[i] != 0) {
                sum += r[i];
                cnt += 1;
              }
            }
          }
          if (cnt > 0) {
            nr[y * nw + x] = sum / cnt;
            nm[y * nw + x] = 1;
          }
        }
      }
      r = nr;
      m = nm;
      h = nh;
      w = nw;
    }
    if (h < 2 || w < 2) break;
    double cnt = 0, acc = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int i = y * w + x;
        cnt += m[i];
        if (x + 1 < w && m[i] != 0 && m[i + 1] != 0) acc += std::abs(r[i + 1] - r[i]);
        if (y + 1 < h && m[i] != 0 && m[i + w] != 0) acc += std::abs(r[i + w] - r[i]);
      }
    }
    if (cnt == 0) break;
    total += acc / cnt;
    ++used;
  }
  return total / used;
}

}  // namespace oracle

#endif  // SPADE_TESTS_ORACLES_HPP_
