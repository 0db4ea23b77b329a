#pragma once

#include <array>
#include <vector>

#include "asep/common.hpp"
#include "asep/quad.hpp"

namespace asep::detail {

// Integrand of the form prod_a A_a(i_a) prod_{a<b} B_ab(i_a, i_b) det[D_ab]
// on a product of trapezoid node sets. Weights are folded into A.
struct Tabulated {
  int k = 0;
  std::vector<int> dims;
  std::vector<std::vector<cplx>> single;  // k tables
  std::vector<std::vector<cplx>> pair;    // k*k slots, filled for a < b, [i_a * dims[b] + i_b]
  bool has_det = false;
  std::vector<std::vector<cplx>> det;  // k*k slots; diagonal tables have size dims[a]

  explicit Tabulated(int k_) : k(k_), dims(k_), single(k_), pair(k_ * k_), det(k_ * k_) {}
  bool has_pair(int a, int b) const { return !pair[a * k + b].empty(); }
};

// Determinant of a k x k row-major matrix (destroys m). Cofactor formulas up
// to k = 4, partial-pivot LU beyond.
inline cplx small_det(cplx* m, int k) {
  if (k == 1) return m[0];
  if (k == 2) return m[0] * m[3] - m[1] * m[2];
  if (k == 3)
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  if (k == 4) {
    // Expansion in 2x2 minors of the top and bottom row pairs.
    cplx s0 = m[0] * m[5] - m[1] * m[4], s1 = m[0] * m[6] - m[2] * m[4], s2 = m[0] * m[7] - m[3] * m[4];
    cplx s3 = m[1] * m[6] - m[2] * m[5], s4 = m[1] * m[7] - m[3] * m[5], s5 = m[2] * m[7] - m[3] * m[6];
    cplx c5 = m[10] * m[15] - m[11] * m[14], c4 = m[9] * m[15] - m[11] * m[13], c3 = m[9] * m[14] - m[10] * m[13];
    cplx c2 = m[8] * m[13] - m[9] * m[12], c1 = m[8] * m[14] - m[10] * m[12], c0 = m[8] * m[15] - m[11] * m[12];
    return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c0 - s4 * c1 + s5 * c2;
  }
  cplx d = 1.0;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    double best = std::abs(m[c * k + c]);
    for (int r = c + 1; r < k; ++r)
      if (std::abs(m[r * k + c]) > best) best = std::abs(m[r * k + c]), piv = r;
    if (best == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(m[c * k + j], m[piv * k + j]);
      d = -d;
    }
    cplx p = m[c * k + c];
    d *= p;
    for (int r = c + 1; r < k; ++r) {
      cplx f = m[r * k + c] / p;
      for (int j = c + 1; j < k; ++j) m[r * k + j] -= f * m[c * k + j];
    }
  }
  return d;
}

// Adjugate of an n x n row-major matrix, n <= 3.
inline void small_adj(const cplx* m, int n, cplx* adj) {
  if (n == 1) {
    adj[0] = 1.0;
  } else if (n == 2) {
    adj[0] = m[3], adj[1] = -m[1], adj[2] = -m[2], adj[3] = m[0];
  } else {
    adj[0] = m[4] * m[8] - m[5] * m[7];
    adj[1] = m[2] * m[7] - m[1] * m[8];
    adj[2] = m[1] * m[5] - m[2] * m[4];
    adj[3] = m[5] * m[6] - m[3] * m[8];
    adj[4] = m[0] * m[8] - m[2] * m[6];
    adj[5] = m[2] * m[3] - m[0] * m[5];
    adj[6] = m[3] * m[7] - m[4] * m[6];
    adj[7] = m[1] * m[6] - m[0] * m[7];
    adj[8] = m[0] * m[4] - m[1] * m[3];
  }
}

// stride 2 evaluates the same trapezoid rule on every other node, which is
// the rule with half the nodes on each closed piece. The last variable is
// summed innermost; factors of the others are hoisted, and the determinant
// is expanded bilinearly in its last row and column.
inline cplx tabulated_sum(const Tabulated& T, int stride, bool parallel) {
  const int k = T.k;
  std::vector<int> dims(k);
  for (int a = 0; a < k; ++a) dims[a] = (T.dims[a] + stride - 1) / stride;
  check_product_cost(dims);
  const int L = k - 1;
  const int nl = dims[L];
  auto at = [&](int a, int b, int ia, int ib) -> cplx {
    return T.det[a * k + b][static_cast<std::size_t>(ia) * T.dims[b] + ib];
  };
  auto term = [&](const int* idx) {
    std::array<int, 8> i{};
    for (int a = 0; a < L; ++a) i[a] = idx[a] * stride;
    cplx outer = 1.0;
    for (int a = 0; a < L; ++a) outer *= T.single[a][i[a]];
    for (int a = 0; a < L; ++a)
      for (int b = a + 1; b < L; ++b)
        if (T.has_pair(a, b)) outer *= T.pair[a * k + b][static_cast<std::size_t>(i[a]) * T.dims[b] + i[b]];
    std::array<cplx, 64> m;
    std::array<cplx, 16> adj;
    cplx dlead = 1.0;
    const bool bilinear = T.has_det && L <= 3;
    if (bilinear && L > 0) {
      for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b) m[a * L + b] = a == b ? T.det[a * k + a][i[a]] : at(a, b, i[a], i[b]);
      small_adj(m.data(), L, adj.data());
      std::array<cplx, 16> tmp;
      std::copy(m.begin(), m.begin() + L * L, tmp.begin());
      dlead = small_det(tmp.data(), L);
    }
    cplx acc = 0.0;
    for (int jl = 0; jl < nl; ++jl) {
      const int il = jl * stride;
      cplx v = T.single[L][il];
      for (int a = 0; a < L; ++a)
        if (T.has_pair(a, L)) v *= T.pair[a * k + L][static_cast<std::size_t>(i[a]) * T.dims[L] + il];
      if (bilinear) {
        cplx d = T.det[L * k + L][il] * dlead;
        for (int a = 0; a < L; ++a) {
          cplx col = at(a, L, i[a], il);
          for (int b = 0; b < L; ++b) d -= col * at(L, b, il, i[b]) * adj[b * L + a];
        }
        v *= d;
      } else if (T.has_det) {
        i[L] = il;
        for (int a = 0; a < k; ++a)
          for (int b = 0; b < k; ++b) m[a * k + b] = a == b ? T.det[a * k + a][i[a]] : at(a, b, i[a], i[b]);
        v *= small_det(m.data(), k);
      }
      acc += v;
    }
    return outer * acc;
  };
  cplx s;
  if (L == 0) {
    int one = 0;
    s = term(&one);
  } else {
    std::vector<int> od(dims.begin(), dims.begin() + L);
    s = tensor_sum_impl(od, term, parallel);
  }
  for (int a = 0; a < k; ++a) s *= static_cast<double>(stride);
  return s;
}

}  // namespace asep::detail
