#pragma once

// Finitely generated groups for walk experiments: Z^d with the standard basis
// and free groups F_k with reduced words.  Elements are canonical strings so
// they can key maps and CSV columns directly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyheat/errors.hpp"

namespace polyheat {

struct GroupModel {
  enum class Kind { zd, free_group };
  Kind kind = Kind::zd;
  int rank = 1;  // d for Z^d, k for F_k

  int generator_count() const { return 2 * rank; }
};

inline GroupModel zd_group(int d) {
  if (d < 1) throw RangeError("Z^d needs d >= 1");
  return {GroupModel::Kind::zd, d};
}
inline GroupModel free_group(int k) {
  if (k < 1 || k > 13) throw RangeError("F_k supported for 1 <= k <= 13");
  return {GroupModel::Kind::free_group, k};
}

namespace grp {

inline std::vector<long long> zd_parse(const std::string& w, int d) {
  std::vector<long long> v;
  size_t pos = 0;
  while (pos <= w.size()) {
    size_t comma = w.find(',', pos);
    std::string tok = w.substr(pos, comma == std::string::npos ? std::string::npos
                                                               : comma - pos);
    try {
      v.push_back(std::stoll(tok));
    } catch (...) {
      throw ParseError("bad Z^d element: " + w);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (static_cast<int>(v.size()) != d)
    throw ParseError("Z^" + std::to_string(d) + " element needs " +
                     std::to_string(d) + " coordinates: " + w);
  return v;
}

inline std::string zd_str(const std::vector<long long>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

inline bool is_free_letter(char c, int k) {
  char lo = static_cast<char>(std::tolower(c));
  return lo >= 'a' && lo < 'a' + k;
}

inline char letter_inverse(char c) {
  return std::isupper(c) ? static_cast<char>(std::tolower(c))
                         : static_cast<char>(std::toupper(c));
}

inline std::string free_reduce(const std::string& w, int k) {
  std::string out;
  for (char c : w) {
    if (c == 'e' && w.size() == 1) break;
    if (!is_free_letter(c, k))
      throw ParseError("bad free-group letter '" + std::string(1, c) + "'");
    if (!out.empty() && out.back() == letter_inverse(c))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

}  // namespace grp

inline std::string group_identity(const GroupModel& G) {
  if (G.kind == GroupModel::Kind::zd)
    return grp::zd_str(std::vector<long long>(G.rank, 0));
  return "e";
}

// Generating set S = S^{-1}, in a fixed deterministic order.
inline std::vector<std::string> group_generators(const GroupModel& G) {
  std::vector<std::string> S;
  if (G.kind == GroupModel::Kind::zd) {
    for (int i = 0; i < G.rank; ++i) {
      std::vector<long long> v(G.rank, 0);
      v[i] = 1;
      S.push_back(grp::zd_str(v));
      v[i] = -1;
      S.push_back(grp::zd_str(v));
    }
  } else {
    for (int i = 0; i < G.rank; ++i) {
      S.push_back(std::string(1, static_cast<char>('a' + i)));
      S.push_back(std::string(1, static_cast<char>('A' + i)));
    }
  }
  return S;
}

inline std::string group_mul(const GroupModel& G, const std::string& a,
                             const std::string& b) {
  if (G.kind == GroupModel::Kind::zd) {
    auto va = grp::zd_parse(a, G.rank), vb = grp::zd_parse(b, G.rank);
    for (int i = 0; i < G.rank; ++i) va[i] += vb[i];
    return grp::zd_str(va);
  }
  std::string wa = grp::free_reduce(a, G.rank), wb = grp::free_reduce(b, G.rank);
  std::string r = grp::free_reduce(wa + wb, G.rank);
  return r.empty() ? "e" : r;
}

inline std::string group_inverse(const GroupModel& G, const std::string& a) {
  if (G.kind == GroupModel::Kind::zd) {
    auto v = grp::zd_parse(a, G.rank);
    for (auto& c : v) c = -c;
    return grp::zd_str(v);
  }
  std::string w = grp::free_reduce(a, G.rank);
  std::string r;
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    r.push_back(grp::letter_inverse(*it));
  return r.empty() ? "e" : r;
}

inline int word_length(const GroupModel& G, const std::string& a) {
  if (G.kind == GroupModel::Kind::zd) {
    auto v = grp::zd_parse(a, G.rank);
    long long n = 0;
    for (auto c : v) n += std::llabs(c);
    return static_cast<int>(n);
  }
  return static_cast<int>(grp::free_reduce(a, G.rank).size());
}

// Word-metric ball B_G(r), breadth-first so words come out sorted by length
// with deterministic order inside each layer.
inline std::vector<std::string> group_ball(const GroupModel& G, int radius) {
  if (radius < 0) throw RangeError("ball radius must be >= 0");
  std::vector<std::string> order = {group_identity(G)};
  std::set<std::string> seen(order.begin(), order.end());
  auto S = group_generators(G);
  size_t layer_begin = 0;
  for (int r = 0; r < radius; ++r) {
    size_t layer_end = order.size();
    for (size_t i = layer_begin; i < layer_end; ++i)
      for (const auto& s : S) {
        std::string w = group_mul(G, order[i], s);
        if (seen.insert(w).second) order.push_back(w);
      }
    layer_begin = layer_end;
    if (order.size() > 2000000) throw SizeError("group ball too large");
  }
  return order;
}

// Exact distribution of the uniform-on-S walk after n steps.
// Z^d: dense DP over the coordinate box.  F_k: distributions are radial, so a
// word-length profile suffices.
class WalkDistribution {
 public:
  WalkDistribution(const GroupModel& G, int n) : G_(G), n_(n) {
    if (n < 0) throw RangeError("step count must be >= 0");
    if (G.kind == GroupModel::Kind::zd) {
      side_ = 2 * n + 1;
      double cells = std::pow(static_cast<double>(side_), G.rank);
      if (cells > 8e7) throw SizeError("Z^d walk ball exceeds memory budget");
      std::vector<double> cur(static_cast<size_t>(cells), 0.0);
      cur[flat_index(std::vector<long long>(G.rank, 0))] = 1.0;
      std::vector<double> next(cur.size());
      double step = 1.0 / G.generator_count();
      std::vector<size_t> strides = strides_for();
      for (int s = 0; s < n; ++s) {
        std::fill(next.begin(), next.end(), 0.0);
        for (size_t idx = 0; idx < cur.size(); ++idx) {
          double m = cur[idx];
          if (m == 0) continue;
          for (int axis = 0; axis < G.rank; ++axis) {
            size_t coord = (idx / strides[axis]) % side_;
            if (coord + 1 < static_cast<size_t>(side_))
              next[idx + strides[axis]] += m * step;
            if (coord > 0) next[idx - strides[axis]] += m * step;
          }
        }
        cur.swap(next);
      }
      zd_mass_.swap(cur);
    } else {
      // profile[d] = total mass at word length d.  From d = 0 every generator
      // moves outward; from d > 0 one generator cancels, 2k-1 extend.
      profile_.assign(static_cast<size_t>(n) + 1, 0.0);
      profile_[0] = 1.0;
      std::vector<double> next(profile_.size());
      double k2 = G.generator_count();
      for (int s = 0; s < n; ++s) {
        std::fill(next.begin(), next.end(), 0.0);
        for (size_t d = 0; d < profile_.size(); ++d) {
          double m = profile_[d];
          if (m == 0) continue;
          if (d == 0) {
            next[1] += m;
          } else {
            next[d - 1] += m * (1.0 / k2);
            if (d + 1 < next.size()) next[d + 1] += m * ((k2 - 1.0) / k2);
          }
        }
        profile_.swap(next);
      }
    }
  }

  double mass_at(const std::string& g) const {
    if (G_.kind == GroupModel::Kind::zd) {
      auto v = grp::zd_parse(g, G_.rank);
      for (auto c : v)
        if (std::llabs(c) > n_) return 0.0;
      return zd_mass_[flat_index(v)];
    }
    int d = word_length(G_, g);
    if (d > n_) return 0.0;
    // profile mass is spread uniformly over the sphere of that radius
    double sphere = d == 0 ? 1.0
                           : 2.0 * G_.rank *
                                 std::pow(2.0 * G_.rank - 1.0, d - 1);
    return profile_[d] / sphere;
  }

  double total_mass() const {
    double s = 0;
    if (G_.kind == GroupModel::Kind::zd)
      for (double m : zd_mass_) s += m;
    else
      for (double m : profile_) s += m;
    return s;
  }

  const std::vector<double>& length_profile() const {
    if (G_.kind != GroupModel::Kind::free_group)
      throw RangeError("length profile only stored for free groups");
    return profile_;
  }

 private:
  GroupModel G_;
  int n_;
  int side_ = 0;
  std::vector<double> zd_mass_;
  std::vector<double> profile_;

  std::vector<size_t> strides_for() const {
    std::vector<size_t> st(G_.rank);
    size_t acc = 1;
    for (int i = 0; i < G_.rank; ++i) {
      st[i] = acc;
      acc *= side_;
    }
    return st;
  }
  size_t flat_index(const std::vector<long long>& v) const {
    size_t idx = 0, acc = 1;
    for (int i = 0; i < G_.rank; ++i) {
      idx += static_cast<size_t>(v[i] + n_) * acc;
      acc *= side_;
    }
    return idx;
  }
};

inline double group_return_probability(const GroupModel& G, int n) {
  WalkDistribution W(G, n);
  return W.mass_at(group_identity(G));
}

// Exact count of length-2n walks on Z returning to 0, i.e. C(2n, n); the
// return probability is this over 2^(2n).  Kept in integers so tests can
// match binomial values exactly.
inline std::uint64_t z1_return_count(int n) {
  if (n < 0 || n > 31) throw RangeError("z1_return_count supports 0 <= n <= 31");
  std::vector<std::uint64_t> cur(4 * n + 1, 0), next(4 * n + 1, 0);
  cur[2 * n] = 1;
  for (int s = 0; s < 2 * n; ++s) {
    std::fill(next.begin(), next.end(), 0);
    for (int i = 0; i <= 4 * n; ++i) {
      if (!cur[i]) continue;
      if (i > 0) next[i - 1] += cur[i];
      if (i < 4 * n) next[i + 1] += cur[i];
    }
    cur.swap(next);
  }
  return cur[2 * n];
}

// Spectrum of the kill-on-exit walk kernel K_A, decreasing |beta|.
inline std::vector<double> restricted_walk_spectrum(
    const GroupModel& G, const std::vector<std::string>& A) {
  if (A.empty()) throw RangeError("restricted walk needs a nonempty subset");
  std::map<std::string, int> index;
  for (size_t i = 0; i < A.size(); ++i) {
    std::string c = G.kind == GroupModel::Kind::zd ? grp::zd_str(grp::zd_parse(A[i], G.rank))
                                                   : group_mul(G, A[i], "e");
    if (!index.emplace(c, static_cast<int>(i)).second)
      throw RangeError("subset has repeated element: " + A[i]);
  }
  int m = static_cast<int>(A.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  auto S = group_generators(G);
  double w = 1.0 / S.size();
  for (int i = 0; i < m; ++i)
    for (const auto& s : S) {
      auto it = index.find(group_mul(G, A[i], s));
      if (it != index.end()) K(i, it->second) += w;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  std::vector<double> beta(es.eigenvalues().data(), es.eigenvalues().data() + m);
  std::sort(beta.begin(), beta.end(), [](double a, double b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return a > b;
  });
  return beta;
}

inline std::vector<std::string> folner_set(const GroupModel& G, int i) {
  if (G.kind != GroupModel::Kind::zd)
    throw AmenabilityError("no Folner sequence for free groups");
  if (i < 0) throw RangeError("Folner index must be >= 0");
  double count = std::pow(2.0 * i + 1.0, G.rank);
  if (count > 5e7) throw SizeError("Folner box too large");
  std::vector<std::string> F;
  std::vector<long long> v(G.rank, -i);
  while (true) {
    F.push_back(grp::zd_str(v));
    int axis = 0;
    while (axis < G.rank && v[axis] == i) {
      v[axis] = -i;
      ++axis;
    }
    if (axis == G.rank) break;
    ++v[axis];
  }
  return F;
}

inline double folner_ratio(const GroupModel& G, const std::vector<std::string>& Q,
                           int i) {
  auto F = folner_set(G, i);
  std::set<std::string> QF(F.begin(), F.end());
  for (const auto& q : Q)
    for (const auto& f : F) QF.insert(group_mul(G, q, f));
  return static_cast<double>(QF.size()) / static_cast<double>(F.size());
}

}  // namespace polyheat
