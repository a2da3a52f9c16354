#pragma once

/** Synthetic haplotype-assembly instances and their scores.
 *
 * An instance draws bipolar vectors h (length n) and c (length m), forms the
 * rank-one read matrix c h^T, observes each entry independently with
 * probability pd and flips the sign of exactly round(err * |Omega|) observed
 * entries chosen uniformly without replacement.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "haprtr/errors.hpp"
#include "haprtr/objective.hpp"
#include "haprtr/random.hpp"
#include "haprtr/sphere.hpp"

namespace haprtr {

/// A +/-1 string over n sites.
class Haplotype {
public:
  explicit Haplotype(Eigen::VectorXi sites) : sites_(std::move(sites)) {
    for (Eigen::Index j = 0; j < sites_.size(); ++j)
      if (sites_[j] != 1 && sites_[j] != -1)
        throw ContractError("Haplotype: sites must be +1 or -1");
  }

  /// Parses a string over {'+', '-'}.
  static Haplotype from_string(std::string_view s) {
    Eigen::VectorXi v(static_cast<Eigen::Index>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] == '+')
        v[static_cast<Eigen::Index>(j)] = 1;
      else if (s[j] == '-')
        v[static_cast<Eigen::Index>(j)] = -1;
      else
        throw ContractError("Haplotype: unexpected character '" +
                            std::string(1, s[j]) + "'");
    }
    return Haplotype(std::move(v));
  }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(sites_.size()), '+');
    for (Eigen::Index j = 0; j < sites_.size(); ++j)
      if (sites_[j] < 0)
        s[static_cast<std::size_t>(j)] = '-';
    return s;
  }

  const Eigen::VectorXi &sites() const { return sites_; }
  Eigen::Index size() const { return sites_.size(); }
  int operator[](Eigen::Index j) const { return sites_[j]; }

  Haplotype operator-() const { return Haplotype(-sites_); }

  friend bool operator==(const Haplotype &a, const Haplotype &b) {
    return a.sites_.size() == b.sites_.size() && a.sites_ == b.sites_;
  }

private:
  Eigen::VectorXi sites_;
};

struct Instance {
  Haplotype truth_h;
  Eigen::VectorXi truth_c;
  ReadMatrix reads;
  double pd = 1.0;
  double err = 0.0;
  std::uint64_t seed = 0;
  /// Observed entries whose sign was flipped, as (row, col) pairs.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> flipped;
};

namespace detail {

inline Eigen::VectorXi random_signs(Eigen::Index n, Rng &rng) {
  Eigen::VectorXi v(n);
  for (Eigen::Index j = 0; j < n; ++j)
    v[j] = (rng() >> 63) ? 1 : -1;
  return v;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_uniform(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Number of observed entries flipped for an error ratio `err`.
inline std::size_t flip_count(double err, std::size_t observed) {
  return static_cast<std::size_t>(
      std::llround(err * static_cast<double>(observed)));
}

inline Instance generate_instance(Eigen::Index m, Eigen::Index n, double pd,
                                  double err, std::uint64_t seed) {
  if (m < 1)
    throw ParameterError("generate_instance: m must be at least 1");
  if (n < 2)
    throw ParameterError("generate_instance: n must be at least 2");
  if (!(pd > 0.0 && pd <= 1.0))
    throw ParameterError("generate_instance: pd must lie in (0, 1]");
  if (!(err >= 0.0 && err < 0.5))
    throw ParameterError("generate_instance: err must lie in [0, 0.5)");

  Rng h_rng = substream(seed, Stream::Haplotype);
  Rng c_rng = substream(seed, Stream::ReadSigns);
  Rng mask_rng = substream(seed, Stream::Mask);
  Rng flip_rng = substream(seed, Stream::Flips);

  const Eigen::VectorXi h = detail::random_signs(n, h_rng);
  const Eigen::VectorXi c = detail::random_signs(m, c_rng);

  Matrix values = (c.cast<double>() * h.cast<double>().transpose());
  Mask mask(m, n);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> observed;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      mask(i, j) = pd >= 1.0 || detail::unit_uniform(mask_rng) < pd;
      if (mask(i, j))
        observed.emplace_back(i, j);
    }

  // Partial Fisher-Yates: the first k slots become a uniform k-subset.
  const std::size_t k = flip_count(err, observed.size());
  for (std::size_t s = 0; s < k; ++s) {
    std::uniform_int_distribution<std::size_t> pick(s, observed.size() - 1);
    std::swap(observed[s], observed[pick(flip_rng)]);
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> flipped(
      observed.begin(), observed.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(flipped.begin(), flipped.end());
  for (const auto &[i, j] : flipped)
    values(i, j) = -values(i, j);

  return Instance{Haplotype(h), c, ReadMatrix(values, std::move(mask)),
                  pd,           err, seed, std::move(flipped)};
}

/// P_Omega: observed entries pass through, the rest become 0.
inline Matrix apply_sampling(const Matrix &full, const Mask &mask) {
  if (full.rows() != mask.rows() || full.cols() != mask.cols())
    throw DimensionError("apply_sampling: matrix and mask shapes differ");
  return mask.select(full, Matrix::Zero(full.rows(), full.cols()));
}

/// Entrywise sign with sign(0) = +1.
inline Haplotype decode(const Vector &v) {
  Eigen::VectorXi s(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j)
    s[j] = v[j] >= 0.0 ? 1 : -1;
  return Haplotype(std::move(s));
}

inline Haplotype decode(const UnitVector &x) { return decode(x.coords()); }

/// Hamming distance up to global sign: min(hd(est, h), hd(est, -h)).
inline Eigen::Index hd_ambiguous(const Haplotype &est, const Haplotype &truth) {
  detail::require_same_size(est.size(), truth.size(), "hd_ambiguous");
  const Eigen::Index differ = (est.sites().array() != truth.sites().array()).count();
  return std::min(differ, est.size() - differ);
}

/// Minimum error correction score: for every read, the number of observed
/// entries that disagree with z or with -z, whichever is fewer.
inline Eigen::Index mec(const ReadMatrix &reads, const Haplotype &z) {
  detail::require_same_size(z.size(), reads.cols(), "mec");
  Eigen::Index total = 0;
  for (Eigen::Index i = 0; i < reads.rows(); ++i) {
    Eigen::Index agree = 0;
    Eigen::Index seen = 0;
    for (Eigen::Index j = 0; j < reads.cols(); ++j) {
      if (!reads.observed(i, j))
        continue;
      ++seen;
      agree += reads.sampled()(i, j) == static_cast<double>(z[j]) ? 1 : 0;
    }
    total += std::min(seen - agree, agree);
  }
  return total;
}

} // namespace haprtr
