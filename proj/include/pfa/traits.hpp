#pragma once

// Trait matrix ingestion and the latent representation Z.
//
// Continuous columns are standardized once (over observed cells, sample
// standard deviation) and those cells stay fixed for the whole run. Binary
// and ordinal observations constrain a latent real through ordered cut-points
// gamma_j = (-inf, 0, g_2, ..., g_{m-1}, +inf); missing cells of any type are
// unconstrained latent values.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "pfa/errors.hpp"
#include "pfa/random.hpp"

namespace pfa {

enum class ColumnType { continuous, binary, ordinal };

struct TraitMatrix {
  std::vector<std::string> taxa;         // row labels, aligned to phylogeny tips
  std::vector<std::string> names;        // trait names (column labels)
  Eigen::MatrixXd values;                // raw values; unspecified where missing
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> missing;
  std::vector<ColumnType> types;
  std::vector<int> levels;               // m_j for discrete columns, 0 for continuous
  Eigen::VectorXd column_mean;           // filled by standardize (continuous columns)
  Eigen::VectorXd column_sd;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
  bool is_missing(int i, int j) const { return missing(i, j) != 0; }
  bool is_discrete(int j) const { return types[j] != ColumnType::continuous; }

  // Observed category code in {1, ..., m_j}; call only on observed discrete cells.
  int category(int i, int j) const { return static_cast<int>(std::lround(values(i, j))); }
};

// Interior cut-points per column: gamma_{j,2} .. gamma_{j,m_j-1}. Binary and
// continuous columns have none.
struct Cutpoints {
  std::vector<std::vector<double>> interior;

  // Boundary gamma_{j,t} with the fixed sentinels in place.
  double boundary(int j, int t, int m) const {
    if (t <= 0) return -kInf;
    if (t == 1) return 0.0;
    if (t >= m) return kInf;
    return interior[j][t - 2];
  }
};

struct LatentState {
  Eigen::MatrixXd Z;
  Cutpoints cuts;
};

// Half-open support (lo, hi] of category c in a column with m levels.
inline std::pair<double, double> category_interval(const Cutpoints& cuts, int j, int c, int m) {
  return {cuts.boundary(j, c - 1, m), cuts.boundary(j, c, m)};
}

namespace detail {

inline double initial_latent_value(double lo, double hi) {
  if (lo == -kInf && hi == kInf) return 0.0;
  if (lo == -kInf) return hi - 0.5;
  if (hi == kInf) return lo + 0.5;
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Standardizes continuous columns in place (fills column_mean/column_sd) and
// builds the initial latent state: continuous observed cells hold their fixed
// standardized values, discrete observed cells start at the midpoint of their
// category interval, missing cells start at zero. Ordinal interiors start at
// 0.5, 1.0, ... (the prior mean spacing).
inline LatentState standardize(TraitMatrix& raw) {
  const int n = raw.rows();
  const int p = raw.cols();
  if (static_cast<int>(raw.types.size()) != p)
    throw ValidationError("column type list does not match trait matrix width");

  LatentState latent;
  latent.Z = Eigen::MatrixXd::Zero(n, p);
  latent.cuts.interior.resize(p);
  raw.column_mean = Eigen::VectorXd::Zero(p);
  raw.column_sd = Eigen::VectorXd::Ones(p);

  for (int j = 0; j < p; ++j) {
    if (raw.types[j] == ColumnType::continuous) {
      double sum = 0.0;
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (!raw.is_missing(i, j)) {
          sum += raw.values(i, j);
          ++count;
        }
      }
      if (count < 2)
        throw ValidationError("continuous trait '" + raw.names[j] +
                              "' needs at least two observed values");
      const double mean = sum / count;
      double ss = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!raw.is_missing(i, j)) {
          const double d = raw.values(i, j) - mean;
          ss += d * d;
        }
      }
      const double sd = std::sqrt(ss / (count - 1));
      if (!(sd > 0.0))
        throw ValidationError("continuous trait '" + raw.names[j] +
                              "' has zero standard deviation");
      raw.column_mean[j] = mean;
      raw.column_sd[j] = sd;
      for (int i = 0; i < n; ++i) {
        latent.Z(i, j) = raw.is_missing(i, j) ? 0.0 : (raw.values(i, j) - mean) / sd;
      }
    } else {
      const int m = raw.levels[j];
      if (m < 2) throw ValidationError("discrete trait '" + raw.names[j] + "' needs >= 2 levels");
      auto& interior = latent.cuts.interior[j];
      for (int t = 2; t <= m - 1; ++t) interior.push_back(0.5 * (t - 1));
      for (int i = 0; i < n; ++i) {
        if (raw.is_missing(i, j)) {
          latent.Z(i, j) = 0.0;
          continue;
        }
        const double v = raw.values(i, j);
        const int c = static_cast<int>(std::lround(v));
        if (std::abs(v - c) > 1e-9 || c < 1 || c > m)
          throw ValidationError("trait '" + raw.names[j] + "' row " + std::to_string(i + 1) +
                                ": category code must be an integer in 1.." + std::to_string(m));
        const auto [lo, hi] = category_interval(latent.cuts, j, c, m);
        latent.Z(i, j) = detail::initial_latent_value(lo, hi);
      }
    }
  }
  return latent;
}

// 1 iff every discrete observed cell's latent value lies in its category
// interval. Continuous and missing cells never violate.
inline bool constraint_indicator(const LatentState& latent, const TraitMatrix& raw) {
  for (int j = 0; j < raw.cols(); ++j) {
    if (!raw.is_discrete(j)) continue;
    const int m = raw.levels[j];
    for (int i = 0; i < raw.rows(); ++i) {
      if (raw.is_missing(i, j)) continue;
      const auto [lo, hi] = category_interval(latent.cuts, j, raw.category(i, j), m);
      const double z = latent.Z(i, j);
      if (!(lo < z && z <= hi)) return false;
    }
  }
  return true;
}

}  // namespace pfa
