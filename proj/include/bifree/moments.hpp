#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bifree/hermitian.hpp"
#include "bifree/tuple.hpp"
#include "bifree/words.hpp"

namespace bifree {

inline constexpr int kDefaultDegreeCap = 8;
inline constexpr int kMaxDegreeCap = 12;

/// Tolerance below zero accepted for the smallest covariance eigenvalue.
inline constexpr double kPsdTolerance = 1e-10;

/// A = [phi(S_k S_l)] for S = (X_1..X_n, Y_1..Y_m); indices 0..n-1 are left,
/// n..n+m-1 are right.
class CovarianceSpec {
 public:
  CovarianceSpec() = default;
  /// Throws InvalidArgument unless `a` is (n+m) x (n+m), symmetric and PSD
  /// within kPsdTolerance.
  CovarianceSpec(int n, int m, RealMatrix a);

  int n() const { return n_; }
  int m() const { return m_; }
  int size() const { return n_ + m_; }
  const RealMatrix& matrix() const { return a_; }
  double operator()(int k, int l) const { return a_(k, l); }

  /// Principal sub-covariance on the given left and right indices.
  CovarianceSpec restricted(const std::vector<int>& left_idx, const std::vector<int>& right_idx) const;

  bool operator==(const CovarianceSpec& other) const {
    return n_ == other.n_ && m_ == other.m_ && a_ == other.a_;
  }

 private:
  int n_ = 0;
  int m_ = 0;
  RealMatrix a_;
};

/// Semicircular Wick sum over non-crossing pairings of the flattened index
/// sequence (entries in 0..n+m-1).
double wick_moment(const CovarianceSpec& cov, const std::vector<int>& sequence);

/// The sequence (i_1..i_p, n+j_q, ..., n+j_1) the reduced word is evaluated on.
std::vector<int> flatten(const ReducedWord& word, int n);

/// phi(X_{i1}..X_{ip} Y_{j1}..Y_{jq}) for the bi-free Gaussian with covariance cov.
double gaussian_moment(const CovarianceSpec& cov, const ReducedWord& word);

struct GaussianSource {
  CovarianceSpec covariance;
};
struct EmpiricalSource {
  MicrostateTuple tuple;
};
struct FileSource {
  std::filesystem::path path;
};
using TargetSource = std::variant<GaussianSource, EmpiricalSource, FileSource>;

enum class SourceKind { kGaussian, kEmpirical, kFile };

/// Reduced-word moments of degree <= M. Gaussian and empirical targets also
/// carry the interleaved (free-mode) moments over the n+m letters.
/// Values are complex: reduced words of degree >= 3 can have complex moments
/// for general targets; Gaussian tables are real.
class TargetMoments {
 public:
  TargetMoments() = default;

  int n() const { return n_; }
  int m() const { return m_; }
  int degree_cap() const { return degree_cap_; }
  SourceKind source() const { return source_; }
  const std::optional<CovarianceSpec>& covariance() const { return covariance_; }
  const std::map<ReducedWord, Complex>& table() const { return table_; }
  bool has_interleaved() const { return has_interleaved_; }

  /// Throws InvalidArgument when the word is absent.
  Complex reduced(const ReducedWord& word) const;
  Complex interleaved(const std::vector<int>& letters) const;

  /// Largest phi(S_k^2); the reference ball radius depends on it.
  double max_second_moment() const;
  double second_moment(int variable) const;

  /// Marginal target of the chosen variables, reindexed 0.. in the given order.
  TargetMoments restricted(const std::vector<int>& left_idx, const std::vector<int>& right_idx) const;

  /// File-style target from an explicit table; must be total up to degree_cap.
  static TargetMoments from_table(int n, int m, int degree_cap, std::map<ReducedWord, Complex> table);

  bool operator==(const TargetMoments& other) const {
    return n_ == other.n_ && m_ == other.m_ && degree_cap_ == other.degree_cap_ && table_ == other.table_;
  }

 private:
  friend TargetMoments build_target(const TargetSource&, int, int, int, bool);

  int n_ = 0;
  int m_ = 0;
  int degree_cap_ = 0;
  SourceKind source_ = SourceKind::kFile;
  std::optional<CovarianceSpec> covariance_;
  std::map<ReducedWord, Complex> table_;
  bool has_interleaved_ = false;
  std::map<std::vector<int>, Complex> interleaved_;
};

/// Builds the total table on reduced words of degree <= degree_cap. Caps above
/// kDefaultDegreeCap need allow_high_degree; kMaxDegreeCap is absolute.
TargetMoments build_target(const TargetSource& source, int n, int m, int degree_cap,
                           bool allow_high_degree = false);

/// Moment file: header "n m M", then one line "p q i1..ip j1..jq value" per
/// reduced word (1-based indices). A second value column holds the imaginary
/// part and is written only when it is nonzero.
void write_moment_file(const std::filesystem::path& path, const TargetMoments& target);
TargetMoments read_moment_file(const std::filesystem::path& path);

}  // namespace bifree
