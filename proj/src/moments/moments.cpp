#include "bifree/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bifree/errors.hpp"
#include "bifree/word_cache.hpp"

namespace bifree {
namespace {

double wick_range(const RealMatrix& a, const std::vector<int>& s, std::size_t lo, std::size_t hi) {
  if (lo >= hi) return 1.0;
  if ((hi - lo) % 2 != 0) return 0.0;
  double total = 0.0;
  for (std::size_t k = lo + 1; k < hi; k += 2) {
    const double w = a(s[lo], s[k]);
    if (w == 0.0) continue;
    const double inner = wick_range(a, s, lo + 1, k);
    if (inner == 0.0) continue;
    total += w * inner * wick_range(a, s, k + 1, hi);
  }
  return total;
}

std::vector<int> remap(const std::vector<int>& idx, const std::vector<int>& chosen) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) {
    auto it = std::find(chosen.begin(), chosen.end(), i);
    if (it == chosen.end()) return {};
    out.push_back(static_cast<int>(it - chosen.begin()));
  }
  return out;
}

// Interleaved tables grow as (n+m)^M; beyond this they are not built.
constexpr double kInterleavedLimit = 200000;

bool interleaved_fits(int letters, int degree) {
  double count = 0.0;
  double layer = 1.0;
  for (int k = 1; k <= degree; ++k) {
    layer *= letters;
    count += layer;
  }
  return count <= kInterleavedLimit;
}

}  // namespace

CovarianceSpec::CovarianceSpec(int n, int m, RealMatrix a) : n_(n), m_(m), a_(std::move(a)) {
  require(n >= 0 && m >= 0 && n + m >= 1, "covariance needs at least one variable");
  require(a_.rows() == n + m && a_.cols() == n + m, "covariance must be (n+m) x (n+m)");
  require(a_.allFinite(), "covariance entries must be finite");
  const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
  require((a_ - a_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "covariance must be symmetric");
  a_ = (0.5 * (a_ + a_.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(a_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPsdTolerance) {
    throw InvalidArgument("covariance is not positive semidefinite (smallest eigenvalue " +
                          std::to_string(solver.eigenvalues().minCoeff()) + ")");
  }
}

CovarianceSpec CovarianceSpec::restricted(const std::vector<int>& left_idx, const std::vector<int>& right_idx) const {
  std::vector<int> all;
  for (int i : left_idx) {
    require(i >= 0 && i < n_, "left index out of range");
    all.push_back(i);
  }
  for (int j : right_idx) {
    require(j >= 0 && j < m_, "right index out of range");
    all.push_back(n_ + j);
  }
  const int k = static_cast<int>(all.size());
  RealMatrix sub(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) sub(r, c) = a_(all[static_cast<std::size_t>(r)], all[static_cast<std::size_t>(c)]);
  }
  return CovarianceSpec(static_cast<int>(left_idx.size()), static_cast<int>(right_idx.size()), sub);
}

double wick_moment(const CovarianceSpec& cov, const std::vector<int>& sequence) {
  for (int s : sequence) require(s >= 0 && s < cov.size(), "variable index out of range");
  return wick_range(cov.matrix(), sequence, 0, sequence.size());
}

std::vector<int> flatten(const ReducedWord& word, int n) {
  std::vector<int> s(word.left.begin(), word.left.end());
  for (auto it = word.right.rbegin(); it != word.right.rend(); ++it) s.push_back(n + *it);
  return s;
}

double gaussian_moment(const CovarianceSpec& cov, const ReducedWord& word) {
  word.validate(cov.n(), cov.m());
  return wick_moment(cov, flatten(word, cov.n()));
}

Complex TargetMoments::reduced(const ReducedWord& word) const {
  auto it = table_.find(word);
  if (it == table_.end()) throw InvalidArgument("target has no moment for word " + word.to_string());
  return it->second;
}

Complex TargetMoments::interleaved(const std::vector<int>& letters) const {
  require(has_interleaved_, "target carries no interleaved moments");
  auto it = interleaved_.find(letters);
  require(it != interleaved_.end(), "target has no interleaved moment for this word");
  return it->second;
}

double TargetMoments::second_moment(int variable) const {
  require(variable >= 0 && variable < n_ + m_, "variable index out of range");
  ReducedWord w;
  if (variable < n_) {
    w.left = {variable, variable};
  } else {
    w.right = {variable - n_, variable - n_};
  }
  return reduced(w).real();
}

double TargetMoments::max_second_moment() const {
  require(degree_cap_ >= 2, "target has no second moments");
  double best = 0.0;
  for (int k = 0; k < n_ + m_; ++k) best = std::max(best, second_moment(k));
  return best;
}

TargetMoments TargetMoments::restricted(const std::vector<int>& left_idx, const std::vector<int>& right_idx) const {
  TargetMoments out;
  out.n_ = static_cast<int>(left_idx.size());
  out.m_ = static_cast<int>(right_idx.size());
  require(out.n_ + out.m_ >= 1, "restriction must keep at least one variable");
  out.degree_cap_ = degree_cap_;
  out.source_ = source_;
  if (covariance_) out.covariance_ = covariance_->restricted(left_idx, right_idx);
  for (const auto& [word, value] : table_) {
    ReducedWord r{remap(word.left, left_idx), remap(word.right, right_idx)};
    if (r.left.size() != word.left.size() || r.right.size() != word.right.size()) continue;
    out.table_[r] = value;
  }
  if (has_interleaved_) {
    std::vector<int> letters(left_idx.begin(), left_idx.end());
    for (int j : right_idx) letters.push_back(n_ + j);
    out.has_interleaved_ = true;
    for (const auto& [word, value] : interleaved_) {
      auto r = remap(word, letters);
      if (r.size() == word.size()) out.interleaved_[r] = value;
    }
  }
  return out;
}

TargetMoments TargetMoments::from_table(int n, int m, int degree_cap, std::map<ReducedWord, Complex> table) {
  require(n >= 0 && m >= 0 && n + m >= 1, "target needs at least one variable");
  require(degree_cap >= 1 && degree_cap <= kMaxDegreeCap, "degree cap out of range");
  for (const auto& [w, v] : table) {
    w.validate(n, m);
    require(w.degree() <= degree_cap, "moment table has a word above the degree cap");
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), "moment values must be finite");
  }
  for (const auto& w : enumerate_reduced_words(n, m, degree_cap)) {
    if (!table.contains(w)) throw InvalidArgument("moment table is missing word " + w.to_string());
  }
  TargetMoments t;
  t.n_ = n;
  t.m_ = m;
  t.degree_cap_ = degree_cap;
  t.source_ = SourceKind::kFile;
  t.table_ = std::move(table);
  return t;
}

TargetMoments build_target(const TargetSource& source, int n, int m, int degree_cap, bool allow_high_degree) {
  require(n >= 0 && m >= 0 && n + m >= 1, "target needs at least one variable");
  require(degree_cap >= 1, "degree cap must be >= 1");
  if (degree_cap > kMaxDegreeCap) {
    throw InvalidArgument("degree cap " + std::to_string(degree_cap) + " exceeds the maximum " +
                          std::to_string(kMaxDegreeCap));
  }
  if (degree_cap > kDefaultDegreeCap && !allow_high_degree) {
    throw InvalidArgument("degree cap " + std::to_string(degree_cap) + " exceeds the default cap " +
                          std::to_string(kDefaultDegreeCap) + "; set allow_high_degree to override");
  }

  if (const auto* file = std::get_if<FileSource>(&source)) {
    TargetMoments t = read_moment_file(file->path);
    require(t.n() == n && t.m() == m, "moment file variable counts do not match");
    require(t.degree_cap() >= degree_cap, "moment file degree cap is below the requested cap");
    if (t.degree_cap() > degree_cap) {
      std::map<ReducedWord, Complex> cut;
      for (const auto& [w, v] : t.table()) {
        if (w.degree() <= degree_cap) cut.emplace(w, v);
      }
      t = TargetMoments::from_table(n, m, degree_cap, std::move(cut));
    }
    return t;
  }

  const auto words = enumerate_reduced_words(n, m, degree_cap);
  const bool interleave = interleaved_fits(n + m, degree_cap);
  TargetMoments t;
  t.n_ = n;
  t.m_ = m;
  t.degree_cap_ = degree_cap;
  if (const auto* g = std::get_if<GaussianSource>(&source)) {
    require(g->covariance.n() == n && g->covariance.m() == m, "covariance variable counts do not match");
    t.source_ = SourceKind::kGaussian;
    t.covariance_ = g->covariance;
    for (const auto& w : words) t.table_[w] = gaussian_moment(g->covariance, w);
    if (interleave) {
      t.has_interleaved_ = true;
      for (const auto& w : enumerate_words(n + m, degree_cap)) t.interleaved_[w] = wick_moment(g->covariance, w);
    }
    return t;
  }

  const auto& tuple = std::get<EmpiricalSource>(source).tuple;
  tuple.validate();
  require(tuple.n() == n && tuple.m() == m, "tuple variable counts do not match");
  t.source_ = SourceKind::kEmpirical;
  WordCache cache(tuple.lefts, tuple.rights);
  for (const auto& w : words) t.table_[w] = cache.reduced(w);
  if (interleave) {
    t.has_interleaved_ = true;
    for (const auto& w : enumerate_words(n + m, degree_cap)) t.interleaved_[w] = cache.interleaved(w);
  }
  return t;
}

void write_moment_file(const std::filesystem::path& path, const TargetMoments& target) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open moment file for writing: " + path.string());
  out << target.n() << ' ' << target.m() << ' ' << target.degree_cap() << '\n';
  char buf[64];
  for (const auto& [w, v] : target.table()) {
    out << w.left.size() << ' ' << w.right.size();
    for (int i : w.left) out << ' ' << i + 1;
    for (int j : w.right) out << ' ' << j + 1;
    std::snprintf(buf, sizeof buf, " %.17g", v.real());
    out << buf;
    if (v.imag() != 0.0) {
      std::snprintf(buf, sizeof buf, " %.17g", v.imag());
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw InvalidArgument("failed writing moment file: " + path.string());
}

TargetMoments read_moment_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open moment file: " + path.string());
  std::string line;
  auto next_line = [&]() {
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') return true;
    }
    return false;
  };
  require(next_line(), "moment file is empty");
  int n = 0, m = 0, cap = 0;
  {
    std::istringstream hdr(line);
    std::string extra;
    require(static_cast<bool>(hdr >> n >> m >> cap) && !(hdr >> extra), "malformed moment file header: " + line);
  }
  require(n >= 0 && m >= 0 && n + m >= 1, "moment file header has no variables");
  require(cap >= 1 && cap <= kMaxDegreeCap, "moment file degree cap out of range");
  std::map<ReducedWord, Complex> table;
  while (next_line()) {
    std::istringstream row(line);
    int p = -1, q = -1;
    require(static_cast<bool>(row >> p >> q) && p >= 0 && q >= 0, "malformed moment line: " + line);
    ReducedWord w;
    for (int k = 0; k < p + q; ++k) {
      int idx = 0;
      require(static_cast<bool>(row >> idx), "malformed moment line: " + line);
      (k < p ? w.left : w.right).push_back(idx - 1);
    }
    double re = 0.0;
    double im = 0.0;
    require(static_cast<bool>(row >> re), "moment line without a value: " + line);
    std::string rest;
    if (row >> rest) {
      std::size_t used = 0;
      try {
        im = std::stod(rest, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used == rest.size(), "malformed imaginary part on moment line: " + line);
      require(!(row >> rest), "trailing data on moment line: " + line);
    }
    w.validate(n, m);
    require(table.emplace(w, Complex(re, im)).second, "duplicate word in moment file: " + w.to_string());
  }
  return TargetMoments::from_table(n, m, cap, std::move(table));
}

}  // namespace bifree
