#pragma once

// Coxeter system (W, S) given by its Coxeter matrix.
//
// Generators are indexed 0..rank-1 internally. External text uses labels
// starting at `labels_from` (0 for affine diagrams drawn with a node 0, 1
// otherwise). A matrix entry of 0 stands for m = infinity.

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coxcells {

/// Bad user input: malformed matrix, out-of-range letter, unparsable word.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A computation exceeded a configured budget.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Generator = int;
using Word = std::vector<Generator>;

inline constexpr int kInfinity = 0;

class CoxeterSystem {
 public:
  CoxeterSystem() = default;

  CoxeterSystem(std::string name, std::vector<std::vector<int>> matrix, int labels_from = 1)
      : name_(std::move(name)), matrix_(std::move(matrix)), labels_from_(labels_from) {
    validate();
  }

  const std::string& name() const { return name_; }
  int rank() const { return static_cast<int>(matrix_.size()); }
  int labels_from() const { return labels_from_; }
  const std::vector<std::vector<int>>& matrix() const { return matrix_; }

  /// m(s,t); kInfinity (0) when the product has infinite order.
  int m(Generator s, Generator t) const { return matrix_[s][t]; }
  bool is_infinite(Generator s, Generator t) const { return matrix_[s][t] == kInfinity; }
  bool commute(Generator s, Generator t) const { return s == t || matrix_[s][t] == 2; }

  /// Crystallographic iff every finite off-diagonal entry is in {2,3,4,6}.
  bool crystallographic() const {
    for (int i = 0; i < rank(); ++i)
      for (int j = i + 1; j < rank(); ++j) {
        int v = matrix_[i][j];
        if (v != kInfinity && v != 2 && v != 3 && v != 4 && v != 6) return false;
      }
    return true;
  }

  /// Restriction to the generators in `subset` (sorted), relabelled 0..k-1.
  CoxeterSystem restricted(const std::vector<Generator>& subset) const {
    std::vector<std::vector<int>> sub(subset.size(), std::vector<int>(subset.size()));
    for (std::size_t i = 0; i < subset.size(); ++i)
      for (std::size_t j = 0; j < subset.size(); ++j) sub[i][j] = matrix_[subset[i]][subset[j]];
    return CoxeterSystem(name_ + "|parabolic", std::move(sub), 1);
  }

  std::string label(Generator s) const { return std::to_string(s + labels_from_); }

  void check_letter(Generator s) const {
    if (s < 0 || s >= rank())
      throw InputError("generator index " + std::to_string(s + labels_from_) + " out of range");
  }

  /// Parse whitespace-separated labels ("e" is the identity; an "s" prefix is allowed).
  Word parse_word(std::string_view text) const {
    Word w;
    std::istringstream is{std::string(text)};
    std::string tok;
    while (is >> tok) {
      if (tok == "e") continue;
      std::string digits = tok;
      if (!digits.empty() && (digits[0] == 's' || digits[0] == 'S')) digits.erase(0, 1);
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw InputError("cannot parse generator label '" + tok + "'");
      Generator s = std::stoi(digits) - labels_from_;
      check_letter(s);
      w.push_back(s);
    }
    return w;
  }

  /// Labels joined by spaces; "e" for the empty word.
  std::string format_word(const Word& w) const {
    if (w.empty()) return "e";
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) out += ' ';
      out += label(w[i]);
    }
    return out;
  }

  /// FNV-1a over labels_from and the matrix, as 16 hex digits.
  std::string fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::int64_t x) {
      for (int b = 0; b < 8; ++b) {
        h ^= static_cast<std::uint64_t>((x >> (8 * b)) & 0xff);
        h *= 1099511628211ULL;
      }
    };
    mix(labels_from_);
    mix(rank());
    for (const auto& row : matrix_)
      for (int v : row) mix(v);
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
  }

 private:
  void validate() const {
    const int n = rank();
    if (n < 1) throw InputError("Coxeter system must have rank >= 1");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(matrix_[i].size()) != n) throw InputError("Coxeter matrix is not square");
      if (matrix_[i][i] != 1) throw InputError("Coxeter matrix diagonal entries must be 1");
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (matrix_[i][j] != matrix_[j][i]) throw InputError("Coxeter matrix is not symmetric");
        if (matrix_[i][j] != kInfinity && matrix_[i][j] < 2)
          throw InputError("off-diagonal Coxeter matrix entries must be >= 2 or 0 (infinity)");
      }
    if (labels_from_ != 0 && labels_from_ != 1) throw InputError("labels_from must be 0 or 1");
  }

  std::string name_;
  std::vector<std::vector<int>> matrix_;
  int labels_from_ = 1;
};

}  // namespace coxcells
