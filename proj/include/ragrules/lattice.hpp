#pragma once

// Powerset lattice over the n sources of one input set.
//
// A node is a SourceMask: bit i set means source i+1 is implicated. Levels
// group nodes by popcount; parents are immediate supersets and children are
// immediate subsets. Everything here is a pure function over values.

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ragrules {

inline constexpr int kMaxSources = 64;

enum class Interpretation { kRetention, kOmission };

std::string_view to_string(Interpretation interpretation);
// Accepts "retention" / "omission". Throws std::invalid_argument otherwise.
Interpretation parse_interpretation(std::string_view text);

class SourceMask {
 public:
  constexpr SourceMask() = default;
  // Throws std::invalid_argument if width > 64 or bits has a bit at or above
  // width.
  SourceMask(std::uint64_t bits, int width);

  static SourceMask empty(int width) { return SourceMask(0, width); }
  static SourceMask full(int width);
  // Builds a mask from 1-based source indices.
  static SourceMask from_indices(const std::vector<int>& one_based, int width);

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int width() const { return width_; }
  int popcount() const { return std::popcount(bits_); }
  bool contains(int zero_based) const { return (bits_ >> zero_based) & 1U; }
  bool is_subset_of(const SourceMask& other) const;
  SourceMask complement() const;
  // 1-based indices of set bits, ascending.
  std::vector<int> indices() const;

  // Ascending numeric mask value; width only breaks ties.
  friend constexpr auto operator<=>(const SourceMask& a, const SourceMask& b) {
    if (auto c = a.bits_ <=> b.bits_; c != 0) return c;
    return a.width_ <=> b.width_;
  }
  friend constexpr bool operator==(const SourceMask&, const SourceMask&) = default;

 private:
  std::uint64_t bits_ = 0;
  int width_ = 0;
};

// Renders as "{2,3}" using 1-based indices.
std::string to_string(const SourceMask& mask);

std::uint64_t full_bits(int width);
std::uint64_t binomial(int n, int k);

struct InputContext {
  std::string question;
  std::string instructions;
};

struct Source {
  std::string label;  // display name, e.g. "s2" or "D4"
  std::string text;
};

// The pair (s, c): ordered sources plus the fixed remainder of the input.
class InputSet {
 public:
  InputSet() = default;
  // Throws std::invalid_argument if more than 64 sources are given.
  InputSet(std::vector<Source> sources, InputContext context);
  // Labels default to "s1".."sn".
  static InputSet from_texts(std::vector<std::string> texts,
                             InputContext context);

  int size() const { return static_cast<int>(sources_.size()); }
  const std::vector<Source>& sources() const { return sources_; }
  const InputContext& context() const { return context_; }

 private:
  std::vector<Source> sources_;
  InputContext context_;
};

struct Rule {
  Interpretation interpretation = Interpretation::kRetention;
  SourceMask mask;
  bool minimal = false;
};

// All masks of popcount `level` over `n` sources, ascending.
// Throws std::invalid_argument unless 0 <= level <= n <= 64.
std::vector<SourceMask> enumerate_level(int n, int level);

// Immediate subsets, ascending.
std::vector<SourceMask> children(const SourceMask& mask);
// Immediate supersets, ascending.
std::vector<SourceMask> parents(const SourceMask& mask);

// r1 subsumes r2 iff every source predicate of r2 appears in r1, i.e.
// r2.mask is a subset of r1.mask. Throws std::invalid_argument when the
// interpretations or widths differ.
bool subsumes(const Rule& r1, const Rule& r2);

// The subset-minimal elements of `valid` (ascending). Input may be unsorted
// and may hold duplicates.
std::vector<SourceMask> minimal_rules(std::vector<SourceMask> valid);

// The mask of sources actually handed to the model for a node: the node
// itself under retention, its complement under omission.
SourceMask concrete_mask(const SourceMask& mask, Interpretation interpretation);

// Retained source texts for a node, in input order. Throws
// std::invalid_argument on width mismatch.
std::vector<std::string> concrete_input(const SourceMask& mask,
                                        Interpretation interpretation,
                                        const InputSet& input_set);

}  // namespace ragrules
