#include "ragrules/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace ragrules {

std::string_view to_string(Interpretation interpretation) {
  return interpretation == Interpretation::kRetention ? "retention"
                                                      : "omission";
}

Interpretation parse_interpretation(std::string_view text) {
  if (text == "retention") return Interpretation::kRetention;
  if (text == "omission") return Interpretation::kOmission;
  throw std::invalid_argument("unknown interpretation '" + std::string(text) +
                              "' (expected retention or omission)");
}

std::uint64_t full_bits(int width) {
  if (width < 0 || width > kMaxSources) {
    throw std::invalid_argument("mask width must be in [0, 64]");
  }
  return width == kMaxSources ? ~std::uint64_t{0}
                              : (std::uint64_t{1} << width) - 1;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // Exact at every step: result * (n - k + i) is divisible by i.
    result = result / i * (n - k + i) + result % i * (n - k + i) / i;
  }
  return result;
}

SourceMask::SourceMask(std::uint64_t bits, int width)
    : bits_(bits), width_(width) {
  if ((bits & ~full_bits(width)) != 0) {
    throw std::invalid_argument("mask has bits outside its width");
  }
}

SourceMask SourceMask::full(int width) {
  return SourceMask(full_bits(width), width);
}

SourceMask SourceMask::from_indices(const std::vector<int>& one_based,
                                    int width) {
  std::uint64_t bits = 0;
  for (int index : one_based) {
    if (index < 1 || index > width) {
      throw std::invalid_argument("source index " + std::to_string(index) +
                                  " out of range [1, " +
                                  std::to_string(width) + "]");
    }
    bits |= std::uint64_t{1} << (index - 1);
  }
  return SourceMask(bits, width);
}

bool SourceMask::is_subset_of(const SourceMask& other) const {
  return (bits_ & ~other.bits_) == 0;
}

SourceMask SourceMask::complement() const {
  return SourceMask(~bits_ & full_bits(width_), width_);
}

std::vector<int> SourceMask::indices() const {
  std::vector<int> out;
  out.reserve(popcount());
  for (std::uint64_t rest = bits_; rest != 0; rest &= rest - 1) {
    out.push_back(std::countr_zero(rest) + 1);
  }
  return out;
}

std::string to_string(const SourceMask& mask) {
  std::string out = "{";
  bool first = true;
  for (int index : mask.indices()) {
    if (!first) out += ',';
    out += std::to_string(index);
    first = false;
  }
  out += '}';
  return out;
}

InputSet::InputSet(std::vector<Source> sources, InputContext context)
    : sources_(std::move(sources)), context_(std::move(context)) {
  if (sources_.size() > static_cast<std::size_t>(kMaxSources)) {
    throw std::invalid_argument("at most 64 sources are supported, got " +
                                std::to_string(sources_.size()));
  }
}

InputSet InputSet::from_texts(std::vector<std::string> texts,
                              InputContext context) {
  std::vector<Source> sources;
  sources.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    sources.push_back({"s" + std::to_string(i + 1), std::move(texts[i])});
  }
  return InputSet(std::move(sources), std::move(context));
}

std::vector<SourceMask> enumerate_level(int n, int level) {
  if (n < 0 || n > kMaxSources) {
    throw std::invalid_argument("lattice width must be in [0, 64]");
  }
  if (level < 0 || level > n) {
    throw std::invalid_argument("level " + std::to_string(level) +
                                " outside [0, " + std::to_string(n) + "]");
  }
  std::vector<SourceMask> out;
  out.reserve(binomial(n, level));
  if (level == 0) {
    out.emplace_back(0, n);
    return out;
  }
  const std::uint64_t limit = full_bits(n);
  // Gosper's hack walks same-popcount values in ascending order.
  std::uint64_t x = full_bits(level);
  while (true) {
    out.emplace_back(x, n);
    const std::uint64_t lowest = x & (~x + 1);
    const std::uint64_t ripple = x + lowest;
    if (ripple == 0) break;  // wrapped past bit 63
    const std::uint64_t next = (((ripple ^ x) >> 2) / lowest) | ripple;
    if (next > limit || next < x) break;
    x = next;
  }
  return out;
}

std::vector<SourceMask> children(const SourceMask& mask) {
  std::vector<SourceMask> out;
  out.reserve(mask.popcount());
  // Clearing higher bits yields smaller values; walk from the top bit down.
  for (int bit = mask.width() - 1; bit >= 0; --bit) {
    if (mask.contains(bit)) {
      out.emplace_back(mask.bits() & ~(std::uint64_t{1} << bit), mask.width());
    }
  }
  return out;
}

std::vector<SourceMask> parents(const SourceMask& mask) {
  std::vector<SourceMask> out;
  out.reserve(mask.width() - mask.popcount());
  for (int bit = 0; bit < mask.width(); ++bit) {
    if (!mask.contains(bit)) {
      out.emplace_back(mask.bits() | (std::uint64_t{1} << bit), mask.width());
    }
  }
  return out;
}

bool subsumes(const Rule& r1, const Rule& r2) {
  if (r1.interpretation != r2.interpretation) {
    throw std::invalid_argument(
        "subsumption is undefined across interpretations");
  }
  if (r1.mask.width() != r2.mask.width()) {
    throw std::invalid_argument("subsumption across different mask widths");
  }
  return r2.mask.is_subset_of(r1.mask);
}

std::vector<SourceMask> minimal_rules(std::vector<SourceMask> valid) {
  std::sort(valid.begin(), valid.end(), [](const auto& a, const auto& b) {
    if (a.popcount() != b.popcount()) return a.popcount() < b.popcount();
    return a < b;
  });
  valid.erase(std::unique(valid.begin(), valid.end()), valid.end());
  // A strict subset always has smaller popcount, so every candidate's
  // potential dominators were seen before it.
  std::vector<SourceMask> minimal;
  for (const auto& candidate : valid) {
    const bool dominated =
        std::any_of(minimal.begin(), minimal.end(), [&](const auto& m) {
          return m.is_subset_of(candidate);
        });
    if (!dominated) minimal.push_back(candidate);
  }
  std::sort(minimal.begin(), minimal.end());
  return minimal;
}

SourceMask concrete_mask(const SourceMask& mask, Interpretation interpretation) {
  return interpretation == Interpretation::kRetention ? mask
                                                      : mask.complement();
}

std::vector<std::string> concrete_input(const SourceMask& mask,
                                        Interpretation interpretation,
                                        const InputSet& input_set) {
  if (mask.width() != input_set.size()) {
    throw std::invalid_argument("mask width " + std::to_string(mask.width()) +
                                " does not match " +
                                std::to_string(input_set.size()) + " sources");
  }
  const SourceMask retained = concrete_mask(mask, interpretation);
  std::vector<std::string> out;
  out.reserve(retained.popcount());
  for (int index : retained.indices()) {
    out.push_back(input_set.sources()[index - 1].text);
  }
  return out;
}

}  // namespace ragrules
