#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "patchsim/errors.hpp"
#include "patchsim/trace.hpp"

namespace patchsim {

/// Normalized LCS distance in [0, 1].
struct Distance {
  double value = 0.0;

  constexpr auto operator<=>(const Distance&) const = default;
};

/// Length of a longest common subsequence.
///
/// Bit-parallel row update over the shorter sequence: one machine word covers
/// 64 columns, so the cost is O(|a| * |b| / 64) time and O(sigma * min / 64)
/// space, where sigma is the number of distinct symbols of the shorter input.
/// The result is exact.
template <typename T, typename Hash = std::hash<T>>
std::size_t lcs_length(std::span<const T> a, std::span<const T> b) {
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t m = a.size();
  if (m == 0) return 0;
  const std::size_t words = (m + 63) / 64;

  std::unordered_map<T, std::size_t, Hash> symbol;
  symbol.reserve(m);
  std::vector<std::uint64_t> match;  // symbol-major: match[s * words + w]
  for (std::size_t i = 0; i < m; ++i) {
    auto [it, inserted] = symbol.try_emplace(a[i], symbol.size());
    if (inserted) match.resize(match.size() + words, 0);
    match[it->second * words + i / 64] |= std::uint64_t{1} << (i % 64);
  }

  // Zero bits of `row` mark columns where the LCS prefix length increases.
  std::vector<std::uint64_t> row(words, ~std::uint64_t{0});
  for (const auto& c : b) {
    auto it = symbol.find(c);
    if (it == symbol.end()) continue;
    const std::uint64_t* pm = &match[it->second * words];
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t v = row[w];
      const std::uint64_t u = v & pm[w];
      std::uint64_t sum = v + u;
      std::uint64_t next_carry = sum < v;
      sum += carry;
      next_carry |= sum < carry;
      carry = next_carry;
      row[w] = sum | (v & ~pm[w]);
    }
  }

  std::size_t ones = 0;
  for (std::size_t w = 0; w + 1 < words; ++w) ones += std::popcount(row[w]);
  const std::size_t tail = m - (words - 1) * 64;
  const std::uint64_t mask = tail == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << tail) - 1;
  ones += std::popcount(row[words - 1] & mask);
  return m - ones;
}

/// What happens when a preprocessed sequence is still longer than the cap.
enum class OverflowPolicy { subsample, reject };

/// Optional reduction applied identically to both inputs before LCS.
///
/// The default is the identity, which keeps distance() exact. The pipeline
/// uses pipeline_default(): consecutive duplicate ids are collapsed and long
/// inputs are strided down to at most `cap` events.
struct TracePreprocessing {
  bool collapse_repeats = false;
  std::size_t cap = 0;  // 0 disables the cap
  OverflowPolicy overflow = OverflowPolicy::subsample;

  static constexpr TracePreprocessing exact() { return {}; }
  static constexpr TracePreprocessing pipeline_default() {
    return {true, 20000, OverflowPolicy::subsample};
  }
};

namespace detail {

template <typename T>
std::vector<T> collapse_repeats(std::span<const T> in) {
  std::vector<T> out;
  out.reserve(in.size());
  for (const auto& x : in) {
    if (out.empty() || !(out.back() == x)) out.push_back(x);
  }
  return out;
}

template <typename T>
std::vector<T> stride(std::span<const T> in, std::size_t step) {
  std::vector<T> out;
  out.reserve(in.size() / step + 1);
  for (std::size_t i = 0; i < in.size(); i += step) out.push_back(in[i]);
  return out;
}

}  // namespace detail

template <typename T>
std::pair<std::vector<T>, std::vector<T>> preprocess(std::span<const T> a, std::span<const T> b,
                                                     const TracePreprocessing& prep) {
  std::vector<T> pa = prep.collapse_repeats ? detail::collapse_repeats(a)
                                            : std::vector<T>(a.begin(), a.end());
  std::vector<T> pb = prep.collapse_repeats ? detail::collapse_repeats(b)
                                            : std::vector<T>(b.begin(), b.end());
  if (prep.cap == 0) return {std::move(pa), std::move(pb)};

  const std::size_t longest = std::max(pa.size(), pb.size());
  if (longest <= prep.cap) return {std::move(pa), std::move(pb)};
  if (prep.overflow == OverflowPolicy::reject) {
    if (pa.size() > prep.cap && pb.size() > prep.cap) {
      throw CapacityExceeded("both sequences exceed the LCS cap of " + std::to_string(prep.cap) +
                             " events (" + std::to_string(pa.size()) + ", " +
                             std::to_string(pb.size()) + ")");
    }
    return {std::move(pa), std::move(pb)};
  }
  const std::size_t step = (longest + prep.cap - 1) / prep.cap;
  return {detail::stride<T>(pa, step), detail::stride<T>(pb, step)};
}

/// 1 - |LCS(a, b)| / max(|a|, |b|); two empty sequences are at distance 0.
template <typename T>
Distance sequence_distance(std::span<const T> a, std::span<const T> b,
                           const TracePreprocessing& prep = TracePreprocessing::exact()) {
  if (prep.collapse_repeats || prep.cap != 0) {
    auto [pa, pb] = preprocess(a, b, prep);
    return sequence_distance<T>(pa, pb, TracePreprocessing::exact());
  }
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return {0.0};
  const std::size_t common = lcs_length<T>(a, b);
  return {1.0 - static_cast<double>(common) / static_cast<double>(longest)};
}

inline std::size_t lcs_length(const Spectrum& a, const Spectrum& b,
                              const TracePreprocessing& prep = TracePreprocessing::exact()) {
  std::span<const StatementId> sa(a.events), sb(b.events);
  if (prep.collapse_repeats || prep.cap != 0) {
    auto [pa, pb] = preprocess(sa, sb, prep);
    return lcs_length<StatementId>(pa, pb);
  }
  return lcs_length<StatementId>(sa, sb);
}

inline Distance distance(const Spectrum& a, const Spectrum& b,
                         const TracePreprocessing& prep = TracePreprocessing::exact()) {
  return sequence_distance<StatementId>(a.events, b.events, prep);
}

}  // namespace patchsim
