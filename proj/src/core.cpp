#include "gpt/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gpt/target.hpp"

namespace gpt {

// ---------------------------------------------------------------------------
// TemperatureLadder

TemperatureLadder::TemperatureLadder(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw std::invalid_argument("temperature ladder is empty");
  if (betas_.front() != 1.0)
    throw std::invalid_argument("temperature ladder must start at beta_1 = 1");
  for (std::size_t k = 1; k < betas_.size(); ++k) {
    if (!(betas_[k] < betas_[k - 1]))
      throw std::invalid_argument("inverse temperatures must be strictly decreasing");
  }
  if (!(betas_.back() >= 0.0)) throw std::invalid_argument("inverse temperatures must be >= 0");
}

TemperatureLadder TemperatureLadder::geometric(double a, int K) {
  if (!(a > 1.0)) throw std::invalid_argument("ladder base a must be > 1");
  if (K < 2) throw std::invalid_argument("ladder needs K >= 2");
  std::vector<double> betas(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) betas[static_cast<std::size_t>(k)] = std::pow(a, -static_cast<double>(k));
  return TemperatureLadder(std::move(betas));
}

TemperatureLadder TemperatureLadder::from_temperatures(const std::vector<double>& temps) {
  std::vector<double> betas;
  betas.reserve(temps.size());
  for (double t : temps) {
    if (!(t >= 1.0)) throw std::invalid_argument("temperatures must be >= 1");
    betas.push_back(std::isinf(t) ? 0.0 : 1.0 / t);
  }
  return TemperatureLadder(std::move(betas));
}

double TemperatureLadder::temperature(int k) const {
  const double b = beta(k);
  return b == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / b;
}

std::vector<double> TemperatureLadder::temperatures() const {
  std::vector<double> t;
  for (int k = 0; k < size(); ++k) t.push_back(temperature(k));
  return t;
}

TemperatureLadder build_ladder(double a, int K) { return TemperatureLadder::geometric(a, K); }

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<int> map) : map_(std::move(map)) {
  std::vector<char> seen(map_.size(), 0);
  for (int v : map_) {
    if (v < 0 || v >= static_cast<int>(map_.size()) || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("not a permutation: " + to_string());
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(int K) {
  std::vector<int> m(static_cast<std::size_t>(K));
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

Permutation Permutation::transposition(int K, int i, int j) {
  if (i < 0 || j < 0 || i >= K || j >= K) throw std::out_of_range("transposition index");
  std::vector<int> m(static_cast<std::size_t>(K));
  std::iota(m.begin(), m.end(), 0);
  std::swap(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]);
  return Permutation(std::move(m));
}

Permutation Permutation::from_one_based(const std::vector<int>& map) {
  std::vector<int> m;
  m.reserve(map.size());
  for (int v : map) m.push_back(v - 1);
  return Permutation(std::move(m));
}

std::vector<int> Permutation::one_based() const {
  std::vector<int> m;
  m.reserve(map_.size());
  for (int v : map_) m.push_back(v + 1);
  return m;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(map_.size());
  for (std::size_t k = 0; k < map_.size(); ++k) inv[static_cast<std::size_t>(map_[k])] = static_cast<int>(k);
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) throw std::invalid_argument("composing permutations of different size");
  std::vector<int> m(map_.size());
  for (std::size_t k = 0; k < map_.size(); ++k) m[k] = map_[static_cast<std::size_t>(other.map_[k])];
  return Permutation(std::move(m));
}

bool Permutation::is_identity() const {
  for (std::size_t k = 0; k < map_.size(); ++k)
    if (map_[k] != static_cast<int>(k)) return false;
  return true;
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < map_.size(); ++k) os << (k ? "," : "") << map_[k] + 1;
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------------------
// PermutationSet

std::string to_string(PermScheme scheme) {
  switch (scheme) {
    case PermScheme::full: return "full";
    case PermScheme::adjacent_pairwise: return "adjacent-pairwise";
    case PermScheme::adjacent_window: return "adjacent-window";
    case PermScheme::custom: return "custom";
  }
  return "custom";
}

PermScheme parse_perm_scheme(const std::string& name) {
  if (name == "full") return PermScheme::full;
  if (name == "adjacent-pairwise") return PermScheme::adjacent_pairwise;
  if (name == "adjacent-window") return PermScheme::adjacent_window;
  if (name == "custom") return PermScheme::custom;
  throw std::invalid_argument("unknown permutation scheme '" + name + "'");
}

PermutationSet::PermutationSet(int K, PermScheme scheme, std::vector<Permutation> perms)
    : k_(K), scheme_(scheme), perms_(std::move(perms)) {
  if (perms_.empty()) throw std::invalid_argument("permutation set is empty");
  for (const auto& p : perms_)
    if (p.size() != K) throw std::invalid_argument("permutation length differs from K");
  std::sort(perms_.begin(), perms_.end());
  if (std::adjacent_find(perms_.begin(), perms_.end()) != perms_.end())
    throw std::invalid_argument("permutation set contains duplicates");

  inverse_.resize(perms_.size());
  for (std::size_t i = 0; i < perms_.size(); ++i) {
    auto j = index_of(perms_[i].inverse());
    if (!j) throw std::invalid_argument("permutation set not closed under inversion: missing inverse of " +
                                        perms_[i].to_string());
    inverse_[i] = *j;
  }

  if (scheme_ == PermScheme::full) {
    is_group_ = true;
  } else {
    is_group_ = true;
    for (std::size_t i = 0; i < perms_.size() && is_group_; ++i)
      for (std::size_t j = 0; j < perms_.size(); ++j)
        if (!index_of(perms_[i].compose(perms_[j]))) {
          is_group_ = false;
          break;
        }
  }
}

PermutationSet PermutationSet::full(int K, int cap) {
  if (K < 2) throw std::invalid_argument("permutation set needs K >= 2");
  if (K > cap)
    throw std::invalid_argument("full permutation scheme with K=" + std::to_string(K) +
                                " exceeds the cap of " + std::to_string(cap));
  std::vector<Permutation> perms;
  std::vector<int> m(static_cast<std::size_t>(K));
  std::iota(m.begin(), m.end(), 0);
  do {
    perms.emplace_back(m);
  } while (std::next_permutation(m.begin(), m.end()));
  return PermutationSet(K, PermScheme::full, std::move(perms));
}

PermutationSet PermutationSet::adjacent_pairwise(int K) {
  if (K < 2) throw std::invalid_argument("permutation set needs K >= 2");
  std::vector<Permutation> perms{Permutation::identity(K)};
  for (int i = 0; i + 1 < K; ++i) perms.push_back(Permutation::transposition(K, i, i + 1));
  return PermutationSet(K, PermScheme::adjacent_pairwise, std::move(perms));
}

PermutationSet PermutationSet::adjacent_window(int K, int width) {
  if (K < 2) throw std::invalid_argument("permutation set needs K >= 2");
  if (width < 1) throw std::invalid_argument("adjacent window width must be >= 1");
  std::vector<Permutation> perms{Permutation::identity(K)};
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K && j - i <= width; ++j) perms.push_back(Permutation::transposition(K, i, j));
  return PermutationSet(K, PermScheme::adjacent_window, std::move(perms));
}

PermutationSet PermutationSet::custom(std::vector<Permutation> perms) {
  if (perms.empty()) throw std::invalid_argument("permutation set is empty");
  const int K = perms.front().size();
  if (K < 1) throw std::invalid_argument("permutations must be non-empty");
  return PermutationSet(K, PermScheme::custom, std::move(perms));
}

PermutationSet PermutationSet::without_identity() const {
  std::vector<Permutation> rest;
  for (const auto& p : perms_)
    if (!p.is_identity()) rest.push_back(p);
  if (rest.empty()) throw std::invalid_argument("permutation set would be empty without the identity");
  return PermutationSet(k_, scheme_ == PermScheme::full ? PermScheme::custom : scheme_, std::move(rest));
}

std::optional<std::size_t> PermutationSet::index_of(const Permutation& p) const {
  auto it = std::lower_bound(perms_.begin(), perms_.end(), p);
  if (it == perms_.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - perms_.begin());
}

PermutationSet enumerate_permutations(int K, PermScheme scheme, int window, int full_cap) {
  switch (scheme) {
    case PermScheme::full: return PermutationSet::full(K, full_cap);
    case PermScheme::adjacent_pairwise: return PermutationSet::adjacent_pairwise(K);
    case PermScheme::adjacent_window: return PermutationSet::adjacent_window(K, window);
    case PermScheme::custom: break;
  }
  throw std::invalid_argument("custom permutation sets are built from an explicit list");
}

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(std::vector<ChainState> chains) : chains_(std::move(chains)) {
  for (const auto& c : chains_) {
    if (std::isnan(c.potential) || c.potential == -kOutOfDomain)
      throw std::invalid_argument("ensemble potentials must be finite or +inf");
  }
}

Ensemble Ensemble::evaluate(std::vector<ParamVector> states, const TargetModel& target) {
  std::vector<ChainState> chains;
  chains.reserve(states.size());
  for (auto& s : states) {
    const bool inside = target.in_domain(s);
    const double phi = inside ? target.potential(s) : kOutOfDomain;
    const double lp = inside ? target.log_prior(s) : -kOutOfDomain;
    chains.push_back(ChainState{std::move(s), phi, lp});
  }
  return Ensemble(std::move(chains));
}

std::vector<double> Ensemble::potentials() const {
  std::vector<double> p;
  p.reserve(chains_.size());
  for (const auto& c : chains_) p.push_back(c.potential);
  return p;
}

bool Ensemble::is_coherent(const TargetModel& target) const {
  for (const auto& c : chains_) {
    const bool inside = target.in_domain(c.theta);
    const double phi = inside ? target.potential(c.theta) : kOutOfDomain;
    const double lp = inside ? target.log_prior(c.theta) : -kOutOfDomain;
    if (phi != c.potential || lp != c.log_prior) return false;
  }
  return true;
}

Ensemble permute_ensemble(const Ensemble& e, const Permutation& sigma) {
  if (sigma.size() != e.size()) throw std::invalid_argument("permutation length differs from ensemble size");
  std::vector<ChainState> out;
  out.reserve(static_cast<std::size_t>(e.size()));
  for (int k = 0; k < e.size(); ++k) out.push_back(e.chain(sigma(k)));
  return Ensemble(std::move(out));
}

double log_joint_density(const Ensemble& e, const TemperatureLadder& ladder, const Permutation& sigma) {
  double acc = 0.0;
  for (int k = 0; k < e.size(); ++k) {
    const double term = tempered_log_density(ladder.beta(sigma(k)), e.potential(k));
    if (term == -kOutOfDomain) return -kOutOfDomain;
    acc += term;
  }
  return acc;
}

double log_joint_density(const Ensemble& e, const TemperatureLadder& ladder) {
  return log_joint_density(e, ladder, Permutation::identity(e.size()));
}

double log_permuted_density(const Ensemble& e, const TemperatureLadder& ladder, const Permutation& sigma) {
  double acc = 0.0;
  for (int k = 0; k < e.size(); ++k) {
    const double term = tempered_log_density(ladder.beta(k), e.potential(sigma(k)));
    if (term == -kOutOfDomain) return -kOutOfDomain;
    acc += term;
  }
  return acc;
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return -kOutOfDomain;
  const double m = *std::max_element(x.begin(), x.end());
  if (m == -kOutOfDomain) return -kOutOfDomain;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> softmax(std::span<const double> x) {
  const double lse = log_sum_exp(x);
  if (lse == -kOutOfDomain) throw std::domain_error("softmax of all -inf logits");
  std::vector<double> p;
  p.reserve(x.size());
  for (double v : x) p.push_back(std::exp(v - lse));
  return p;
}

}  // namespace gpt
