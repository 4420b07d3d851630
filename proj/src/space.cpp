#include "ivlkit/space.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ivl {

StateSpace::StateSpace(TypeContext ctx, SpaceConfig cfg)
    : ctx_(std::move(ctx)), cfg_(std::move(cfg)) {
  if (cfg_.int_min > cfg_.int_max) throw std::invalid_argument("empty integer range");
  if (cfg_.num_refs < 0) throw std::invalid_argument("negative reference count");
  if (cfg_.perm_denoms.empty()) throw std::invalid_argument("no permission denominators");

  std::int64_t lcm = 1;
  for (auto d : cfg_.perm_denoms) {
    if (d < 1) throw std::invalid_argument("permission denominator < 1");
    lcm = std::lcm(lcm, d);
    if (lcm > 64) throw std::invalid_argument("permission grid too fine (lcm > 64)");
  }
  for (std::int64_t k = 0; k <= lcm; ++k) perms_.push_back(Rational(k, lcm));

  for (std::int64_t v = cfg_.int_min; v <= cfg_.int_max; ++v)
    int_vals_.push_back(Value::make_int(v));
  bool_vals_ = {Value::make_bool(false), Value::make_bool(true)};
  ref_vals_.push_back(Value::null_ref());
  for (int r = 0; r < cfg_.num_refs; ++r) ref_vals_.push_back(Value::make_ref(RefId{r}));
  for (const auto& p : perms_) perm_vals_.push_back(Value::make_perm(p));

  heap_vals_ = int_vals_;

  std::sort(cfg_.fields.begin(), cfg_.fields.end());
  cfg_.fields.erase(std::unique(cfg_.fields.begin(), cfg_.fields.end()), cfg_.fields.end());
  for (int r = 0; r < cfg_.num_refs; ++r)
    for (const auto& f : cfg_.fields) locs_.push_back(HeapLoc{RefId{r}, f});

  build_loc_options();
  build_stores();

  n_hms_ = 1;
  for (std::size_t i = 0; i < locs_.size(); ++i) {
    if (n_hms_ > cfg_.max_states / loc_options_.size())
      throw std::runtime_error("state space too large (heap configurations)");
    n_hms_ *= loc_options_.size();
  }
  if (stores_.empty() || n_hms_ == 0 || stores_.size() > cfg_.max_states / n_hms_)
    throw std::runtime_error("state space too large");
  n_states_ = stores_.size() * n_hms_;

  build_hm_tables();
  materialize_states();
}

void StateSpace::build_loc_options() {
  // Valid per-location configurations: zero permission with or without a
  // value, positive permission always with a value.
  loc_options_.push_back({0, -1});
  for (int v = 0; v < int(heap_vals_.size()); ++v) loc_options_.push_back({0, v});
  for (int p = 1; p < int(perms_.size()); ++p)
    for (int v = 0; v < int(heap_vals_.size()); ++v) loc_options_.push_back({p, v});

  const int n = int(loc_options_.size());
  opt_combine_.assign(std::size_t(n) * n, -1);
  opt_decomps_.assign(n, {});
  opt_stabilize_.resize(n);
  opt_core_.resize(n);
  opt_stable_.resize(n);

  auto find_opt = [&](int p, int v) {
    for (int i = 0; i < n; ++i)
      if (loc_options_[i].perm_idx == p && loc_options_[i].val_idx == v) return i;
    return -1;
  };

  const int max_units = int(perms_.size()) - 1;
  for (int i = 0; i < n; ++i) {
    const auto& a = loc_options_[i];
    opt_stabilize_[i] = a.perm_idx == 0 ? 0 : i;
    opt_core_[i] = find_opt(0, a.val_idx);
    opt_stable_[i] = char((a.perm_idx == 0) == (a.val_idx == -1));
    for (int j = 0; j < n; ++j) {
      const auto& b = loc_options_[j];
      if (a.perm_idx + b.perm_idx > max_units) continue;
      int v;
      if (a.val_idx == -1)
        v = b.val_idx;
      else if (b.val_idx == -1 || b.val_idx == a.val_idx)
        v = a.val_idx;
      else
        continue;  // common-domain value clash
      int k = find_opt(a.perm_idx + b.perm_idx, v);
      if (k < 0) continue;
      opt_combine_[std::size_t(i) * n + j] = k;
      opt_decomps_[k].push_back({i, j});
    }
  }
}

void StateSpace::build_stores() {
  std::vector<const std::vector<Value>*> domains;
  for (const auto& v : ctx_.vars()) domains.push_back(&type_values(*ctx_.kind_of(v)));

  std::size_t total = 1;
  for (auto* d : domains) {
    if (d->empty()) throw std::runtime_error("empty variable domain");
    if (total > cfg_.max_states / d->size()) throw std::runtime_error("state space too large (stores)");
    total *= d->size();
  }
  stores_.reserve(total);
  std::vector<std::size_t> digit(domains.size(), 0);
  for (std::size_t s = 0; s < total; ++s) {
    std::vector<Value> store;
    store.reserve(domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i) store.push_back((*domains[i])[digit[i]]);
    stores_.push_back(std::move(store));
    for (std::size_t i = 0; i < domains.size(); ++i) {
      if (++digit[i] < domains[i]->size()) break;
      digit[i] = 0;
    }
  }
}

std::size_t StateSpace::hm_digit(std::size_t hm, std::size_t loc) const {
  for (std::size_t i = 0; i < loc; ++i) hm /= loc_options_.size();
  return hm % loc_options_.size();
}

std::size_t StateSpace::hm_with_digit(std::size_t hm, std::size_t loc, std::size_t digit) const {
  std::size_t radix = 1;
  for (std::size_t i = 0; i < loc; ++i) radix *= loc_options_.size();
  std::size_t old = (hm / radix) % loc_options_.size();
  return hm + (digit - old) * radix;
}

void StateSpace::build_hm_tables() {
  const std::size_t n_opts = loc_options_.size();
  stabilize_hm_.resize(n_hms_);
  core_hm_.resize(n_hms_);
  stable_hm_.resize(n_hms_);
  hm_decomps_.assign(n_hms_, {});

  for (std::size_t hm = 0; hm < n_hms_; ++hm) {
    std::size_t stab = 0, cor = 0, radix = 1;
    bool stable = true;
    std::size_t rest = hm;
    for (std::size_t l = 0; l < locs_.size(); ++l) {
      std::size_t d = rest % n_opts;
      rest /= n_opts;
      stab += std::size_t(opt_stabilize_[d]) * radix;
      cor += std::size_t(opt_core_[d]) * radix;
      stable = stable && opt_stable_[d];
      radix *= n_opts;
    }
    stabilize_hm_[hm] = stab;
    core_hm_[hm] = cor;
    stable_hm_[hm] = char(stable);
  }

  // Decompositions, built by odometer over the per-digit decomposition lists.
  for (std::size_t hm = 0; hm < n_hms_; ++hm) {
    std::vector<const std::vector<std::pair<int, int>>*> lists;
    std::size_t rest = hm;
    bool possible = true;
    for (std::size_t l = 0; l < locs_.size(); ++l) {
      const auto& d = opt_decomps_[rest % n_opts];
      rest /= n_opts;
      if (d.empty()) {
        possible = false;
        break;
      }
      lists.push_back(&d);
    }
    if (!possible) continue;
    std::vector<std::size_t> pick(lists.size(), 0);
    while (true) {
      std::size_t a = 0, b = 0, radix = 1;
      for (std::size_t l = 0; l < lists.size(); ++l) {
        a += std::size_t((*lists[l])[pick[l]].first) * radix;
        b += std::size_t((*lists[l])[pick[l]].second) * radix;
        radix *= n_opts;
      }
      hm_decomps_[hm].push_back({std::uint32_t(a), std::uint32_t(b)});
      std::size_t i = 0;
      for (; i < lists.size(); ++i) {
        if (++pick[i] < lists[i]->size()) break;
        pick[i] = 0;
      }
      if (i == lists.size()) break;
    }
  }
}

void StateSpace::materialize_states() {
  states_.reserve(n_states_);
  stable_states_ = Bitset(n_states_);
  const std::size_t n_opts = loc_options_.size();
  for (std::size_t s = 0; s < stores_.size(); ++s) {
    State::Store store;
    for (std::size_t i = 0; i < ctx_.vars().size(); ++i) store[ctx_.vars()[i]] = stores_[s][i];
    for (std::size_t hm = 0; hm < n_hms_; ++hm) {
      State::Heap heap;
      State::Mask mask;
      std::size_t rest = hm;
      for (std::size_t l = 0; l < locs_.size(); ++l) {
        const auto& opt = loc_options_[rest % n_opts];
        rest /= n_opts;
        if (opt.val_idx >= 0) heap[locs_[l]] = heap_vals_[opt.val_idx];
        if (opt.perm_idx > 0) mask[locs_[l]] = perms_[opt.perm_idx];
      }
      states_.push_back(State::make(store, std::move(heap), std::move(mask)));
      if (stable_hm_[hm]) stable_states_.set(state_index(s, hm));
    }
  }
}

std::optional<std::size_t> StateSpace::find_index(const State& st) const {
  // Store digits.
  std::size_t store_idx = 0, radix = 1;
  if (st.store().size() != ctx_.vars().size()) return std::nullopt;
  for (std::size_t i = 0; i < ctx_.vars().size(); ++i) {
    auto v = st.store_at(ctx_.vars()[i]);
    if (!v) return std::nullopt;
    const auto& dom = type_values(*ctx_.kind_of(ctx_.vars()[i]));
    auto it = std::find(dom.begin(), dom.end(), *v);
    if (it == dom.end()) return std::nullopt;
    store_idx += std::size_t(it - dom.begin()) * radix;
    radix *= dom.size();
  }
  // Heap/mask digits.
  if (st.heap().size() + st.mask().size() > 0) {
    for (const auto& [l, v] : st.heap())
      if (!loc_index(l.ref, l.field)) return std::nullopt;
  }
  std::size_t hm = 0;
  radix = 1;
  for (const auto& loc : locs_) {
    int p_idx = 0, v_idx = -1;
    Rational p = st.mask_at(loc);
    auto pit = std::find(perms_.begin(), perms_.end(), p);
    if (pit == perms_.end()) return std::nullopt;
    p_idx = int(pit - perms_.begin());
    auto hv = st.heap_at(loc);
    if (hv) {
      auto vit = std::find(heap_vals_.begin(), heap_vals_.end(), *hv);
      if (vit == heap_vals_.end()) return std::nullopt;
      v_idx = int(vit - heap_vals_.begin());
    }
    int opt = -1;
    for (int i = 0; i < int(loc_options_.size()); ++i)
      if (loc_options_[i].perm_idx == p_idx && loc_options_[i].val_idx == v_idx) {
        opt = i;
        break;
      }
    if (opt < 0) return std::nullopt;
    hm += std::size_t(opt) * radix;
    radix *= loc_options_.size();
  }
  return state_index(store_idx, hm);
}

std::optional<std::size_t> StateSpace::combine_hm(std::size_t a, std::size_t b) const {
  const std::size_t n_opts = loc_options_.size();
  std::size_t out = 0, radix = 1;
  for (std::size_t l = 0; l < locs_.size(); ++l) {
    int c = opt_combine_[(a % n_opts) * n_opts + (b % n_opts)];
    if (c < 0) return std::nullopt;
    out += std::size_t(c) * radix;
    radix *= n_opts;
    a /= n_opts;
    b /= n_opts;
  }
  return out;
}

std::optional<std::size_t> StateSpace::combine_idx(std::size_t a, std::size_t b) const {
  if (store_of(a) != store_of(b)) return std::nullopt;
  auto hm = combine_hm(hm_of(a), hm_of(b));
  if (!hm) return std::nullopt;
  return state_index(store_of(a), *hm);
}

const std::vector<Value>& StateSpace::type_values(TypeKind k) const {
  switch (k) {
    case TypeKind::Int: return int_vals_;
    case TypeKind::Bool: return bool_vals_;
    case TypeKind::Ref: return ref_vals_;
    case TypeKind::Perm: return perm_vals_;
  }
  return int_vals_;
}

int StateSpace::var_slot(const std::string& name) const {
  const auto& vs = ctx_.vars();
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (vs[i] == name) return int(i);
  return -1;
}

std::optional<std::size_t> StateSpace::store_update(std::size_t state_idx, int slot,
                                                    const Value& v) const {
  if (slot < 0) return std::nullopt;
  const auto& dom = type_values(*ctx_.kind_of(ctx_.vars()[slot]));
  auto it = std::find(dom.begin(), dom.end(), v);
  if (it == dom.end()) return std::nullopt;

  std::size_t store = store_of(state_idx);
  std::size_t radix = 1;
  for (int i = 0; i < slot; ++i) radix *= type_values(*ctx_.kind_of(ctx_.vars()[i])).size();
  std::size_t old = (store / radix) % dom.size();
  std::size_t new_store = store + (std::size_t(it - dom.begin()) - old) * radix;
  return state_index(new_store, hm_of(state_idx));
}

std::optional<std::size_t> StateSpace::loc_index(RefId r, const std::string& field) const {
  for (std::size_t i = 0; i < locs_.size(); ++i)
    if (locs_[i].ref == r && locs_[i].field == field) return i;
  return std::nullopt;
}

std::optional<std::size_t> StateSpace::heap_update(std::size_t state_idx, std::size_t loc,
                                                   const Value& v) const {
  auto it = std::find(heap_vals_.begin(), heap_vals_.end(), v);
  if (it == heap_vals_.end()) return std::nullopt;
  int v_idx = int(it - heap_vals_.begin());
  std::size_t hm = hm_of(state_idx);
  std::size_t d = hm_digit(hm, loc);
  const auto& opt = loc_options_[d];
  if (opt.val_idx < 0) return std::nullopt;  // no value present to replace
  int new_opt = -1;
  for (int i = 0; i < int(loc_options_.size()); ++i)
    if (loc_options_[i].perm_idx == opt.perm_idx && loc_options_[i].val_idx == v_idx) {
      new_opt = i;
      break;
    }
  if (new_opt < 0) return std::nullopt;
  return state_index(store_of(state_idx), hm_with_digit(hm, loc, std::size_t(new_opt)));
}

}  // namespace ivl
