#include "ivlkit/state.hpp"

#include <sstream>
#include <stdexcept>

namespace ivl {

std::string type_kind_name(TypeKind k) {
  switch (k) {
    case TypeKind::Int: return "Int";
    case TypeKind::Bool: return "Bool";
    case TypeKind::Ref: return "Ref";
    case TypeKind::Perm: return "Perm";
  }
  return "?";
}

std::string Value::str() const {
  switch (kind()) {
    case TypeKind::Int: return std::to_string(as_int());
    case TypeKind::Bool: return as_bool() ? "true" : "false";
    case TypeKind::Ref: return as_ref().is_null() ? "null" : "r" + std::to_string(as_ref().id);
    case TypeKind::Perm: return as_perm().str();
  }
  return "?";
}

State State::make(Store store, Heap heap, Mask mask) {
  State s;
  for (auto it = mask.begin(); it != mask.end();) {
    if (!is_valid_perm(it->second))
      throw std::invalid_argument("permission out of [0,1] at " + it->first.str());
    if (it->second.is_zero()) {
      it = mask.erase(it);
      continue;
    }
    if (heap.find(it->first) == heap.end())
      throw std::invalid_argument("positive permission without heap value at " + it->first.str());
    ++it;
  }
  for (const auto& [l, v] : heap) {
    if (l.ref.is_null()) throw std::invalid_argument("heap location with null receiver");
    (void)v;
  }
  s.store_ = std::move(store);
  s.heap_ = std::move(heap);
  s.mask_ = std::move(mask);
  return s;
}

State State::with_store_var(const std::string& var, Value v) const {
  State s = *this;
  s.store_[var] = std::move(v);
  return s;
}

State State::with_heap_value(const HeapLoc& l, Value v) const {
  State s = *this;
  s.heap_[l] = std::move(v);
  return s;
}

std::string State::str() const {
  std::ostringstream os;
  os << "{store:";
  for (const auto& [k, v] : store_) os << " " << k << "=" << v.str();
  os << "; heap:";
  for (const auto& [l, v] : heap_) os << " " << l.str() << "=" << v.str();
  os << "; mask:";
  for (const auto& [l, p] : mask_) os << " " << l.str() << "=" << p.str();
  os << "}";
  return os.str();
}

std::optional<State> combine(const State& a, const State& b) {
  if (a.store() != b.store()) return std::nullopt;
  for (const auto& [l, v] : b.heap()) {
    auto av = a.heap_at(l);
    if (av && *av != v) return std::nullopt;
  }
  State::Mask mask = a.mask();
  for (const auto& [l, p] : b.mask()) {
    Rational sum = a.mask_at(l) + p;
    if (sum > Rational::from_int(1)) return std::nullopt;
    mask[l] = sum;
  }
  State::Heap heap = a.heap();
  heap.insert(b.heap().begin(), b.heap().end());
  return State::make(a.store(), std::move(heap), std::move(mask));
}

State core(const State& a) {
  return State::make(a.store(), a.heap(), {});
}

State stabilize(const State& a) {
  State::Heap heap;
  for (const auto& [l, p] : a.mask()) {
    heap[l] = *a.heap_at(l);
    (void)p;
  }
  return State::make(a.store(), std::move(heap), a.mask());
}

bool is_stable(const State& a) {
  // Mask entries are positive and each has a heap value, so stability reduces
  // to the domains having equal size.
  return a.heap().size() == a.mask().size();
}

bool greater_eq(const State& a, const State& b) {
  if (a.store() != b.store()) return false;
  for (const auto& [l, v] : b.heap()) {
    auto av = a.heap_at(l);
    if (!av || *av != v) return false;
  }
  for (const auto& [l, p] : b.mask()) {
    if (p > a.mask_at(l)) return false;
  }
  return true;
}

}  // namespace ivl
