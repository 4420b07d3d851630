#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <variant>

#include "ivlkit/rational.hpp"

namespace ivl {

// Reference identifier. Non-negative ids name allocated objects; kNull is the
// null reference.
struct RefId {
  static constexpr std::int32_t kNull = -1;
  std::int32_t id = kNull;

  bool is_null() const { return id == kNull; }
  auto operator<=>(const RefId&) const = default;
};

enum class TypeKind { Int, Bool, Ref, Perm };

std::string type_kind_name(TypeKind k);

// Tagged value: each value belongs to exactly one tag, equality is decidable.
class Value {
public:
  Value() : v_(std::int64_t(0)) {}
  static Value make_int(std::int64_t n) { return Value(n); }
  static Value make_bool(bool b) { return Value(b); }
  static Value make_ref(RefId r) { return Value(r); }
  static Value null_ref() { return Value(RefId{}); }
  static Value make_perm(Rational p) { return Value(p); }

  TypeKind kind() const { return TypeKind(v_.index()); }
  bool is_int() const { return kind() == TypeKind::Int; }
  bool is_bool() const { return kind() == TypeKind::Bool; }
  bool is_ref() const { return kind() == TypeKind::Ref; }
  bool is_perm() const { return kind() == TypeKind::Perm; }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  RefId as_ref() const { return std::get<RefId>(v_); }
  const Rational& as_perm() const { return std::get<Rational>(v_); }

  bool operator==(const Value& o) const { return v_ == o.v_; }
  bool operator!=(const Value& o) const { return !(*this == o); }
  bool operator<(const Value& o) const { return v_ < o.v_; }

  std::string str() const;

private:
  explicit Value(std::int64_t n) : v_(n) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(RefId r) : v_(r) {}
  explicit Value(Rational p) : v_(std::move(p)) {}

  // Variant index order must match TypeKind.
  std::variant<std::int64_t, bool, RefId, Rational> v_;
};

// Heap location: a non-null reference paired with a field name.
struct HeapLoc {
  RefId ref;
  std::string field;

  auto operator<=>(const HeapLoc&) const = default;
  std::string str() const { return "r" + std::to_string(ref.id) + "." + field; }
};

}  // namespace ivl
