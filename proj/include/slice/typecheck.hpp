#pragma once

#include "slice/core.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace slice {

// Ordered typing context; later bindings shadow earlier ones.
class TyCtx {
 public:
  void push(std::string name, Ty t) { entries_.emplace_back(std::move(name), std::move(t)); }
  void pop() { entries_.pop_back(); }
  const Ty* lookup(const std::string& name) const;
  TyCtx with(std::string name, Ty t) const {
    TyCtx c = *this;
    c.push(std::move(name), std::move(t));
    return c;
  }

 private:
  std::vector<std::pair<std::string, Ty>> entries_;
};

class TypeError : public std::runtime_error {
 public:
  TypeError(const std::string& msg, SourceLoc loc)
      : std::runtime_error(to_string(loc) + ": type error: " + msg), loc_(loc) {}
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

// Least upper bound under subtyping, if any.
std::optional<Ty> join(const Ty& a, const Ty& b);

// Type of a literal: numbers in [0,1] are Pos, naturals above one are Nat, other numbers Real.
Ty literal_type(const Value& v);

Ty infer(const ExprPtr& e, const TyCtx& ctx = {});

}  // namespace slice
