#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace kmslab {

// Eventually periodic sequence head * cycle^inf, stored in normal form:
// primitive cycle, shortest head. Orbit points, their lifts and the
// state sequences of cover points are all instances of this template.
template <typename T>
class EpSequence {
 public:
  EpSequence() : cycle_{T{}} {}

  EpSequence(std::vector<T> head, std::vector<T> cycle)
      : head_(std::move(head)), cycle_(std::move(cycle)) {
    normalize();
  }

  const std::vector<T>& head() const { return head_; }
  const std::vector<T>& cycle() const { return cycle_; }

  T at(std::size_t n) const {
    if (n < head_.size()) return head_[n];
    return cycle_[(n - head_.size()) % cycle_.size()];
  }

  // Length of one normalized period description.
  std::size_t head_size() const { return head_.size(); }
  std::size_t cycle_size() const { return cycle_.size(); }

  EpSequence shifted() const {
    if (!head_.empty())
      return EpSequence(std::vector<T>(head_.begin() + 1, head_.end()), cycle_);
    std::vector<T> rot(cycle_.begin() + 1, cycle_.end());
    rot.push_back(cycle_.front());
    return EpSequence({}, std::move(rot));
  }

  EpSequence shifted(std::size_t k) const {
    EpSequence s = *this;
    for (std::size_t i = 0; i < k; ++i) s = s.shifted();
    return s;
  }

  EpSequence prepended(T a) const {
    std::vector<T> h;
    h.reserve(head_.size() + 1);
    h.push_back(std::move(a));
    h.insert(h.end(), head_.begin(), head_.end());
    return EpSequence(std::move(h), cycle_);
  }

  bool operator==(const EpSequence& o) const {
    return head_ == o.head_ && cycle_ == o.cycle_;
  }
  bool operator!=(const EpSequence& o) const { return !(*this == o); }
  bool operator<(const EpSequence& o) const {
    if (head_ != o.head_) return head_ < o.head_;
    return cycle_ < o.cycle_;
  }

  template <typename U, typename F>
  EpSequence<U> map(F&& f) const {
    std::vector<U> h, c;
    h.reserve(head_.size());
    c.reserve(cycle_.size());
    for (const T& t : head_) h.push_back(f(t));
    for (const T& t : cycle_) c.push_back(f(t));
    return EpSequence<U>(std::move(h), std::move(c));
  }

 private:
  void normalize() {
    if (cycle_.empty()) cycle_.push_back(T{});
    // Primitive cycle: shortest divisor period.
    for (std::size_t d = 1; d < cycle_.size(); ++d) {
      if (cycle_.size() % d != 0) continue;
      bool ok = true;
      for (std::size_t i = d; i < cycle_.size() && ok; ++i)
        ok = cycle_[i] == cycle_[i % d];
      if (ok) {
        cycle_.resize(d);
        break;
      }
    }
    // Shortest head: u·a (v·a)^inf = u (a·v)^inf.
    while (!head_.empty() && head_.back() == cycle_.back()) {
      head_.pop_back();
      cycle_.insert(cycle_.begin(), cycle_.back());
      cycle_.pop_back();
    }
  }

  std::vector<T> head_;
  std::vector<T> cycle_;
};

template <typename A, typename B>
EpSequence<std::pair<A, B>> ep_zip(const EpSequence<A>& a,
                                   const EpSequence<B>& b) {
  std::size_t head = a.head_size() > b.head_size() ? a.head_size() : b.head_size();
  std::size_t cyc = a.cycle_size();
  // lcm of the two cycle lengths
  std::size_t x = a.cycle_size(), y = b.cycle_size();
  while (y) {
    std::size_t t = x % y;
    x = y;
    y = t;
  }
  cyc = a.cycle_size() / x * b.cycle_size();
  std::vector<std::pair<A, B>> h, c;
  for (std::size_t i = 0; i < head; ++i) h.emplace_back(a.at(i), b.at(i));
  for (std::size_t i = head; i < head + cyc; ++i) c.emplace_back(a.at(i), b.at(i));
  return EpSequence<std::pair<A, B>>(std::move(h), std::move(c));
}

}  // namespace kmslab
