#include "vpsrom/timers.hpp"

#include <stdexcept>

namespace vpsrom {

void PhaseTimers::charge_top(clock::time_point now)
{
  if (!stack_.empty())
    totals_[stack_.back()] += std::chrono::duration<double>(now - mark_).count();
  mark_ = now;
}

void PhaseTimers::start(const std::string& label)
{
  charge_top(clock::now());
  stack_.push_back(label);
  totals_.try_emplace(label, 0.0);
  ++counts_[label];
}

void PhaseTimers::stop()
{
  if (stack_.empty()) throw std::logic_error("PhaseTimers::stop without start");
  charge_top(clock::now());
  stack_.pop_back();
}

double PhaseTimers::total(const std::string& label) const
{
  auto it = totals_.find(label);
  return it == totals_.end() ? 0.0 : it->second;
}

long PhaseTimers::count(const std::string& label) const
{
  auto it = counts_.find(label);
  return it == counts_.end() ? 0 : it->second;
}

void PhaseTimers::merge(const PhaseTimers& other)
{
  for (auto& [k, v] : other.totals_) totals_[k] += v;
  for (auto& [k, v] : other.counts_) counts_[k] += v;
}

void PhaseTimers::reset()
{
  totals_.clear();
  counts_.clear();
  stack_.clear();
}

}  // namespace vpsrom
