#include "usyf/schedule.hpp"

#include <cmath>

#include "usyf/common.hpp"

namespace usyf {

double step_lr(int epoch, double base_lr, const std::vector<int>& milestones) {
  require(epoch >= 0, "step_lr: epoch must be >= 0");
  int drops = 0;
  for (int m : milestones)
    if (epoch >= m) ++drops;
  return base_lr * std::pow(10.0, -drops);
}

PlateauScheduler::PlateauScheduler(const PlateauConfig& config)
    : config_(config), lr_(config.base_lr) {
  require(config.reduce_patience > 0, "plateau: reduce patience must be positive");
  require(config.stop_patience > 0, "plateau: stop patience must be positive");
  require(config.max_epochs > 0, "plateau: max epochs must be positive");
}

std::pair<double, bool> PlateauScheduler::observe(double val_accuracy, int epoch) {
  if (val_accuracy > best_) {
    best_ = val_accuracy;
    since_reduce_ = 0;
    since_stop_ = 0;
  } else {
    ++since_reduce_;
    ++since_stop_;
    if (since_reduce_ >= config_.reduce_patience) {
      lr_ /= 10.0;
      since_reduce_ = 0;
    }
  }
  const bool stop = since_stop_ >= config_.stop_patience || epoch + 1 >= config_.max_epochs;
  return {lr_, stop};
}

PlateauScheduler::State PlateauScheduler::state() const {
  return {lr_, best_, since_reduce_, since_stop_};
}

void PlateauScheduler::restore(const State& state) {
  lr_ = state.lr;
  best_ = state.best_accuracy;
  since_reduce_ = state.since_improve_reduce;
  since_stop_ = state.since_improve_stop;
}

std::pair<double, bool> plateau_step(const std::vector<double>& history,
                                     const PlateauConfig& config) {
  require(!history.empty(), "plateau_step: history must be nonempty");
  PlateauScheduler scheduler(config);
  std::pair<double, bool> result{config.base_lr, false};
  for (std::size_t i = 0; i < history.size(); ++i)
    result = scheduler.observe(history[i], static_cast<int>(i));
  return result;
}

}  // namespace usyf
