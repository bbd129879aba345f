#pragma once

#include <utility>
#include <vector>

namespace usyf {

// Step decay: lr = base_lr * 10^(-#{m in milestones : epoch >= m}).
double step_lr(int epoch, double base_lr, const std::vector<int>& milestones);

struct PlateauConfig {
  double base_lr = 0.1;
  int reduce_patience = 10;  // non-improving epochs before dividing lr by 10
  int stop_patience = 20;    // non-improving epochs before stopping
  int max_epochs = 200;
};

// Validation-accuracy-driven decay. The reduce counter resets on improvement
// and on each reduction; the stop counter resets only on improvement.
class PlateauScheduler {
 public:
  explicit PlateauScheduler(const PlateauConfig& config);

  // Feed the newest epoch's validation accuracy (epoch is 0-based). Returns
  // the learning rate for the next epoch and whether training should stop.
  std::pair<double, bool> observe(double val_accuracy, int epoch);

  double lr() const { return lr_; }

  // State for checkpointing.
  struct State {
    double lr;
    double best_accuracy;
    int since_improve_reduce;
    int since_improve_stop;
  };
  State state() const;
  void restore(const State& state);

 private:
  PlateauConfig config_;
  double lr_;
  double best_ = -1.0;
  int since_reduce_ = 0;
  int since_stop_ = 0;
};

// Replays a full validation-accuracy history through a fresh scheduler;
// returns the final (lr, stop) decision.
std::pair<double, bool> plateau_step(const std::vector<double>& history,
                                     const PlateauConfig& config);

}  // namespace usyf
