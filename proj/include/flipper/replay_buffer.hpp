#pragma once

#include <cstddef>
#include <vector>

#include "flipper/env.hpp"
#include "flipper/rng.hpp"

namespace flipper {

struct Transition {
    Observation observation;
    int action = 0;
    double reward = 0.0;
    Observation next_observation;
    bool terminal = false;

    bool operator==(const Transition&) const = default;
};

// Fixed-capacity FIFO ring.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    // Oldest first.
    const Transition& at(std::size_t i) const;

    // Distinct storage indices drawn uniformly; throws std::invalid_argument if batch > size().
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;
    const Transition& slot(std::size_t index) const { return data_[index]; }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next slot to overwrite once full
    std::vector<Transition> data_;
};

}  // namespace flipper
