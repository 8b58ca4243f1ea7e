#include "flipper/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace flipper {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
        return;
    }
    data_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= data_.size()) throw std::out_of_range("replay index out of range");
    return data_[(head_ + i) % data_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const {
    if (batch > data_.size()) throw std::invalid_argument("replay buffer holds fewer transitions than the batch");
    std::vector<std::size_t> out;
    out.reserve(batch);
    // Floyd's selection: distinct indices in O(batch^2) without touching the whole buffer.
    const std::size_t n = data_.size();
    for (std::size_t j = n - batch; j < n; ++j) {
        const std::size_t r = static_cast<std::size_t>(rng.below(j + 1));
        if (std::find(out.begin(), out.end(), r) == out.end()) {
            out.push_back(r);
        } else {
            out.push_back(j);
        }
    }
    return out;
}

}  // namespace flipper
