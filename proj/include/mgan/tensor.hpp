#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mgan/errors.hpp"
#include "mgan/runtime.hpp"

namespace mgan {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_numel(const Shape& s) {
    std::int64_t n = 1;
    for (auto d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << ']';
    return os.str();
}

// Dense row-major tensor handle. Image features use NCHW order. Copying a
// Tensor shares the underlying payload (value, grad, trainable flag), which is
// what the tape relies on to accumulate gradients into the original buffers.
template <typename T>
class Tensor {
    struct Payload {
        Shape shape;
        std::vector<T> value;
        std::vector<T> grad;  // empty until ensure_grad()
        bool trainable = false;
    };
    std::shared_ptr<Payload> p_;

    explicit Tensor(std::shared_ptr<Payload> p) : p_(std::move(p)) {}

public:
    Tensor() = default;

    static Tensor zeros(Shape shape) {
        for (auto d : shape) {
            if (d < 1) throw ShapeError("tensor extents must be positive: " + shape_str(shape));
        }
        auto p = std::make_shared<Payload>();
        p->value.assign(static_cast<std::size_t>(shape_numel(shape)), T(0));
        p->shape = std::move(shape);
        return Tensor(std::move(p));
    }

    static Tensor full(Shape shape, T fill) {
        Tensor t = zeros(std::move(shape));
        for (auto& v : t.values()) v = fill;
        return t;
    }

    static Tensor from_data(Shape shape, std::vector<T> data) {
        for (auto d : shape) {
            if (d < 1) throw ShapeError("tensor extents must be positive: " + shape_str(shape));
        }
        if (static_cast<std::int64_t>(data.size()) != shape_numel(shape)) {
            throw ShapeError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(shape));
        }
        auto p = std::make_shared<Payload>();
        p->shape = std::move(shape);
        p->value = std::move(data);
        return Tensor(std::move(p));
    }

    bool defined() const { return static_cast<bool>(p_); }
    const Shape& shape() const { return p_->shape; }
    std::size_t rank() const { return p_->shape.size(); }
    std::int64_t dim(std::size_t i) const { return p_->shape[i]; }
    std::int64_t numel() const { return static_cast<std::int64_t>(p_->value.size()); }

    std::vector<T>& values() { return p_->value; }
    const std::vector<T>& values() const { return p_->value; }
    T* data() { return p_->value.data(); }
    const T* data() const { return p_->value.data(); }

    bool trainable() const { return p_->trainable; }
    Tensor& set_trainable(bool on) {
        p_->trainable = on;
        return *this;
    }

    bool has_grad() const { return !p_->grad.empty(); }
    std::vector<T>& grad() {
        ensure_grad();
        return p_->grad;
    }
    const std::vector<T>& grad() const { return p_->grad; }
    void ensure_grad() {
        if (p_->grad.size() != p_->value.size()) p_->grad.assign(p_->value.size(), T(0));
    }
    void zero_grad() {
        if (has_grad()) std::fill(p_->grad.begin(), p_->grad.end(), T(0));
    }
    void drop_grad() { p_->grad.clear(); }

    // Identity of storage, not of values.
    bool same_payload(const Tensor& other) const { return p_ == other.p_; }

    Tensor clone() const {
        Tensor t = Tensor::from_data(p_->shape, p_->value);
        t.p_->trainable = p_->trainable;
        return t;
    }

    bool all_finite() const {
        for (T v : p_->value) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }
};

template <typename T>
inline void debug_check_finite(const Tensor<T>& t, const char* where) {
    if (runtime::debug_checks() && !t.all_finite()) {
        throw NumericError(std::string("non-finite values produced by ") + where);
    }
}

// Reverse-mode tape. Operations append one backward step each in execution
// order, so running the steps in reverse is a valid topological traversal and
// gradient accumulation is plain += into shared payloads. A tape instance is
// single-threaded: record and backward must not race.
template <typename T>
class Tape {
    std::vector<std::function<void()>> steps_;

public:
    void record(std::function<void()> step) { steps_.push_back(std::move(step)); }

    std::size_t size() const { return steps_.size(); }

    void clear() { steps_.clear(); }

    // Seeds d(loss)/d(loss) = 1 and propagates through every recorded step.
    void backward(Tensor<T> loss) {
        if (!loss.defined() || loss.numel() != 1) {
            throw ShapeError("backward requires a scalar loss, got " +
                             (loss.defined() ? shape_str(loss.shape()) : std::string("<empty>")));
        }
        loss.ensure_grad();
        loss.grad()[0] = T(1);
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
    }
};

}  // namespace mgan
