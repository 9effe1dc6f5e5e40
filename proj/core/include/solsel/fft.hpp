#pragma once

#include "solsel/grid.hpp"

#include <memory>

namespace solsel {

// Thin FFTW wrapper.  Plans are created once per size (under a lock) and
// executed through the new-array interface, so one Fft can be shared by
// several threads as long as each brings its own buffers.
class Fft {
public:
    explicit Fft(int n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    int size() const { return n_; }
    void forward(const CVec& in, CVec& out) const;   // unnormalized
    void backward(const CVec& in, CVec& out) const;  // divides by n

    static std::shared_ptr<const Fft> shared(int n);

private:
    int n_;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

} // namespace solsel
