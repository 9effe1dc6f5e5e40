#include "solsel/fft.hpp"

#include "solsel/errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace solsel {

namespace {
std::mutex& planner_lock() {
    static std::mutex m;
    return m;
}
} // namespace

Fft::Fft(int n) : n_(n) {
    if (n < 1) throw InvalidArgument("FFT size must be positive");
    std::lock_guard<std::mutex> lk(planner_lock());
    // scratch arrays only serve planning; FFTW_ESTIMATE never touches them
    fftw_complex* a = fftw_alloc_complex(n);
    fftw_complex* b = fftw_alloc_complex(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
    fftw_free(a);
    fftw_free(b);
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lk(planner_lock());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft::forward(const CVec& in, CVec& out) const {
    if (&in == &out) {
        CVec tmp = in;
        forward(tmp, out);
        return;
    }
    out.resize(n_);
    fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

void Fft::backward(const CVec& in, CVec& out) const {
    if (&in == &out) {
        CVec tmp = in;
        backward(tmp, out);
        return;
    }
    out.resize(n_);
    fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    out /= static_cast<double>(n_);
}

std::shared_ptr<const Fft> Fft::shared(int n) {
    static std::mutex m;
    static std::map<int, std::shared_ptr<const Fft>> cache;
    std::lock_guard<std::mutex> lk(m);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const Fft>(n);
    return slot;
}

} // namespace solsel
