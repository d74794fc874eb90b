#pragma once

#include <array>
#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace beq::detail {

// Process-wide cache of FFTW complex-to-complex plans, one per (shape, sign).
// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so they can be executed
// on any caller-owned buffer via the new-array interface. Planning is guarded by
// a mutex (FFTW planning is not thread safe); execution is.
class fft_engine {
public:
    static fft_engine& instance() {
        static fft_engine eng;
        return eng;
    }

    // in and out must be distinct buffers of prod(shape) elements.
    void transform(int rank, const std::array<int, 3>& shape, int sign,
                   const std::complex<double>* in, std::complex<double>* out) {
        fftw_plan plan = get_plan(rank, shape, sign);
        fftw_execute_dft(plan,
                         reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

    fft_engine(const fft_engine&) = delete;
    fft_engine& operator=(const fft_engine&) = delete;

private:
    fft_engine() = default;
    ~fft_engine() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    using key_t = std::array<int, 5>; // rank, n0, n1, n2, sign

    fftw_plan get_plan(int rank, const std::array<int, 3>& shape, int sign) {
        key_t key{rank, shape[0], shape[1], shape[2], sign};
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        std::size_t total = 1;
        for (int j = 0; j < rank; ++j) total *= static_cast<std::size_t>(shape[j]);
        // Scratch buffers used only at plan time; FFTW_ESTIMATE leaves them untouched.
        std::vector<std::complex<double>> a(total), b(total);
        fftw_plan plan = fftw_plan_dft(rank, shape.data(),
                                       reinterpret_cast<fftw_complex*>(a.data()),
                                       reinterpret_cast<fftw_complex*>(b.data()),
                                       sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mu_;
    std::map<key_t, fftw_plan> plans_;
};

} // namespace beq::detail
