#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <vector>

namespace hslab {

// Thin RAII wrapper over FFTW double-precision r2c/c2r transforms.
// Plans use FFTW_ESTIMATE so planning is deterministic; plan creation is
// serialized internally (FFTW planning is not thread-safe). Execution via
// the new-array interface is safe from parallel sections as long as each
// thread owns its buffers.

struct FftBuffers {
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    std::size_t real_size = 0;
    std::size_t cplx_size = 0;
    FftBuffers() = default;
    FftBuffers(std::size_t rs, std::size_t cs);
    FftBuffers(const FftBuffers&) = delete;
    FftBuffers& operator=(const FftBuffers&) = delete;
    FftBuffers(FftBuffers&& o) noexcept;
    FftBuffers& operator=(FftBuffers&& o) noexcept;
    ~FftBuffers();
};

class Transform {
public:
    explicit Transform(std::vector<int> dims);
    ~Transform();
    Transform(const Transform&) = delete;
    Transform& operator=(const Transform&) = delete;

    std::size_t real_size() const { return real_size_; }
    std::size_t cplx_size() const { return cplx_size_; }
    FftBuffers make_buffers() const { return FftBuffers(real_size_, cplx_size_); }

    void forward(FftBuffers& b) const;   // real -> cplx (unnormalized)
    void backward(FftBuffers& b) const;  // cplx -> real (destroys cplx)

private:
    std::vector<int> dims_;
    std::size_t real_size_ = 0, cplx_size_ = 0;
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
    FftBuffers proto_;
};

}  // namespace hslab
