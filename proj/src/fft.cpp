#include "hslab/fft.hpp"

#include <mutex>
#include <stdexcept>

namespace hslab {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftBuffers::FftBuffers(std::size_t rs, std::size_t cs) : real_size(rs), cplx_size(cs) {
    real = fftw_alloc_real(rs);
    cplx = fftw_alloc_complex(cs);
    if (!real || !cplx) throw std::bad_alloc();
}

FftBuffers::FftBuffers(FftBuffers&& o) noexcept
    : real(o.real), cplx(o.cplx), real_size(o.real_size), cplx_size(o.cplx_size) {
    o.real = nullptr;
    o.cplx = nullptr;
}

FftBuffers& FftBuffers::operator=(FftBuffers&& o) noexcept {
    if (this != &o) {
        if (real) fftw_free(real);
        if (cplx) fftw_free(cplx);
        real = o.real;
        cplx = o.cplx;
        real_size = o.real_size;
        cplx_size = o.cplx_size;
        o.real = nullptr;
        o.cplx = nullptr;
    }
    return *this;
}

FftBuffers::~FftBuffers() {
    if (real) fftw_free(real);
    if (cplx) fftw_free(cplx);
}

Transform::Transform(std::vector<int> dims) : dims_(std::move(dims)) {
    real_size_ = 1;
    for (std::size_t i = 0; i < dims_.size(); ++i) real_size_ *= static_cast<std::size_t>(dims_[i]);
    cplx_size_ = real_size_ / static_cast<std::size_t>(dims_.back()) *
                 (static_cast<std::size_t>(dims_.back()) / 2 + 1);
    proto_ = FftBuffers(real_size_, cplx_size_);
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd_ = fftw_plan_dft_r2c(static_cast<int>(dims_.size()), dims_.data(), proto_.real, proto_.cplx,
                             FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r(static_cast<int>(dims_.size()), dims_.data(), proto_.cplx, proto_.real,
                             FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
}

Transform::~Transform() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
}

void Transform::forward(FftBuffers& b) const { fftw_execute_dft_r2c(fwd_, b.real, b.cplx); }
void Transform::backward(FftBuffers& b) const { fftw_execute_dft_c2r(bwd_, b.cplx, b.real); }

}  // namespace hslab
