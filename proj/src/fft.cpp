#include "lqc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace lqc::fft {

namespace {

// FFTW planning is not thread safe; plans are created once per shape under a
// lock and executed with the new-array interface.
std::mutex g_plan_mutex;

fftw_plan get_plan(int ny, int nx, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_tuple(ny, nx, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<cplx> scratch(static_cast<std::size_t>(ny) * nx);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = ny == 1 ? fftw_plan_dft_1d(nx, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                             : fftw_plan_dft_2d(ny, nx, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, plan);
    return plan;
}

void run(std::vector<cplx>& x, int ny, int nx, int sign) {
    if (x.size() != static_cast<std::size_t>(ny) * nx)
        throw PreconditionError("fft: array size does not match shape");
    if (x.empty()) return;
    auto* p = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(get_plan(ny, nx, sign), p, p);
}

}  // namespace

void forward(std::vector<cplx>& x) { run(x, 1, static_cast<int>(x.size()), FFTW_FORWARD); }
void backward(std::vector<cplx>& x) { run(x, 1, static_cast<int>(x.size()), FFTW_BACKWARD); }
void forward_2d(std::vector<cplx>& x, int ny, int nx) { run(x, ny, nx, FFTW_FORWARD); }
void backward_2d(std::vector<cplx>& x, int ny, int nx) { run(x, ny, nx, FFTW_BACKWARD); }

}  // namespace lqc::fft
