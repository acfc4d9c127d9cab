#include "speckle/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace speckle {
namespace {

static_assert(sizeof(cplx) == sizeof(fftw_complex));

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int height, int width, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(height, width, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        // FFTW_ESTIMATE keeps plan selection (and hence round-off) reproducible
        // from run to run; UNALIGNED lets us execute on std::vector storage.
        const std::size_t n = static_cast<std::size_t>(height) * width;
        auto* scratch = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_2d(height, width, scratch, scratch, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        if (plan == nullptr) fail(ErrorKind::invalid_argument, "FFTW could not create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void transform(ComplexField& field, int sign) {
    fftw_plan plan = cache().get(field.height(), field.width(), sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(field.data());
    fftw_execute_dft(plan, ptr, ptr);
    const double scale = 1.0 / std::sqrt(static_cast<double>(field.size()));
    for (cplx& v : field) v *= scale;
}

}  // namespace

void dft2_inplace(ComplexField& field) { transform(field, FFTW_FORWARD); }
void idft2_inplace(ComplexField& field) { transform(field, FFTW_BACKWARD); }

ComplexField dft2(const ComplexField& field) {
    ComplexField out = field;
    dft2_inplace(out);
    return out;
}

ComplexField idft2(const ComplexField& field) {
    ComplexField out = field;
    idft2_inplace(out);
    return out;
}

}  // namespace speckle
