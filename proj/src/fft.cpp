#include "oamao/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace oamao::fft {
namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
};

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [n, plans] : plans_) {
            fftw_destroy_plan(plans.forward);
            fftw_destroy_plan(plans.inverse);
        }
    }

    PlanPair get(int n) {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(n); it != plans_.end()) return it->second;
        // FFTW_ESTIMATE leaves the scratch buffer untouched and keeps plans
        // reproducible run to run; FFTW_UNALIGNED lets us execute on vector storage.
        auto* scratch = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        PlanPair plans{fftw_plan_dft_2d(n, n, scratch, scratch, FFTW_FORWARD, flags),
                       fftw_plan_dft_2d(n, n, scratch, scratch, FFTW_BACKWARD, flags)};
        fftw_free(scratch);
        plans_.emplace(n, plans);
        return plans;
    }

private:
    std::mutex mutex_;
    std::map<int, PlanPair> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void run(fftw_plan plan, Array2D<Complex>& data) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
    const double scale = 1.0 / data.n();
    for (auto& v : data) v *= scale;
}

}  // namespace

void forward(Array2D<Complex>& data) { run(cache().get(data.n()).forward, data); }

void inverse(Array2D<Complex>& data) { run(cache().get(data.n()).inverse, data); }

}  // namespace oamao::fft
