#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace isac {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
// Propagation speed used by the range/Doppler relations (free space, rounded).
inline constexpr double kSpeedOfLight = 3.0e8;

/// Raised when a numerical step cannot proceed (singular matrix, degenerate data).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniformly sampled complex baseband sequence.
struct ComplexSignal {
    CVec samples;
    double sample_rate = 1.0;

    ComplexSignal() = default;
    ComplexSignal(CVec s, double fs) : samples(std::move(s)), sample_rate(fs) {}

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    cplx& operator[](std::size_t i) { return samples[i]; }
    const cplx& operator[](std::size_t i) const { return samples[i]; }
    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }

    // Throws std::invalid_argument on an empty signal, bad rate or non-finite samples.
    void validate(const char* what = "signal") const;
};

// splitmix64 finalizer over (root, a, b); used to derive independent stream seeds.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(root) ^ a) ^ b);
}

double energy(const CVec& x);
double mean_power(const CVec& x);

}  // namespace isac
