#pragma once

// Fluctuation-parameter sampling: the deterministic training grid and the
// seeded test distributions (uniform, truncated Gaussian).
//
// Reproducibility contract: std::mt19937_64 seeded directly with the given
// seed; uniform doubles via the 53-bit mapping (x >> 11) * 2^-53 (never
// std::uniform_real_distribution, whose output is implementation-defined);
// derived streams via SplitMix64. Identical seeds give identical draw
// sequences on any platform with IEEE-754 doubles.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace slc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Independent stream for a named purpose (test points, sweep rows, ...).
    Rng derive(std::uint64_t stream) const { return Rng(splitmix64(seed_ ^ splitmix64(stream))); }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0x1.6a09e667f3bcdp-1); }

// Standard normal quantile: Acklam's rational approximation refined by two
// Halley steps against normal_cdf, giving ~1e-15 accuracy on (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double z;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int i = 0; i < 2; ++i) {
        const double e = normal_cdf(z) - p;
        const double u = e * 2.5066282746310002 * std::exp(0.5 * z * z);
        z -= u / (1.0 + 0.5 * z * u);
    }
    return z;
}

enum class Distribution { uniform, truncated_gaussian };

// How a sampled value enters the Hamiltonian coefficient theta(t):
//   constant:         theta(t) = value,           value in [1-bound, 1+bound]
//   cosine_modulated: theta(t) = 1 - value*cos(t), value in [-bound, +bound]
enum class Profile { constant, cosine_modulated };

inline double profile_center(Profile p) { return p == Profile::constant ? 1.0 : 0.0; }

struct FluctuationParameter {
    std::string name;
    std::string group;  // parameters sharing a group name receive one draw
    double bound = 0.0;  // half-width Theta, >= 0
    Distribution distribution = Distribution::uniform;
    Profile profile = Profile::constant;
};

// One joint assignment: values[i] belongs to parameter i.
struct FluctuationSample {
    std::vector<double> values;
};

struct TruncatedGaussianSpec {
    double mu = 0.0;
    double sigma = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

inline TruncatedGaussianSpec truncated_spec(double bound) {
    if (!(bound >= 0.0)) throw std::invalid_argument("truncated_spec: bound must be >= 0");
    return {0.0, bound / 3.0, -bound, bound};
}

inline double profile_value(const FluctuationParameter& param, double sampled, double t) {
    return param.profile == Profile::constant ? sampled : 1.0 - sampled * std::cos(t);
}

// The m-th of n grid nodes on [center-theta, center+theta], m = 1..n:
// center - theta + (2m-1)*theta/n, computed as a signed offset from center so
// mirror nodes are exactly antisymmetric (value(m)+value(n+1-m) == 2*center).
inline std::vector<double> grid_values(double theta, int n, double center) {
    if (!(theta >= 0.0)) throw std::invalid_argument("grid_values: theta must be >= 0");
    if (n < 1) throw std::invalid_argument("grid_values: n must be >= 1");
    const double step = theta / static_cast<double>(n);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int m = 1; m <= n; ++m)
        out[static_cast<std::size_t>(m - 1)] = center + static_cast<double>(2 * m - 1 - n) * step;
    return out;
}

namespace detail {

// Distinct group names in order of first appearance; index per parameter.
inline std::vector<std::string> group_names(const std::vector<FluctuationParameter>& params,
                                            std::vector<int>* param_group = nullptr) {
    std::vector<std::string> names;
    if (param_group) param_group->assign(params.size(), -1);
    for (std::size_t i = 0; i < params.size(); ++i) {
        int idx = -1;
        for (std::size_t g = 0; g < names.size(); ++g)
            if (names[g] == params[i].group) { idx = static_cast<int>(g); break; }
        if (idx < 0) {
            idx = static_cast<int>(names.size());
            names.push_back(params[i].group);
        }
        if (param_group) (*param_group)[i] = idx;
    }
    return names;
}

}  // namespace detail

// Cartesian product of per-group grids; tied parameters share the group's
// node. Training always samples this uniform grid, whatever the parameter's
// test distribution. n_per_group[g] is the node count of group g (groups
// ordered by first appearance).
inline std::vector<FluctuationSample> training_grid(const std::vector<FluctuationParameter>& params,
                                                    const std::vector<int>& n_per_group) {
    std::vector<int> param_group;
    const auto groups = detail::group_names(params, &param_group);
    if (n_per_group.size() != groups.size())
        throw std::invalid_argument("training_grid: one node count per tie group required");

    std::vector<std::vector<double>> nodes(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const FluctuationParameter* rep = nullptr;
        for (std::size_t i = 0; i < params.size(); ++i)
            if (param_group[i] == static_cast<int>(g)) { rep = &params[i]; break; }
        nodes[g] = grid_values(rep->bound, n_per_group[g], profile_center(rep->profile));
    }

    std::size_t total = 1;
    for (const auto& v : nodes) total *= v.size();

    std::vector<FluctuationSample> out;
    out.reserve(total);
    std::vector<std::size_t> idx(groups.size(), 0);
    for (std::size_t s = 0; s < total; ++s) {
        FluctuationSample sample;
        sample.values.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i)
            sample.values[i] = nodes[static_cast<std::size_t>(param_group[i])][idx[static_cast<std::size_t>(param_group[i])]];
        out.push_back(std::move(sample));
        for (std::size_t g = groups.size(); g-- > 0;) {  // last group varies fastest
            if (++idx[g] < nodes[g].size()) break;
            idx[g] = 0;
        }
    }
    return out;
}

inline std::vector<FluctuationSample> training_grid(const std::vector<FluctuationParameter>& params,
                                                    int n_all_groups) {
    std::vector<int> param_group;
    const auto groups = detail::group_names(params, &param_group);
    return training_grid(params, std::vector<int>(groups.size(), n_all_groups));
}

inline double sample_uniform(double theta, double center, Rng& rng) {
    if (!(theta >= 0.0)) throw std::invalid_argument("sample_uniform: theta must be >= 0");
    return center + theta * (2.0 * rng.uniform01() - 1.0);
}

// Inverse-CDF draw from N(mu, sigma) restricted to [lo, hi]; for the specs
// built by truncated_spec this is the +-3 sigma window.
inline double sample_truncated_gaussian(const TruncatedGaussianSpec& spec, Rng& rng) {
    const double u = rng.uniform01();
    if (!(spec.sigma > 0.0)) return spec.mu;  // degenerate bound = 0
    const double a = normal_cdf((spec.lo - spec.mu) / spec.sigma);
    const double b = normal_cdf((spec.hi - spec.mu) / spec.sigma);
    double z = normal_quantile(a + u * (b - a));
    const double zlo = (spec.lo - spec.mu) / spec.sigma;
    const double zhi = (spec.hi - spec.mu) / spec.sigma;
    if (z < zlo) z = zlo;
    if (z > zhi) z = zhi;
    return spec.mu + spec.sigma * z;
}

// Convenience form returning center + x with x drawn from the spec; every
// output lies in [center + spec.lo, center + spec.hi].
inline double sample_truncated_gaussian(const TruncatedGaussianSpec& spec, double center,
                                        Rng& rng) {
    return center + sample_truncated_gaussian(spec, rng);
}

/// Distribution the test draws use: each parameter's own declared choice, or
// one forced distribution for every group.
enum class TestDistribution { model_default, uniform, truncated_gaussian };

inline const char* to_string(TestDistribution d) {
    switch (d) {
        case TestDistribution::model_default: return "model_default";
        case TestDistribution::uniform: return "uniform";
        case TestDistribution::truncated_gaussian: return "truncated_gaussian";
    }
    throw std::logic_error("bad TestDistribution");
}

inline TestDistribution test_distribution_from_string(const std::string& s) {
    if (s == "model_default") return TestDistribution::model_default;
    if (s == "uniform") return TestDistribution::uniform;
    if (s == "truncated_gaussian") return TestDistribution::truncated_gaussian;
    throw std::invalid_argument("unknown test distribution: " + s);
}

// One random joint sample: a single draw per tie group, in group order,
// tied parameters sharing the drawn value. `force` overrides every group's
// distribution (used to test a controller against a noise law it was not
// trained for). Exactly one uniform01() is consumed per group either way, so
// the stream position after a draw depends on neither bounds nor the
// distribution choice.
inline FluctuationSample draw_sample(const std::vector<FluctuationParameter>& params, Rng& rng,
                                     const Distribution* force = nullptr) {
    std::vector<int> param_group;
    const auto groups = detail::group_names(params, &param_group);
    std::vector<double> group_value(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const FluctuationParameter* rep = nullptr;
        for (std::size_t i = 0; i < params.size(); ++i)
            if (param_group[i] == static_cast<int>(g)) { rep = &params[i]; break; }
        const double center = profile_center(rep->profile);
        const Distribution dist = force ? *force : rep->distribution;
        if (dist == Distribution::uniform) {
            group_value[g] = sample_uniform(rep->bound, center, rng);
        } else {
            TruncatedGaussianSpec spec = truncated_spec(rep->bound);
            spec.mu = 0.0;
            group_value[g] = center + sample_truncated_gaussian(spec, rng);
        }
    }
    FluctuationSample sample;
    sample.values.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i)
        sample.values[i] = group_value[static_cast<std::size_t>(param_group[i])];
    return sample;
}

}  // namespace slc
