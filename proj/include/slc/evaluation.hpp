#pragma once

// Monte-Carlo robustness evaluation of a trained field, and the two sweep
// drivers (over fluctuation bound, over training-grid size). All draws come
// from one seeded stream on the calling thread; only the per-sample
// propagation is parallel, and every reduction runs in sample order, so a
// report is a pure function of (field, model, n, seed).

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "slc/model.hpp"
#include "slc/optimizer.hpp"
#include "slc/sampling.hpp"

namespace slc {

struct TestReport {
    int n = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    double stddev = 0.0;  // population (divide by n)
    double min = 0.0;
    std::array<int, 100> histogram{};  // fidelity bin k covers [k/100, (k+1)/100)
};

inline std::vector<FluctuationSample> draw_test_samples(
    const QubitModel& model, int n, std::uint64_t seed,
    TestDistribution td = TestDistribution::model_default) {
    if (n < 1) throw std::invalid_argument("test sample count must be >= 1");
    Rng rng(seed);
    const Distribution* force = nullptr;
    Distribution forced{};
    if (td == TestDistribution::uniform) forced = Distribution::uniform;
    if (td == TestDistribution::truncated_gaussian) forced = Distribution::truncated_gaussian;
    if (td != TestDistribution::model_default) force = &forced;
    std::vector<FluctuationSample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(draw_sample(model.params, rng, force));
    return out;
}

// Aggregates per-sample fidelities (sample order fixed by the caller);
// `seed` is recorded verbatim.
inline TestReport summarize_fidelities(const std::vector<double>& fids, std::uint64_t seed) {
    if (fids.empty()) throw std::invalid_argument("report needs at least one fidelity");
    TestReport r;
    r.n = static_cast<int>(fids.size());
    r.seed = seed;
    double sum = 0.0;
    double lo = fids[0];
    for (double f : fids) {
        sum += f;
        if (f < lo) lo = f;
        int bin = static_cast<int>(f * 100.0);
        if (bin > 99) bin = 99;
        if (bin < 0) bin = 0;
        ++r.histogram[static_cast<std::size_t>(bin)];
    }
    r.mean = sum / static_cast<double>(r.n);
    double ss = 0.0;
    for (double f : fids) ss += (f - r.mean) * (f - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(r.n));
    r.min = lo;
    return r;
}

// Report over an explicit sample set.
inline TestReport evaluate_samples(const ControlField& field, const QubitModel& model,
                                   const std::vector<FluctuationSample>& samples,
                                   std::uint64_t seed, int threads = 1) {
    return summarize_fidelities(sample_fidelities(field, model, samples, threads), seed);
}

inline TestReport monte_carlo_fidelity(const ControlField& field, const QubitModel& model,
                                       int n, std::uint64_t seed, int threads = 1,
                                       TestDistribution td = TestDistribution::model_default) {
    return evaluate_samples(field, model, draw_test_samples(model, n, seed, td), seed, threads);
}

// One trained-and-tested operating point of a sweep.
struct SweepPoint {
    double theta = 0.0;  // fluctuation bound used for both training and testing
    int nf = 0;          // grid nodes per tie group during training
    bool converged = false;
    int iterations = 0;
    double J_final = 0.0;
    TestReport report;
};

namespace detail {

inline SweepPoint sweep_point(ModelKind kind, double theta, int nf, const OptimizationConfig& cfg,
                              std::uint64_t test_seed, int n_test, TestDistribution td) {
    QubitModel model = make_model(kind);
    model.set_bound_all(theta);
    const auto ensemble = training_grid(model.params, nf);
    const ControlField init = reference_initial_field(model);
    TrainingResult tr = train(model, ensemble, init, cfg);
    SweepPoint p;
    p.theta = theta;
    p.nf = nf;
    p.converged = tr.converged;
    p.iterations = tr.iterations;
    p.J_final = tr.J_history.back();
    p.report = monte_carlo_fidelity(tr.field, model, n_test, test_seed, cfg.threads, td);
    return p;
}

}  // namespace detail

// Retrain and retest at each bound. Row i tests with the stream derived from
// seed_test at index i, so single rows are reproducible in isolation via the
// seed recorded in their report.
inline std::vector<SweepPoint> sweep_bound(ModelKind kind, const std::vector<double>& thetas,
                                           int nf, const OptimizationConfig& cfg,
                                           std::uint64_t seed_test, int n_test,
                                           TestDistribution td = TestDistribution::model_default) {
    if (thetas.empty()) throw std::invalid_argument("sweep: bound list must be non-empty");
    for (std::size_t i = 1; i < thetas.size(); ++i)
        if (!(thetas[i] > thetas[i - 1]))
            throw std::invalid_argument("sweep: bounds must be strictly increasing");
    std::vector<SweepPoint> out;
    out.reserve(thetas.size());
    Rng base(seed_test);
    for (std::size_t i = 0; i < thetas.size(); ++i)
        out.push_back(detail::sweep_point(kind, thetas[i], nf, cfg,
                                          base.derive(static_cast<std::uint64_t>(i)).seed(),
                                          n_test, td));
    return out;
}

// Retrain at a fixed bound with varying grid sizes, retesting each result.
inline std::vector<SweepPoint> sweep_sample_count(
    ModelKind kind, double theta, const std::vector<int>& nfs, const OptimizationConfig& cfg,
    std::uint64_t seed_test, int n_test, TestDistribution td = TestDistribution::model_default) {
    if (nfs.empty()) throw std::invalid_argument("sweep: grid-size list must be non-empty");
    for (std::size_t i = 1; i < nfs.size(); ++i)
        if (nfs[i] <= nfs[i - 1])
            throw std::invalid_argument("sweep: grid sizes must be strictly increasing");
    std::vector<SweepPoint> out;
    out.reserve(nfs.size());
    Rng base(seed_test);
    for (std::size_t i = 0; i < nfs.size(); ++i)
        out.push_back(detail::sweep_point(kind, theta, nfs[i], cfg,
                                          base.derive(static_cast<std::uint64_t>(i)).seed(),
                                          n_test, td));
    return out;
}

inline std::vector<double> default_sweep_bounds() { return {0.05, 0.10, 0.15, 0.20, 0.25}; }
inline std::vector<int> default_sweep_grid_sizes() { return {1, 3, 5, 7, 9, 11}; }

}  // namespace slc
