#pragma once

// Ensemble objective, its exact gradient, and the gradient-flow training
// loop. The objective is the grid average of terminal overlaps,
//   J(u) = (1/N) sum_n |<target | psi_n(T)>|^2,
// propagated per sample with the spectral step propagator. The gradient uses
// the eigenbasis derivative of each step: with H_k = V L V^H,
//   dU_k = V (Gamma o (V^H dH V)) V^H,
//   Gamma_pq = -i dt exp(-i dt (l_p+l_q)/2) sinc(dt (l_p-l_q)/2),
// whose diagonal is the confluent limit -i dt exp(-i dt l). Sample
// contributions are accumulated in index order, so results are independent
// of the thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "slc/field.hpp"
#include "slc/model.hpp"
#include "slc/parallel.hpp"
#include "slc/quantum.hpp"
#include "slc/sampling.hpp"

namespace slc {

struct OptimizationConfig {
    double initial_step = 0.0;  // 0: scale so the first update moves <= 1% of each range
    double shrink_factor = 0.5;
    double grow_factor = 1.1;
    double epsilon = 1e-4;  // stop when J gains less than this over `window` steps
    int window = 100;
    int max_iterations = 20000;
    int threads = 1;
};

inline void validate(const OptimizationConfig& cfg) {
    if (!(cfg.initial_step >= 0.0)) throw std::invalid_argument("config: initial_step must be >= 0");
    if (!(cfg.shrink_factor > 0.0 && cfg.shrink_factor < 1.0))
        throw std::invalid_argument("config: shrink_factor must be in (0,1)");
    if (!(cfg.grow_factor > 1.0)) throw std::invalid_argument("config: grow_factor must be > 1");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
    if (cfg.window < 1) throw std::invalid_argument("config: window must be >= 1");
    if (cfg.max_iterations < 1) throw std::invalid_argument("config: max_iterations must be >= 1");
    if (cfg.threads < 0) throw std::invalid_argument("config: threads must be >= 0");
}

struct TrainingResult {
    ControlField field;
    std::vector<double> J_history;  // J before the first step, then one entry per step
    int iterations = 0;             // accepted steps taken
    bool converged = false;         // windowed-progress rule fired before max_iterations
    std::vector<double> sample_fidelities;  // |<target|psi_n(T)>| per ensemble member
};

namespace detail {

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// theta(t_k) per parameter per interval midpoint, laid out [param][k].
inline std::vector<double> theta_table(const QubitModel& m, const FluctuationSample& s,
                                       const ControlField& f) {
    const int M = f.intervals;
    std::vector<double> tab(m.params.size() * static_cast<std::size_t>(M));
    for (std::size_t p = 0; p < m.params.size(); ++p)
        for (int k = 0; k < M; ++k)
            tab[p * M + k] = profile_value(m.params[p], s.values[p], f.midpoint(k));
    return tab;
}

template <int D>
class Engine {
  public:
    using Mat = Eigen::Matrix<Complex, D, D>;
    using Vec = Eigen::Matrix<Complex, D, 1>;

    explicit Engine(const QubitModel& m) : model_(&m) {
        psi0_ = m.psi0;
        target_ = m.target;
        for (const auto& c : m.channels) {
            chan_gen_.push_back(c.generator);
            chan_sign_.push_back(c.sign);
            chan_bind_.push_back(c.binding);
        }
        for (const auto& d : m.drifts) {
            drift_gen_.push_back(d.generator);
            drift_coef_.push_back(d.coefficient);
            drift_bind_.push_back(d.binding);
        }
    }

    // Scratch one gradient pass needs; reusable across iterations.
    struct Scratch {
        std::vector<Mat> basis;       // V_k
        std::vector<Vec> phase;       // exp(-i dt lambda) per step
        std::vector<Vec> psi;         // psi_0..psi_M
        std::vector<double> grad;     // C*M
        double J = 0.0;
        double overlap_abs = 0.0;
    };

    double objective_one(const ControlField& u, const std::vector<double>& theta,
                         double* overlap_abs = nullptr) const {
        const int M = u.intervals;
        const double dt = u.dt();
        Eigen::SelfAdjointEigenSolver<Mat> es;
        Mat h;
        Vec psi = psi0_;
        for (int k = 0; k < M; ++k) {
            build_h(u, theta, k, h);
            es.compute(h);
            Vec z = es.eigenvectors().adjoint() * psi;
            for (int i = 0; i < D; ++i)
                z(i) *= std::polar(1.0, -dt * es.eigenvalues()(i));
            psi = es.eigenvectors() * z;
        }
        const Complex c = target_.dot(psi);
        // The true overlap modulus is <= 1 for unit vectors; any excess here
        // is accumulated rounding from the per-step eigensolves and is cut
        // off so J and reported fidelities stay inside [0, 1].
        if (overlap_abs) *overlap_abs = std::min(std::abs(c), 1.0);
        return std::min(std::norm(c), 1.0);
    }

    void gradient_one(const ControlField& u, const std::vector<double>& theta, Scratch& s) const {
        const int M = u.intervals;
        const int C = u.channels();
        const double dt = u.dt();
        s.basis.resize(M);
        s.phase.resize(M);
        s.psi.resize(M + 1);
        s.grad.assign(static_cast<std::size_t>(C) * M, 0.0);

        Eigen::SelfAdjointEigenSolver<Mat> es;
        Mat h;
        s.psi[0] = psi0_;
        std::vector<Eigen::Matrix<double, D, 1>> lam(M);
        for (int k = 0; k < M; ++k) {
            build_h(u, theta, k, h);
            es.compute(h);
            s.basis[k] = es.eigenvectors();
            lam[k] = es.eigenvalues();
            for (int i = 0; i < D; ++i)
                s.phase[k](i) = std::polar(1.0, -dt * lam[k](i));
            Vec z = s.basis[k].adjoint() * s.psi[k];
            for (int i = 0; i < D; ++i) z(i) *= s.phase[k](i);
            s.psi[k + 1] = s.basis[k] * z;
        }

        const Complex overlap = target_.dot(s.psi[M]);
        s.J = std::min(std::norm(overlap), 1.0);
        s.overlap_abs = std::min(std::abs(overlap), 1.0);
        const Complex cbar = std::conj(overlap);

        Vec chi = target_;
        Mat gamma, pmat, w;
        for (int k = M - 1; k >= 0; --k) {
            const Vec y = s.basis[k].adjoint() * chi;
            const Vec z = s.basis[k].adjoint() * s.psi[k];
            for (int p = 0; p < D; ++p)
                for (int q = p; q < D; ++q) {
                    const Complex g = Complex(0.0, -dt) *
                                      std::polar(1.0, -0.5 * dt * (lam[k](p) + lam[k](q))) *
                                      sinc(0.5 * dt * (lam[k](p) - lam[k](q)));
                    gamma(p, q) = g;
                    gamma(q, p) = g;
                }
            pmat = (y.conjugate() * z.transpose()).cwiseProduct(gamma);
            for (int c = 0; c < C; ++c) {
                w.noalias() = s.basis[k].adjoint() * chan_gen_[c] * s.basis[k];
                const Complex inner = pmat.cwiseProduct(w).sum();
                const double coef = chan_coef(theta, c, k, u.intervals);
                s.grad[static_cast<std::size_t>(c) * M + k] = 2.0 * (cbar * (coef * inner)).real();
            }
            Vec yb = y;
            for (int i = 0; i < D; ++i) yb(i) *= std::conj(s.phase[k](i));
            chi = s.basis[k] * yb;
        }
    }

  private:
    double chan_coef(const std::vector<double>& theta, int c, int k, int M) const {
        const int b = chan_bind_[static_cast<std::size_t>(c)];
        const double th = b < 0 ? 1.0 : theta[static_cast<std::size_t>(b) * M + k];
        return th * chan_sign_[static_cast<std::size_t>(c)];
    }

    void build_h(const ControlField& u, const std::vector<double>& theta, int k, Mat& h) const {
        const int M = u.intervals;
        h.setZero();
        for (std::size_t d = 0; d < drift_gen_.size(); ++d) {
            const int b = drift_bind_[d];
            const double th = b < 0 ? 1.0 : theta[static_cast<std::size_t>(b) * M + k];
            h += (th * drift_coef_[d]) * drift_gen_[d];
        }
        for (std::size_t c = 0; c < chan_gen_.size(); ++c)
            h += (chan_coef(theta, static_cast<int>(c), k, M) * u.at(static_cast<int>(c), k)) *
                 chan_gen_[c];
    }

    const QubitModel* model_;
    Vec psi0_, target_;
    std::vector<Mat> chan_gen_;
    std::vector<double> chan_sign_;
    std::vector<int> chan_bind_;
    std::vector<Mat> drift_gen_;
    std::vector<double> drift_coef_;
    std::vector<int> drift_bind_;
};

template <typename F>
auto dispatch_dim(int dim, F&& f) {
    switch (dim) {
        case 2: return f(std::integral_constant<int, 2>{});
        case 4: return f(std::integral_constant<int, 4>{});
        default: throw std::invalid_argument("unsupported dimension (must be 2 or 4)");
    }
}

inline void check_field_model(const ControlField& f, const QubitModel& m) {
    validate_shape(f);
    validate(m);
    if (f.T != m.T || f.intervals != m.intervals)
        throw std::invalid_argument("field/model horizon mismatch");
    if (f.channels() != static_cast<int>(m.channels.size()))
        throw std::invalid_argument("field/model channel count mismatch");
    for (int c = 0; c < f.channels(); ++c) {
        const auto& ch = m.channels[static_cast<std::size_t>(c)];
        if (f.names[static_cast<std::size_t>(c)] != ch.name ||
            f.lo[static_cast<std::size_t>(c)] != ch.lo ||
            f.hi[static_cast<std::size_t>(c)] != ch.hi)
            throw std::invalid_argument("field/model channel mismatch at " + ch.name);
    }
    if (!within_bounds(f)) throw std::invalid_argument("field values out of channel bounds");
}

inline void check_samples(const QubitModel& m, const std::vector<FluctuationSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("ensemble must be non-empty");
    for (const auto& s : samples)
        if (s.values.size() != m.params.size())
            throw std::invalid_argument("sample/parameter count mismatch");
}

}  // namespace detail

// Mean of per-sample objectives, accumulated in sample order. Equals the
// arithmetic mean of single-sample calls bit-for-bit.
inline double objective(const ControlField& field, const QubitModel& model,
                        const std::vector<FluctuationSample>& samples, int threads = 1) {
    detail::check_field_model(field, model);
    detail::check_samples(model, samples);
    return detail::dispatch_dim(model.dim, [&](auto dim) {
        detail::Engine<dim()> engine(model);
        std::vector<double> j(samples.size());
        parallel_for(samples.size(), threads, [&](std::size_t i) {
            j[i] = engine.objective_one(field, detail::theta_table(model, samples[i], field));
        });
        double sum = 0.0;
        for (double v : j) sum += v;
        return sum / static_cast<double>(samples.size());
    });
}

// Objective value plus d J / d u, laid out like ControlField::values.
inline double objective_and_gradient(const ControlField& field, const QubitModel& model,
                                     const std::vector<FluctuationSample>& samples,
                                     std::vector<double>& grad, int threads = 1) {
    detail::check_field_model(field, model);
    detail::check_samples(model, samples);
    return detail::dispatch_dim(model.dim, [&](auto dim) {
        detail::Engine<dim()> engine(model);
        std::vector<typename detail::Engine<dim()>::Scratch> scratch(samples.size());
        parallel_for(samples.size(), threads, [&](std::size_t i) {
            engine.gradient_one(field, detail::theta_table(model, samples[i], field), scratch[i]);
        });
        const std::size_t len =
            static_cast<std::size_t>(field.channels()) * field.intervals;
        grad.assign(len, 0.0);
        double sum = 0.0;
        const double inv_n = 1.0 / static_cast<double>(samples.size());
        for (const auto& s : scratch) {
            sum += s.J;
            for (std::size_t i = 0; i < len; ++i) grad[i] += s.grad[i];
        }
        for (std::size_t i = 0; i < len; ++i) grad[i] *= inv_n;
        return sum / static_cast<double>(samples.size());
    });
}

inline std::vector<double> gradient(const ControlField& field, const QubitModel& model,
                                    const std::vector<FluctuationSample>& samples,
                                    int threads = 1) {
    std::vector<double> g;
    objective_and_gradient(field, model, samples, g, threads);
    return g;
}

// |<target|psi_n(T)>| per sample, in sample order.
inline std::vector<double> sample_fidelities(const ControlField& field, const QubitModel& model,
                                             const std::vector<FluctuationSample>& samples,
                                             int threads = 1) {
    detail::check_field_model(field, model);
    detail::check_samples(model, samples);
    return detail::dispatch_dim(model.dim, [&](auto dim) {
        detail::Engine<dim()> engine(model);
        std::vector<double> out(samples.size());
        parallel_for(samples.size(), threads, [&](std::size_t i) {
            double f = 0.0;
            engine.objective_one(field, detail::theta_table(model, samples[i], field), &f);
            out[i] = f;
        });
        return out;
    });
}

// Projected gradient ascent with accept/reject step adaptation: a trial step
// that does not decrease J is accepted and the rate grows; a decreasing one
// is rejected, the rate halves and the same iteration retries. Stops when J
// gained less than epsilon over the trailing `window` accepted steps.
inline TrainingResult train(const QubitModel& model, const std::vector<FluctuationSample>& ensemble,
                            const ControlField& init, const OptimizationConfig& cfg) {
    validate(cfg);
    detail::check_field_model(init, model);
    detail::check_samples(model, ensemble);

    const std::size_t len = init.values.size();
    ControlField u = init;
    std::vector<double> grad;
    double J = objective_and_gradient(u, model, ensemble, grad, cfg.threads);
    if (!std::isfinite(J)) throw std::runtime_error("train: non-finite objective at start");

    double eta = cfg.initial_step;
    if (eta <= 0.0) {
        eta = 0.0;
        for (int c = 0; c < u.channels(); ++c) {
            double gmax = 0.0;
            for (int k = 0; k < u.intervals; ++k)
                gmax = std::max(gmax, std::abs(grad[static_cast<std::size_t>(c) * u.intervals + k]));
            if (gmax > 0.0) {
                const double cand = 0.01 * (u.hi[static_cast<std::size_t>(c)] -
                                            u.lo[static_cast<std::size_t>(c)]) / gmax;
                eta = eta == 0.0 ? cand : std::min(eta, cand);
            }
        }
        if (eta == 0.0) eta = 1.0;  // flat start; any rate is equivalent
    }

    TrainingResult result;
    result.J_history.reserve(static_cast<std::size_t>(cfg.max_iterations) + 1);
    result.J_history.push_back(J);
    bool converged = false;
    int iter = 0;
    std::vector<double> grad_trial;
    while (iter < cfg.max_iterations) {
        ++iter;
        ControlField trial = u;
        double J_trial = 0.0;
        for (int retries = 0;; ++retries) {
            for (std::size_t i = 0; i < len; ++i) trial.values[i] = u.values[i] + eta * grad[i];
            trial = clamp(std::move(trial));
            // Gradient comes with the trial evaluation so an accepted step
            // already has what the next iteration needs.
            J_trial = objective_and_gradient(trial, model, ensemble, grad_trial, cfg.threads);
            if (!std::isfinite(J_trial)) throw std::runtime_error("train: non-finite objective");
            if (J_trial >= J) break;
            eta *= cfg.shrink_factor;
            if (retries >= 64) {  // step underflowed; hold position and let the window rule stop
                trial = u;
                J_trial = J;
                grad_trial = grad;
                break;
            }
        }
        u = std::move(trial);
        J = J_trial;
        grad.swap(grad_trial);
        eta = std::min(eta * cfg.grow_factor, 1e15);
        result.J_history.push_back(J);
        const std::size_t hist = result.J_history.size();
        if (hist > static_cast<std::size_t>(cfg.window) &&
            std::abs(result.J_history[hist - 1] -
                     result.J_history[hist - 1 - cfg.window]) < cfg.epsilon) {
            converged = true;
            break;
        }
    }

    result.field = std::move(u);
    result.iterations = iter;
    result.converged = converged;
    result.sample_fidelities = sample_fidelities(result.field, model, ensemble, cfg.threads);
    return result;
}

}  // namespace slc
