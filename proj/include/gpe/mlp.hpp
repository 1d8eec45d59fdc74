#pragma once

#include <span>
#include <vector>

#include "gpe/common.hpp"

namespace gpe {

enum class Activation { None, Relu };

struct MlpLayer {
    int in = 0, out = 0;
    Activation act = Activation::None;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;  // out
};

struct MLPStack {
    std::vector<MlpLayer> layers;

    bool empty() const { return layers.empty(); }
    int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out; }
    size_t param_count() const;
    void validate() const;  // throws ConfigError on broken dimension chains
};

// widths = {in, h1, ..., out}; ReLU on all but the last layer unless
// final_relu is set.
MLPStack make_mlp(const std::vector<int>& widths, bool final_relu = false);

// U(-1/sqrt(in), 1/sqrt(in)) weights, zero biases
void init_mlp_uniform(MLPStack& mlp, Rng& rng);

// zero the last layer (weights and bias), for identity-residual regressors
void zero_final_layer(MLPStack& mlp);

// y = stack(x) for a batch of n row-major in_dim vectors
void mlp_apply_batch(const MLPStack& mlp, const double* in, int n, double* out,
                     MacCounter* mc = nullptr);

std::vector<double> mlp_apply(const MLPStack& mlp, std::span<const double> in,
                              MacCounter* mc = nullptr);

// Cached forward state for one batch, consumed by mlp_backward_batch.
struct MlpBatchActs {
    int n = 0;
    std::vector<double> input;               // n x in_dim
    std::vector<std::vector<double>> pre;    // per layer, n x out
    std::vector<std::vector<double>> post;   // per layer, n x out
};

struct MlpGrad {
    std::vector<std::vector<double>> d_w, d_b;

    static MlpGrad zeros_like(const MLPStack& mlp);
    void accumulate(const MlpGrad& other, double scale = 1.0);
    void scale(double s);
    bool finite() const;
};

const std::vector<double>& mlp_forward_batch_cached(const MLPStack& mlp, const double* in,
                                                    int n, MlpBatchActs& acts);

// d_out is n x out_dim; gradients accumulate into grad. If d_in is non-null
// it receives n x in_dim input gradients.
void mlp_backward_batch(const MLPStack& mlp, const MlpBatchActs& acts,
                        const double* d_out, MlpGrad& grad, double* d_in);

// MACs of one full application to a single vector (sum of out*in per layer).
uint64_t mlp_macs(const MLPStack& mlp);

}  // namespace gpe
