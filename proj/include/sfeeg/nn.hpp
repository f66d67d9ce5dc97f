#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfeeg/mat.hpp"
#include "sfeeg/rng.hpp"

namespace sfeeg {

enum class Mode { Training, Evaluation };

// Named view of one learnable tensor: fp32 value storage + fp64 grad buffer.
struct TensorRef {
    std::string name;
    std::vector<float>* value = nullptr;
    std::vector<double>* grad = nullptr;
};

// Fully connected layer, weights [out x in], bias [out].
class Dense {
public:
    Dense() = default;
    Dense(int in_dim, int out_dim);

    void init(Rng& rng); // uniform +-sqrt(6/(fan_in+fan_out)), bias zero

    Mat forward(const Mat& x, bool cache_input);
    Mat backward(const Mat& dy); // accumulates into w_grad/b_grad, returns dx

    void zero_grad();
    void collect(const std::string& prefix, std::vector<TensorRef>& out);

    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }

    FloatMat weights;            // [out x in]
    std::vector<float> bias;     // [out]
    std::vector<double> w_grad;  // same shape as weights
    std::vector<double> b_grad;  // same shape as bias

private:
    int in_dim_ = 0;
    int out_dim_ = 0;
    Mat cached_input_;
    bool has_cache_ = false;
};

// Batch normalization over the batch dimension.
// Training mode normalizes with batch statistics (biased variance) and
// updates running statistics (unbiased variance, momentum update
// running = (1-momentum)*running + momentum*batch). Evaluation mode
// normalizes with running statistics. Batches of size 1 are rejected in
// training mode: the variance is undefined.
class BatchNorm {
public:
    BatchNorm() = default;
    explicit BatchNorm(int dim, float momentum = 0.1f, float eps = 1e-5f);

    Mat forward(const Mat& x, Mode mode, bool cache);
    Mat backward(const Mat& dy);

    void zero_grad();
    void collect(const std::string& prefix, std::vector<TensorRef>& out);

    int dim() const { return dim_; }
    float momentum() const { return momentum_; }
    float epsilon() const { return eps_; }

    std::vector<float> gamma;
    std::vector<float> beta;
    std::vector<float> running_mean;
    std::vector<float> running_var;
    std::vector<double> gamma_grad;
    std::vector<double> beta_grad;

private:
    int dim_ = 0;
    float momentum_ = 0.1f;
    float eps_ = 1e-5f;
    Mat cached_xhat_;
    std::vector<double> cached_inv_std_;
    bool has_cache_ = false;
};

// Elementwise ReLU with cached activation mask.
class Relu {
public:
    Mat forward(const Mat& x, bool cache);
    Mat backward(const Mat& dy);

private:
    std::vector<std::uint8_t> mask_;
    int rows_ = 0, cols_ = 0;
    bool has_cache_ = false;
};

// Row-wise softmax with max-subtraction. Throws NumericError on non-finite input.
Mat softmax(const Mat& logits);
std::vector<double> softmax(const std::vector<double>& logits);

// dL/dlogits from dL/dprobs for a row-wise softmax output.
Mat softmax_backward(const Mat& probs, const Mat& dprobs);

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 5e-4; // L2 term added to the gradient before the moment update
};

// Adam with bias correction. Weight decay enters as an additive L2 gradient
// term lambda*theta ahead of the moment accumulators. Moments are stored in
// fp32 alongside the parameters they track; the update itself runs in fp64.
class Adam {
public:
    Adam() = default;
    Adam(const AdamConfig& cfg, const std::vector<TensorRef>& params);

    void step(const std::vector<TensorRef>& params);

    std::int64_t step_count() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

    // Serialized state: moment buffers parallel to the registered params.
    std::vector<std::vector<float>> m;
    std::vector<std::vector<float>> v;
    void set_step_count(std::int64_t t) { t_ = t; }

private:
    AdamConfig cfg_;
    std::vector<std::size_t> sizes_;
    std::int64_t t_ = 0;
};

} // namespace sfeeg
