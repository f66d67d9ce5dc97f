#include "sfeeg/nn.hpp"

#include <algorithm>
#include <cmath>

namespace sfeeg {

// ---------------------------------------------------------------------------
// Dense
// ---------------------------------------------------------------------------

Dense::Dense(int in_dim, int out_dim)
    : weights(out_dim, in_dim), in_dim_(in_dim), out_dim_(out_dim) {
    bias.assign(static_cast<std::size_t>(out_dim), 0.0f);
    w_grad.assign(weights.v.size(), 0.0);
    b_grad.assign(bias.size(), 0.0);
}

void Dense::init(Rng& rng) {
    const double bound = std::sqrt(6.0 / (in_dim_ + out_dim_));
    for (float& w : weights.v) w = static_cast<float>(rng.uniform(-bound, bound));
    std::fill(bias.begin(), bias.end(), 0.0f);
}

Mat Dense::forward(const Mat& x, bool cache_input) {
    if (x.cols != in_dim_)
        throw ShapeError("linear forward: input cols " + std::to_string(x.cols) +
                         " != layer in dim " + std::to_string(in_dim_));
    Mat y(x.rows, out_dim_);
    for (int b = 0; b < x.rows; ++b) {
        const double* xb = x.row(b);
        double* yb = y.row(b);
        for (int o = 0; o < out_dim_; ++o) {
            const float* wrow = &weights.v[static_cast<std::size_t>(o) * in_dim_];
            double acc = bias[o];
            for (int i = 0; i < in_dim_; ++i) acc += static_cast<double>(wrow[i]) * xb[i];
            yb[o] = acc;
        }
    }
    if (cache_input) {
        cached_input_ = x;
        has_cache_ = true;
    }
    return y;
}

Mat Dense::backward(const Mat& dy) {
    if (!has_cache_) throw StateError("linear backward without cached forward");
    require_shape(dy, cached_input_.rows, out_dim_, "linear backward upstream grad");
    const Mat& x = cached_input_;
    Mat dx(x.rows, in_dim_);
    for (int b = 0; b < x.rows; ++b) {
        const double* dyb = dy.row(b);
        const double* xb = x.row(b);
        double* dxb = dx.row(b);
        for (int o = 0; o < out_dim_; ++o) {
            const double g = dyb[o];
            b_grad[o] += g;
            double* wg = &w_grad[static_cast<std::size_t>(o) * in_dim_];
            const float* wrow = &weights.v[static_cast<std::size_t>(o) * in_dim_];
            for (int i = 0; i < in_dim_; ++i) {
                wg[i] += g * xb[i];
                dxb[i] += g * static_cast<double>(wrow[i]);
            }
        }
    }
    return dx;
}

void Dense::zero_grad() {
    std::fill(w_grad.begin(), w_grad.end(), 0.0);
    std::fill(b_grad.begin(), b_grad.end(), 0.0);
}

void Dense::collect(const std::string& prefix, std::vector<TensorRef>& out) {
    out.push_back({prefix + ".w", &weights.v, &w_grad});
    out.push_back({prefix + ".b", &bias, &b_grad});
}

// ---------------------------------------------------------------------------
// BatchNorm
// ---------------------------------------------------------------------------

BatchNorm::BatchNorm(int dim, float momentum, float eps)
    : gamma(dim, 1.0f),
      beta(dim, 0.0f),
      running_mean(dim, 0.0f),
      running_var(dim, 1.0f),
      gamma_grad(dim, 0.0),
      beta_grad(dim, 0.0),
      dim_(dim),
      momentum_(momentum),
      eps_(eps) {}

Mat BatchNorm::forward(const Mat& x, Mode mode, bool cache) {
    if (x.cols != dim_)
        throw ShapeError("batchnorm forward: input cols " + std::to_string(x.cols) +
                         " != dim " + std::to_string(dim_));
    Mat y(x.rows, dim_);
    if (mode == Mode::Training) {
        if (x.rows < 2)
            throw ValueError("batchnorm training mode requires batch size >= 2");
        const int n = x.rows;
        if (cache) {
            cached_xhat_ = Mat(n, dim_);
            cached_inv_std_.assign(dim_, 0.0);
        }
        for (int d = 0; d < dim_; ++d) {
            double mean = 0.0;
            for (int b = 0; b < n; ++b) mean += x.at(b, d);
            mean /= n;
            double var = 0.0;
            for (int b = 0; b < n; ++b) {
                const double c = x.at(b, d) - mean;
                var += c * c;
            }
            const double var_biased = var / n;
            const double var_unbiased = var / (n - 1);
            const double inv_std = 1.0 / std::sqrt(var_biased + eps_);
            for (int b = 0; b < n; ++b) {
                const double xhat = (x.at(b, d) - mean) * inv_std;
                y.at(b, d) = gamma[d] * xhat + beta[d];
                if (cache) cached_xhat_.at(b, d) = xhat;
            }
            if (cache) cached_inv_std_[d] = inv_std;
            running_mean[d] = static_cast<float>((1.0 - momentum_) * running_mean[d] + momentum_ * mean);
            running_var[d] = static_cast<float>((1.0 - momentum_) * running_var[d] + momentum_ * var_unbiased);
        }
        has_cache_ = cache;
    } else {
        for (int d = 0; d < dim_; ++d) {
            const double inv_std = 1.0 / std::sqrt(static_cast<double>(running_var[d]) + eps_);
            const double mean = running_mean[d];
            for (int b = 0; b < x.rows; ++b)
                y.at(b, d) = gamma[d] * ((x.at(b, d) - mean) * inv_std) + beta[d];
        }
    }
    return y;
}

Mat BatchNorm::backward(const Mat& dy) {
    if (!has_cache_) throw StateError("batchnorm backward without cached training forward");
    const int n = cached_xhat_.rows;
    require_shape(dy, n, dim_, "batchnorm backward upstream grad");
    Mat dx(n, dim_);
    for (int d = 0; d < dim_; ++d) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int b = 0; b < n; ++b) {
            sum_dy += dy.at(b, d);
            sum_dy_xhat += dy.at(b, d) * cached_xhat_.at(b, d);
        }
        gamma_grad[d] += sum_dy_xhat;
        beta_grad[d] += sum_dy;
        const double g = gamma[d];
        const double inv_std = cached_inv_std_[d];
        for (int b = 0; b < n; ++b) {
            const double dxhat = dy.at(b, d) * g;
            dx.at(b, d) =
                inv_std / n * (n * dxhat - sum_dy * g - cached_xhat_.at(b, d) * sum_dy_xhat * g);
        }
    }
    return dx;
}

void BatchNorm::zero_grad() {
    std::fill(gamma_grad.begin(), gamma_grad.end(), 0.0);
    std::fill(beta_grad.begin(), beta_grad.end(), 0.0);
}

void BatchNorm::collect(const std::string& prefix, std::vector<TensorRef>& out) {
    out.push_back({prefix + ".gamma", &gamma, &gamma_grad});
    out.push_back({prefix + ".beta", &beta, &beta_grad});
}

// ---------------------------------------------------------------------------
// ReLU
// ---------------------------------------------------------------------------

Mat Relu::forward(const Mat& x, bool cache) {
    Mat y(x.rows, x.cols);
    if (cache) {
        mask_.assign(x.size(), 0);
        rows_ = x.rows;
        cols_ = x.cols;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool pos = x.a[i] > 0.0;
        y.a[i] = pos ? x.a[i] : 0.0;
        if (cache) mask_[i] = pos ? 1 : 0;
    }
    has_cache_ = cache;
    return y;
}

Mat Relu::backward(const Mat& dy) {
    if (!has_cache_) throw StateError("relu backward without cached forward");
    require_shape(dy, rows_, cols_, "relu backward upstream grad");
    Mat dx(rows_, cols_);
    for (std::size_t i = 0; i < dx.size(); ++i) dx.a[i] = mask_[i] ? dy.a[i] : 0.0;
    return dx;
}

// ---------------------------------------------------------------------------
// Softmax
// ---------------------------------------------------------------------------

Mat softmax(const Mat& logits) {
    if (!logits.all_finite()) throw NumericError("softmax: non-finite logits");
    Mat p(logits.rows, logits.cols);
    for (int b = 0; b < logits.rows; ++b) {
        const double* z = logits.row(b);
        double* pb = p.row(b);
        double mx = z[0];
        for (int k = 1; k < logits.cols; ++k) mx = std::max(mx, z[k]);
        double sum = 0.0;
        for (int k = 0; k < logits.cols; ++k) {
            pb[k] = std::exp(z[k] - mx);
            sum += pb[k];
        }
        for (int k = 0; k < logits.cols; ++k) pb[k] /= sum;
    }
    return p;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    Mat m(1, static_cast<int>(logits.size()));
    m.a = logits;
    return softmax(m).a;
}

Mat softmax_backward(const Mat& probs, const Mat& dprobs) {
    require_shape(dprobs, probs.rows, probs.cols, "softmax backward upstream grad");
    Mat dz(probs.rows, probs.cols);
    for (int b = 0; b < probs.rows; ++b) {
        const double* p = probs.row(b);
        const double* dp = dprobs.row(b);
        double dot = 0.0;
        for (int k = 0; k < probs.cols; ++k) dot += dp[k] * p[k];
        for (int k = 0; k < probs.cols; ++k) dz.row(b)[k] = p[k] * (dp[k] - dot);
    }
    return dz;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

Adam::Adam(const AdamConfig& cfg, const std::vector<TensorRef>& params) : cfg_(cfg) {
    m.reserve(params.size());
    v.reserve(params.size());
    sizes_.reserve(params.size());
    for (const TensorRef& p : params) {
        m.emplace_back(p.value->size(), 0.0f);
        v.emplace_back(p.value->size(), 0.0f);
        sizes_.push_back(p.value->size());
    }
}

void Adam::step(const std::vector<TensorRef>& params) {
    if (params.size() != sizes_.size())
        throw ShapeError("adam step: parameter list size changed");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::vector<float>& theta = *params[i].value;
        const std::vector<double>& grad = *params[i].grad;
        if (theta.size() != sizes_[i] || grad.size() != sizes_[i])
            throw ShapeError("adam step: shape mismatch for " + params[i].name);
        std::vector<float>& mi = m[i];
        std::vector<float>& vi = v[i];
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double g = grad[j] + cfg_.weight_decay * static_cast<double>(theta[j]);
            const double mj = cfg_.beta1 * static_cast<double>(mi[j]) + (1.0 - cfg_.beta1) * g;
            const double vj = cfg_.beta2 * static_cast<double>(vi[j]) + (1.0 - cfg_.beta2) * g * g;
            mi[j] = static_cast<float>(mj);
            vi[j] = static_cast<float>(vj);
            const double mhat = mj / bc1;
            const double vhat = vj / bc2;
            theta[j] = static_cast<float>(static_cast<double>(theta[j]) -
                                          cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon));
        }
    }
}

} // namespace sfeeg
