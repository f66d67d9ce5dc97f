#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfeeg/nn.hpp"
#include "sfeeg/tensor_io.hpp"

namespace sfeeg {

struct ModelConfig {
    int input_dim = 160;
    int hidden_dim = 128;    // extractor first layer width
    int feature_dim = 64;    // extractor output width
    int cls_hidden1 = 32;    // classifier hidden widths
    int cls_hidden2 = 16;
    int num_classes = 2;
};

// Dense + BatchNorm + ReLU block.
struct FcBnRelu {
    Dense fc;
    BatchNorm bn;
    Relu relu;

    FcBnRelu() = default;
    FcBnRelu(int in_dim, int out_dim) : fc(in_dim, out_dim), bn(out_dim) {}

    Mat forward(const Mat& x, Mode mode, bool cache);
    Mat backward(const Mat& dy);
    void zero_grad();
    void collect(const std::string& prefix, std::vector<TensorRef>& out);
};

// Three fully connected layers; the final one emits raw logits.
struct ClassifierHead {
    FcBnRelu h1;
    FcBnRelu h2;
    Dense out;

    ClassifierHead() = default;
    ClassifierHead(int in_dim, int hidden1, int hidden2, int classes)
        : h1(in_dim, hidden1), h2(hidden1, hidden2), out(hidden2, classes) {}

    Mat forward(const Mat& x, Mode mode, bool cache);
    Mat backward(const Mat& dlogits); // returns grad wrt the head input
    void zero_grad();
    void collect(const std::string& prefix, std::vector<TensorRef>& out);
};

// Everything a forward pass produces.
struct NetOutput {
    Mat features;  // [B x feature_dim]
    Mat logits1;   // [B x K]
    Mat logits2;
    Mat probs1;
    Mat probs2;
    Mat probs_avg; // (probs1 + probs2) / 2
};

// Feature extractor (two FC+BN+ReLU blocks) feeding two parallel
// classifier heads of identical shape and independent parameters.
class EmotionNet {
public:
    EmotionNet() = default;
    explicit EmotionNet(const ModelConfig& cfg);

    void init(std::uint64_t seed);

    NetOutput forward(const Mat& batch, Mode mode);

    // Reverse pass from dL/dprobs1 and dL/dprobs2 of the last cached
    // training forward. Head gradients accumulate additively into the
    // shared extractor parameters.
    void backward(const NetOutput& output, const Mat& dprobs1, const Mat& dprobs2);

    // argmax of probs_avg; ties resolve to the lower class index.
    std::vector<int> predict(const Mat& batch);

    void zero_grad();
    std::vector<TensorRef> parameters();

    const ModelConfig& config() const { return cfg_; }

    TensorMap to_tensors() const;
    void from_tensors(const TensorMap& t);

    FcBnRelu f1, f2;
    ClassifierHead c1, c2;

private:
    ModelConfig cfg_;
    bool has_training_cache_ = false;
};

int argmax_tie_low(const double* row, int n);

// Checkpoint I/O. The optional Adam state rides along under "adam." names.
void save_checkpoint(const EmotionNet& net, const Adam* adam, const std::string& path);
EmotionNet load_checkpoint(const std::string& path);
EmotionNet load_checkpoint(const std::string& path, std::optional<Adam>& adam_out,
                           const AdamConfig& adam_cfg);

} // namespace sfeeg
