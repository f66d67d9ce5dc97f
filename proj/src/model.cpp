#include "sfeeg/model.hpp"

#include <algorithm>

namespace sfeeg {

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

Mat FcBnRelu::forward(const Mat& x, Mode mode, bool cache) {
    Mat y = fc.forward(x, cache);
    y = bn.forward(y, mode, cache);
    return relu.forward(y, cache);
}

Mat FcBnRelu::backward(const Mat& dy) {
    Mat d = relu.backward(dy);
    d = bn.backward(d);
    return fc.backward(d);
}

void FcBnRelu::zero_grad() {
    fc.zero_grad();
    bn.zero_grad();
}

void FcBnRelu::collect(const std::string& prefix, std::vector<TensorRef>& out) {
    fc.collect(prefix + ".fc", out);
    bn.collect(prefix + ".bn", out);
}

Mat ClassifierHead::forward(const Mat& x, Mode mode, bool cache) {
    Mat y = h1.forward(x, mode, cache);
    y = h2.forward(y, mode, cache);
    return out.forward(y, cache);
}

Mat ClassifierHead::backward(const Mat& dlogits) {
    Mat d = out.backward(dlogits);
    d = h2.backward(d);
    return h1.backward(d);
}

void ClassifierHead::zero_grad() {
    h1.zero_grad();
    h2.zero_grad();
    out.zero_grad();
}

void ClassifierHead::collect(const std::string& prefix, std::vector<TensorRef>& out_refs) {
    h1.collect(prefix + ".h1", out_refs);
    h2.collect(prefix + ".h2", out_refs);
    out.collect(prefix + ".out", out_refs);
}

// ---------------------------------------------------------------------------
// EmotionNet
// ---------------------------------------------------------------------------

EmotionNet::EmotionNet(const ModelConfig& cfg)
    : f1(cfg.input_dim, cfg.hidden_dim),
      f2(cfg.hidden_dim, cfg.feature_dim),
      c1(cfg.feature_dim, cfg.cls_hidden1, cfg.cls_hidden2, cfg.num_classes),
      c2(cfg.feature_dim, cfg.cls_hidden1, cfg.cls_hidden2, cfg.num_classes),
      cfg_(cfg) {}

void EmotionNet::init(std::uint64_t seed) {
    Rng rng(seed);
    f1.fc.init(rng);
    f2.fc.init(rng);
    c1.h1.fc.init(rng);
    c1.h2.fc.init(rng);
    c1.out.init(rng);
    c2.h1.fc.init(rng);
    c2.h2.fc.init(rng);
    c2.out.init(rng);
}

NetOutput EmotionNet::forward(const Mat& batch, Mode mode) {
    if (batch.rows < 1) throw ValueError("forward: empty batch");
    if (batch.cols != cfg_.input_dim)
        throw ShapeError("forward: feature dim " + std::to_string(batch.cols) + " != " +
                         std::to_string(cfg_.input_dim));
    const bool cache = (mode == Mode::Training);
    NetOutput o;
    Mat h = f1.forward(batch, mode, cache);
    o.features = f2.forward(h, mode, cache);
    o.logits1 = c1.forward(o.features, mode, cache);
    o.logits2 = c2.forward(o.features, mode, cache);
    o.probs1 = softmax(o.logits1);
    o.probs2 = softmax(o.logits2);
    o.probs_avg = Mat(o.probs1.rows, o.probs1.cols);
    for (std::size_t i = 0; i < o.probs_avg.size(); ++i)
        o.probs_avg.a[i] = 0.5 * (o.probs1.a[i] + o.probs2.a[i]);
    has_training_cache_ = cache;
    return o;
}

void EmotionNet::backward(const NetOutput& output, const Mat& dprobs1, const Mat& dprobs2) {
    if (!has_training_cache_)
        throw StateError("backward without a preceding training-mode forward");
    const Mat dlogits1 = softmax_backward(output.probs1, dprobs1);
    const Mat dlogits2 = softmax_backward(output.probs2, dprobs2);
    const Mat dfeat1 = c1.backward(dlogits1);
    const Mat dfeat2 = c2.backward(dlogits2);
    Mat dfeat(dfeat1.rows, dfeat1.cols);
    for (std::size_t i = 0; i < dfeat.size(); ++i) dfeat.a[i] = dfeat1.a[i] + dfeat2.a[i];
    Mat dh = f2.backward(dfeat);
    f1.backward(dh);
}

int argmax_tie_low(const double* row, int n) {
    int best = 0;
    for (int k = 1; k < n; ++k)
        if (row[k] > row[best]) best = k;
    return best;
}

std::vector<int> EmotionNet::predict(const Mat& batch) {
    const NetOutput o = forward(batch, Mode::Evaluation);
    std::vector<int> labels(static_cast<std::size_t>(batch.rows));
    for (int b = 0; b < batch.rows; ++b)
        labels[b] = argmax_tie_low(o.probs_avg.row(b), o.probs_avg.cols);
    return labels;
}

void EmotionNet::zero_grad() {
    f1.zero_grad();
    f2.zero_grad();
    c1.zero_grad();
    c2.zero_grad();
}

std::vector<TensorRef> EmotionNet::parameters() {
    std::vector<TensorRef> refs;
    f1.collect("f1", refs);
    f2.collect("f2", refs);
    c1.collect("c1", refs);
    c2.collect("c2", refs);
    return refs;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

TensorBlob blob1d(const std::vector<float>& v) {
    TensorBlob b;
    b.dims = {static_cast<std::uint32_t>(v.size())};
    b.data = v;
    return b;
}

TensorBlob blob2d(const FloatMat& m) {
    TensorBlob b;
    b.dims = {static_cast<std::uint32_t>(m.rows), static_cast<std::uint32_t>(m.cols)};
    b.data = m.v;
    return b;
}

void put_dense(TensorMap& t, const std::string& prefix, const Dense& d) {
    t[prefix + ".w"] = blob2d(d.weights);
    t[prefix + ".b"] = blob1d(d.bias);
}

void put_bn(TensorMap& t, const std::string& prefix, const BatchNorm& bn) {
    t[prefix + ".gamma"] = blob1d(bn.gamma);
    t[prefix + ".beta"] = blob1d(bn.beta);
    t[prefix + ".run_mean"] = blob1d(bn.running_mean);
    t[prefix + ".run_var"] = blob1d(bn.running_var);
}

void put_block(TensorMap& t, const std::string& prefix, const FcBnRelu& blk) {
    put_dense(t, prefix + ".fc", blk.fc);
    put_bn(t, prefix + ".bn", blk.bn);
}

void put_head(TensorMap& t, const std::string& prefix, const ClassifierHead& h) {
    put_block(t, prefix + ".h1", h.h1);
    put_block(t, prefix + ".h2", h.h2);
    put_dense(t, prefix + ".out", h.out);
}

const TensorBlob& need(const TensorMap& t, const std::string& name) {
    auto it = t.find(name);
    if (it == t.end()) throw CheckpointError("missing tensor '" + name + "'");
    return it->second;
}

void take_vec(const TensorMap& t, const std::string& name, std::vector<float>& dst) {
    const TensorBlob& b = need(t, name);
    if (b.dims.size() != 1 || b.data.size() != dst.size())
        throw ShapeError("tensor '" + name + "' has unexpected shape");
    dst = b.data;
}

void take_dense(const TensorMap& t, const std::string& prefix, Dense& d) {
    const TensorBlob& w = need(t, prefix + ".w");
    if (w.dims.size() != 2 || static_cast<int>(w.dims[0]) != d.weights.rows ||
        static_cast<int>(w.dims[1]) != d.weights.cols)
        throw ShapeError("tensor '" + prefix + ".w' has unexpected shape");
    d.weights.v = w.data;
    take_vec(t, prefix + ".b", d.bias);
}

void take_bn(const TensorMap& t, const std::string& prefix, BatchNorm& bn) {
    take_vec(t, prefix + ".gamma", bn.gamma);
    take_vec(t, prefix + ".beta", bn.beta);
    take_vec(t, prefix + ".run_mean", bn.running_mean);
    take_vec(t, prefix + ".run_var", bn.running_var);
}

void take_block(const TensorMap& t, const std::string& prefix, FcBnRelu& blk) {
    take_dense(t, prefix + ".fc", blk.fc);
    take_bn(t, prefix + ".bn", blk.bn);
}

void take_head(const TensorMap& t, const std::string& prefix, ClassifierHead& h) {
    take_block(t, prefix + ".h1", h.h1);
    take_block(t, prefix + ".h2", h.h2);
    take_dense(t, prefix + ".out", h.out);
}

ModelConfig config_from_tensors(const TensorMap& t) {
    ModelConfig cfg;
    const TensorBlob& f1w = need(t, "f1.fc.w");
    const TensorBlob& f2w = need(t, "f2.fc.w");
    const TensorBlob& h1w = need(t, "c1.h1.fc.w");
    const TensorBlob& h2w = need(t, "c1.h2.fc.w");
    const TensorBlob& ow = need(t, "c1.out.w");
    if (f1w.dims.size() != 2 || f2w.dims.size() != 2 || h1w.dims.size() != 2 ||
        h2w.dims.size() != 2 || ow.dims.size() != 2)
        throw ShapeError("checkpoint weight tensors must be rank 2");
    cfg.input_dim = static_cast<int>(f1w.dims[1]);
    cfg.hidden_dim = static_cast<int>(f1w.dims[0]);
    cfg.feature_dim = static_cast<int>(f2w.dims[0]);
    cfg.cls_hidden1 = static_cast<int>(h1w.dims[0]);
    cfg.cls_hidden2 = static_cast<int>(h2w.dims[0]);
    cfg.num_classes = static_cast<int>(ow.dims[0]);
    return cfg;
}

} // namespace

TensorMap EmotionNet::to_tensors() const {
    TensorMap t;
    put_block(t, "f1", f1);
    put_block(t, "f2", f2);
    put_head(t, "c1", c1);
    put_head(t, "c2", c2);
    return t;
}

void EmotionNet::from_tensors(const TensorMap& t) {
    take_block(t, "f1", f1);
    take_block(t, "f2", f2);
    take_head(t, "c1", c1);
    take_head(t, "c2", c2);
}

void save_checkpoint(const EmotionNet& net, const Adam* adam, const std::string& path) {
    TensorMap t = net.to_tensors();
    if (adam) {
        // Moment buffers are keyed by the parameter name they track.
        std::vector<TensorRef> params = const_cast<EmotionNet&>(net).parameters();
        if (adam->m.size() != params.size())
            throw ShapeError("adam state does not match the network parameter list");
        for (std::size_t i = 0; i < params.size(); ++i) {
            t["adam.m." + params[i].name] = blob1d(adam->m[i]);
            t["adam.v." + params[i].name] = blob1d(adam->v[i]);
        }
        t["adam.t"] = blob1d({static_cast<float>(adam->step_count())});
    }
    write_tensor_file(path, t);
}

EmotionNet load_checkpoint(const std::string& path) {
    const TensorMap t = read_tensor_file(path);
    EmotionNet net(config_from_tensors(t));
    net.from_tensors(t);
    return net;
}

EmotionNet load_checkpoint(const std::string& path, std::optional<Adam>& adam_out,
                           const AdamConfig& adam_cfg) {
    const TensorMap t = read_tensor_file(path);
    EmotionNet net(config_from_tensors(t));
    net.from_tensors(t);
    adam_out.reset();
    if (t.count("adam.t")) {
        Adam adam(adam_cfg, net.parameters());
        std::vector<TensorRef> params = net.parameters();
        for (std::size_t i = 0; i < params.size(); ++i) {
            take_vec(t, "adam.m." + params[i].name, adam.m[i]);
            take_vec(t, "adam.v." + params[i].name, adam.v[i]);
        }
        adam.set_step_count(static_cast<std::int64_t>(need(t, "adam.t").data.at(0)));
        adam_out = std::move(adam);
    }
    return net;
}

} // namespace sfeeg
