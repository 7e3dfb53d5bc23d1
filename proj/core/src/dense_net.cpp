#include "officedr/dense_net.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "officedr/binary_io.hpp"

namespace officedr {

namespace {

constexpr std::uint32_t kNetVersion = 1;
constexpr std::uint32_t kAdamVersion = 1;

void apply_activation(Eigen::MatrixXd& z, Activation act) {
  switch (act) {
    case Activation::Identity: break;
    case Activation::Tanh: z = z.array().tanh(); break;
    case Activation::Relu: z = z.array().max(0.0); break;
  }
}

// Multiplies `grad` in place by the activation derivative, expressed through
// the post-activation value.
void scale_by_derivative(Eigen::MatrixXd& grad, const Eigen::MatrixXd& activated, Activation act) {
  switch (act) {
    case Activation::Identity: break;
    case Activation::Tanh: grad.array() *= 1.0 - activated.array().square(); break;
    case Activation::Relu: grad.array() *= (activated.array() > 0.0).cast<double>(); break;
  }
}

template <typename Fn>
void for_each_parameter(DenseNet& net, Fn&& fn) {
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto& layer = net.layers()[l];
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) fn(l, false, i, layer.weight.data()[i]);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) fn(l, true, i, layer.bias.data()[i]);
  }
}

}  // namespace

double Gradients::max_abs() const {
  double m = 0.0;
  for (const auto& w : weight) m = std::max(m, w.cwiseAbs().maxCoeff());
  for (const auto& b : bias) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

DenseNet::DenseNet(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    if (layers_[l].weight.cols() != layers_[l - 1].weight.rows()) {
      throw ValidationError("layer dimensions do not chain");
    }
  }
  for (const auto& layer : layers_) {
    if (layer.bias.size() != layer.weight.rows()) throw ValidationError("bias length differs from layer width");
  }
}

DenseNet DenseNet::create(const std::vector<int>& dims, const std::vector<Activation>& activations,
                          std::uint64_t seed) {
  if (dims.size() < 2) throw ValidationError("a network needs at least input and output dims");
  if (activations.size() != dims.size() - 1) throw ValidationError("need one activation per layer");
  for (int d : dims) {
    if (d < 1) throw ValidationError("layer dims must be positive");
  }
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    DenseLayer layer;
    layer.weight.resize(fan_out, fan_in);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = rng.uniform(-limit, limit);
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    layer.activation = activations[l];
    layers.push_back(std::move(layer));
  }
  return DenseNet(std::move(layers));
}

DenseNet DenseNet::mlp(int input, const std::vector<int>& hidden, int output, std::uint64_t seed,
                       Activation hidden_activation) {
  std::vector<int> dims{input};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output);
  std::vector<Activation> acts(hidden.size(), hidden_activation);
  acts.push_back(Activation::Identity);
  return create(dims, acts, seed);
}

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_dim()) throw ValidationError("input dimension mismatch");
  Eigen::MatrixXd a = inputs;
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = layer.weight * a;
    z.colwise() += layer.bias;
    apply_activation(z, layer.activation);
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& inputs, Trace& trace) const {
  if (inputs.rows() != input_dim()) throw ValidationError("input dimension mismatch");
  trace.values.resize(layers_.size() + 1);
  trace.values[0] = inputs;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    auto& z = trace.values[l + 1];
    z.noalias() = layer.weight * trace.values[l];
    z.colwise() += layer.bias;
    apply_activation(z, layer.activation);
  }
  return trace.values.back();
}

Gradients DenseNet::backward(const Trace& trace, const Eigen::MatrixXd& output_grad) const {
  if (trace.values.size() != layers_.size() + 1) throw ValidationError("trace does not match network");
  Gradients g;
  g.weight.resize(layers_.size());
  g.bias.resize(layers_.size());
  Eigen::MatrixXd delta = output_grad;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& layer = layers_[l];
    scale_by_derivative(delta, trace.values[l + 1], layer.activation);
    g.weight[l].noalias() = delta * trace.values[l].transpose();
    g.bias[l] = delta.rowwise().sum();
    Eigen::MatrixXd upstream;
    upstream.noalias() = layer.weight.transpose() * delta;
    delta = std::move(upstream);
  }
  g.input = std::move(delta);
  return g;
}

std::vector<int> DenseNet::dims() const {
  std::vector<int> d;
  if (layers_.empty()) return d;
  d.push_back(static_cast<int>(layers_.front().weight.cols()));
  for (const auto& layer : layers_) d.push_back(static_cast<int>(layer.weight.rows()));
  return d;
}

int DenseNet::input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }
int DenseNet::output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

bool DenseNet::all_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

bool operator==(const DenseNet& a, const DenseNet& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    const auto& x = a.layers_[l];
    const auto& y = b.layers_[l];
    if (x.activation != y.activation || x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols() ||
        x.weight != y.weight || x.bias != y.bias) {
      return false;
    }
  }
  return true;
}

double MeanSquaredError::value(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) const {
  return (outputs - targets).squaredNorm() / static_cast<double>(outputs.size());
}

Eigen::MatrixXd MeanSquaredError::gradient(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) const {
  return (2.0 / static_cast<double>(outputs.size())) * (outputs - targets);
}

LossAndGradients net_gradients(const DenseNet& net, const Loss& loss, const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& targets) {
  DenseNet::Trace trace;
  const Eigen::MatrixXd out = net.forward(inputs, trace);
  if (out.rows() != targets.rows() || out.cols() != targets.cols()) {
    throw ValidationError("target shape does not match network output");
  }
  LossAndGradients r;
  r.loss = loss.value(out, targets);
  if (!std::isfinite(r.loss)) throw DivergenceError("loss is not finite; training diverged");
  r.grads = net.backward(trace, loss.gradient(out, targets));
  return r;
}

AdamState AdamState::for_net(const DenseNet& net, const AdamConfig& config) {
  AdamState s;
  s.config = config;
  for (const auto& layer : net.layers()) {
    s.m_weight.push_back(Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    s.v_weight.push_back(Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()));
    s.m_bias.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
    s.v_bias.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
  }
  return s;
}

bool operator==(const AdamState& a, const AdamState& b) {
  return a.step == b.step && a.config.lr == b.config.lr && a.config.beta1 == b.config.beta1 &&
         a.config.beta2 == b.config.beta2 && a.config.epsilon == b.config.epsilon &&
         a.config.weight_decay == b.config.weight_decay && a.m_weight == b.m_weight && a.v_weight == b.v_weight &&
         a.m_bias == b.m_bias && a.v_bias == b.v_bias;
}

void adam_step(DenseNet& net, const Gradients& grads, AdamState& state) {
  auto& layers = net.layers();
  if (grads.weight.size() != layers.size() || state.m_weight.size() != layers.size()) {
    throw ValidationError("gradient/optimizer state does not match network");
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    const auto g = (grad.array() + c.weight_decay * param.array()).eval();
    m.array() = c.beta1 * m.array() + (1.0 - c.beta1) * g;
    v.array() = c.beta2 * v.array() + (1.0 - c.beta2) * g.square();
    param.array() -= c.lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + c.epsilon);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, grads.weight[l], state.m_weight[l], state.v_weight[l]);
    update(layers[l].bias, grads.bias[l], state.m_bias[l], state.v_bias[l]);
  }
}

void polyak_update(DenseNet& target, const DenseNet& online, double tau) {
  auto& t = target.layers();
  const auto& o = online.layers();
  if (t.size() != o.size()) throw ValidationError("target and online networks differ in shape");
  for (std::size_t l = 0; l < t.size(); ++l) {
    t[l].weight = (1.0 - tau) * t[l].weight + tau * o[l].weight;
    t[l].bias = (1.0 - tau) * t[l].bias + tau * o[l].bias;
  }
}

double finite_diff_check(const DenseNet& net, const Loss& loss, const Eigen::MatrixXd& inputs,
                         const Eigen::MatrixXd& targets, double eps) {
  const Gradients analytic = net_gradients(net, loss, inputs, targets).grads;
  DenseNet probe = net;
  double worst = 0.0;
  for_each_parameter(probe, [&](std::size_t l, bool is_bias, Eigen::Index i, double& theta) {
    const double saved = theta;
    theta = saved + eps;
    const double up = loss.value(probe.forward(inputs), targets);
    theta = saved - eps;
    const double down = loss.value(probe.forward(inputs), targets);
    theta = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double exact = is_bias ? analytic.bias[l].data()[i] : analytic.weight[l].data()[i];
    const double denom = std::max(std::abs(exact) + std::abs(numeric), 1e-8);
    worst = std::max(worst, std::abs(exact - numeric) / denom);
  });
  return worst;
}

double finite_diff_check(const DenseNet& net, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                         double eps) {
  return finite_diff_check(net, MeanSquaredError{}, inputs, targets, eps);
}

void write_net(std::ostream& out, const DenseNet& net) {
  bin::write_magic(out, "ODNN");
  bin::write<std::uint32_t>(out, kNetVersion);
  bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers().size()));
  for (int d : net.dims()) bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (const auto& layer : net.layers()) bin::write<std::uint8_t>(out, static_cast<std::uint8_t>(layer.activation));
  for (const auto& layer : net.layers()) {
    // Eigen stores column-major; the file is row-major.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = layer.weight;
    bin::write_doubles(out, std::span(rm.data(), static_cast<std::size_t>(rm.size())));
    bin::write_doubles(out, std::span(layer.bias.data(), static_cast<std::size_t>(layer.bias.size())));
  }
}

DenseNet read_net(std::istream& in) {
  bin::expect_magic(in, "ODNN", "network");
  const auto version = bin::read<std::uint32_t>(in);
  if (version != kNetVersion) throw IoError("unsupported network format version " + std::to_string(version));
  const auto count = bin::read<std::uint32_t>(in);
  if (count == 0 || count > 1024) throw IoError("implausible layer count");
  std::vector<int> dims(count + 1);
  for (auto& d : dims) {
    d = static_cast<int>(bin::read<std::uint32_t>(in));
    if (d < 1 || d > (1 << 20)) throw IoError("implausible layer width");
  }
  std::vector<DenseLayer> layers(count);
  for (auto& layer : layers) {
    const auto tag = bin::read<std::uint8_t>(in);
    if (tag > 2) throw IoError("unknown activation tag");
    layer.activation = static_cast<Activation>(tag);
  }
  for (std::uint32_t l = 0; l < count; ++l) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(dims[l + 1], dims[l]);
    bin::read_doubles(in, std::span(rm.data(), static_cast<std::size_t>(rm.size())));
    layers[l].weight = rm;
    layers[l].bias.resize(dims[l + 1]);
    bin::read_doubles(in, std::span(layers[l].bias.data(), static_cast<std::size_t>(layers[l].bias.size())));
  }
  return DenseNet(std::move(layers));
}

void save_net(const DenseNet& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_net(out, net);
}

DenseNet load_net(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_net(in);
}

void write_adam(std::ostream& out, const AdamState& s) {
  bin::write_magic(out, "ODAM");
  bin::write<std::uint32_t>(out, kAdamVersion);
  bin::write<double>(out, s.config.lr);
  bin::write<double>(out, s.config.beta1);
  bin::write<double>(out, s.config.beta2);
  bin::write<double>(out, s.config.epsilon);
  bin::write<double>(out, s.config.weight_decay);
  bin::write<std::int64_t>(out, s.step);
  bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(s.m_weight.size()));
  for (std::size_t l = 0; l < s.m_weight.size(); ++l) {
    bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(s.m_weight[l].rows()));
    bin::write<std::uint32_t>(out, static_cast<std::uint32_t>(s.m_weight[l].cols()));
    for (const auto* m : {&s.m_weight[l], &s.v_weight[l]}) {
      bin::write_doubles(out, std::span(m->data(), static_cast<std::size_t>(m->size())));
    }
    for (const auto* b : {&s.m_bias[l], &s.v_bias[l]}) {
      bin::write_doubles(out, std::span(b->data(), static_cast<std::size_t>(b->size())));
    }
  }
}

AdamState read_adam(std::istream& in) {
  bin::expect_magic(in, "ODAM", "optimizer state");
  if (bin::read<std::uint32_t>(in) != kAdamVersion) throw IoError("unsupported optimizer state version");
  AdamState s;
  s.config.lr = bin::read<double>(in);
  s.config.beta1 = bin::read<double>(in);
  s.config.beta2 = bin::read<double>(in);
  s.config.epsilon = bin::read<double>(in);
  s.config.weight_decay = bin::read<double>(in);
  s.step = bin::read<std::int64_t>(in);
  const auto count = bin::read<std::uint32_t>(in);
  if (count > 1024) throw IoError("implausible layer count");
  for (std::uint32_t l = 0; l < count; ++l) {
    const auto rows = bin::read<std::uint32_t>(in);
    const auto cols = bin::read<std::uint32_t>(in);
    if (rows > (1u << 20) || cols > (1u << 20)) throw IoError("implausible layer width");
    Eigen::MatrixXd m(rows, cols), v(rows, cols);
    bin::read_doubles(in, std::span(m.data(), static_cast<std::size_t>(m.size())));
    bin::read_doubles(in, std::span(v.data(), static_cast<std::size_t>(v.size())));
    Eigen::VectorXd mb(rows), vb(rows);
    bin::read_doubles(in, std::span(mb.data(), static_cast<std::size_t>(mb.size())));
    bin::read_doubles(in, std::span(vb.data(), static_cast<std::size_t>(vb.size())));
    s.m_weight.push_back(std::move(m));
    s.v_weight.push_back(std::move(v));
    s.m_bias.push_back(std::move(mb));
    s.v_bias.push_back(std::move(vb));
  }
  return s;
}

}  // namespace officedr
