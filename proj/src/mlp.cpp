#include "arb/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "arb/errors.hpp"

namespace arb {

namespace {

double next_u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_shapes(const MlpModel& m) {
    const int layers = m.num_layers();
    if (layers < 1) throw ConfigError("model needs at least one layer");
    if (static_cast<int>(m.weights.size()) != layers ||
        static_cast<int>(m.biases.size()) != layers)
        throw ConfigError("model weight/bias layer count differs from dims");
    for (int l = 0; l < layers; ++l) {
        const size_t rows = static_cast<size_t>(m.dims[l + 1]);
        const size_t cols = static_cast<size_t>(m.dims[l]);
        if (m.weights[l].size() != rows * cols || m.biases[l].size() != rows)
            throw ConfigError("model layer shape mismatch");
    }
}

void write_vector(std::ofstream& out, const char* tag, const std::vector<double>& v) {
    out << tag;
    char buf[40];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, " %.17g", x);
        out << buf;
    }
    out << '\n';
}

std::vector<double> read_vector(std::ifstream& in, const std::string& tag, size_t count) {
    std::string got;
    if (!(in >> got) || got != tag)
        throw InputError("model file: expected section '" + tag + "'");
    std::vector<double> v(count);
    for (size_t i = 0; i < count; ++i)
        if (!(in >> v[i])) throw InputError("model file: truncated section '" + tag + "'");
    return v;
}

}  // namespace

void MlpModel::init(const std::vector<int>& layer_dims, std::uint64_t layer_seed) {
    if (layer_dims.size() < 2) throw ConfigError("model needs input and output layers");
    for (int d : layer_dims)
        if (d < 1) throw ConfigError("model layer sizes must be positive");
    dims = layer_dims;
    seed = layer_seed;
    const int layers = num_layers();
    weights.assign(layers, {});
    biases.assign(layers, {});
    std::mt19937_64 rng(layer_seed);
    for (int l = 0; l < layers; ++l) {
        const int fan_in = dims[l];
        const int fan_out = dims[l + 1];
        const double bound = std::sqrt(6.0 / fan_in);
        weights[l].resize(static_cast<size_t>(fan_out) * fan_in);
        for (double& w : weights[l]) w = (2.0 * next_u01(rng) - 1.0) * bound;
        biases[l].assign(static_cast<size_t>(fan_out), 0.0);
    }
}

std::vector<double> MlpModel::net_forward(const std::vector<double>& xn) const {
    check_shapes(*this);
    if (static_cast<int>(xn.size()) != dims[0])
        throw InputError("net_forward: input size differs from model input layer");
    std::vector<double> a = xn;
    std::vector<double> z;
    const int layers = num_layers();
    for (int l = 0; l < layers; ++l) {
        const int rows = dims[l + 1];
        const int cols = dims[l];
        z.assign(static_cast<size_t>(rows), 0.0);
        const double* w = weights[l].data();
        for (int r = 0; r < rows; ++r) {
            double s = biases[l][r];
            const double* wr = w + static_cast<size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) s += wr[c] * a[c];
            z[r] = (l + 1 < layers && s < 0.0) ? 0.0 : s;  // ReLU except output
        }
        a.swap(z);
    }
    return a;
}

std::vector<double> MlpModel::forward(const std::vector<double>& x_raw) const {
    if (norm_x.mean.size() != static_cast<size_t>(dims.front()) ||
        norm_y.mean.size() != static_cast<size_t>(dims.back()))
        throw ConfigError("model normalization sizes differ from layer sizes");
    std::vector<double> x = x_raw;
    norm_x.apply(x);
    std::vector<double> y = net_forward(x);
    for (size_t j = 0; j < y.size(); ++j) y[j] = y[j] * norm_y.std[j] + norm_y.mean[j];
    return y;
}

Gradients Gradients::like(const MlpModel& model) {
    Gradients g;
    g.weights.reserve(model.weights.size());
    g.biases.reserve(model.biases.size());
    for (const auto& w : model.weights) g.weights.emplace_back(w.size(), 0.0);
    for (const auto& b : model.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
}

void Gradients::zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

AdamState AdamState::like(const MlpModel& model) {
    AdamState s;
    for (const auto& w : model.weights) {
        s.m_w.emplace_back(w.size(), 0.0);
        s.v_w.emplace_back(w.size(), 0.0);
    }
    for (const auto& b : model.biases) {
        s.m_b.emplace_back(b.size(), 0.0);
        s.v_b.emplace_back(b.size(), 0.0);
    }
    return s;
}

double loss_and_grad(const MlpModel& model, const std::vector<std::vector<double>>& X,
                     const std::vector<std::vector<double>>& Y, const int* idx, int count,
                     Gradients& out) {
    check_shapes(model);
    if (count < 1) throw InputError("loss_and_grad: empty batch");
    out.zero();
    const int layers = model.num_layers();
    const int n_out = model.dims.back();
    const double inv_count = 1.0 / count;
    double total_loss = 0.0;

    std::vector<std::vector<double>> act(static_cast<size_t>(layers) + 1);
    std::vector<double> delta, delta_prev;
    for (int s = 0; s < count; ++s) {
        const std::vector<double>& x = X[static_cast<size_t>(idx[s])];
        const std::vector<double>& y = Y[static_cast<size_t>(idx[s])];
        if (static_cast<int>(x.size()) != model.dims[0] ||
            static_cast<int>(y.size()) != n_out)
            throw InputError("loss_and_grad: sample size differs from model layers");

        act[0] = x;
        for (int l = 0; l < layers; ++l) {
            const int rows = model.dims[l + 1];
            const int cols = model.dims[l];
            act[l + 1].assign(static_cast<size_t>(rows), 0.0);
            const double* w = model.weights[l].data();
            const double* a = act[l].data();
            for (int r = 0; r < rows; ++r) {
                double sum = model.biases[l][r];
                const double* wr = w + static_cast<size_t>(r) * cols;
                for (int c = 0; c < cols; ++c) sum += wr[c] * a[c];
                act[l + 1][r] = (l + 1 < layers && sum < 0.0) ? 0.0 : sum;
            }
        }

        delta.assign(static_cast<size_t>(n_out), 0.0);
        double sample_loss = 0.0;
        for (int j = 0; j < n_out; ++j) {
            const double err = act[layers][j] - y[j];
            sample_loss += err * err;
            delta[j] = 2.0 * err / n_out * inv_count;
        }
        total_loss += sample_loss / n_out * inv_count;

        for (int l = layers - 1; l >= 0; --l) {
            const int rows = model.dims[l + 1];
            const int cols = model.dims[l];
            double* gw = out.weights[l].data();
            const double* a = act[l].data();
            for (int r = 0; r < rows; ++r) {
                const double d = delta[r];
                out.biases[l][r] += d;
                double* gr = gw + static_cast<size_t>(r) * cols;
                for (int c = 0; c < cols; ++c) gr[c] += d * a[c];
            }
            if (l > 0) {
                delta_prev.assign(static_cast<size_t>(cols), 0.0);
                const double* w = model.weights[l].data();
                for (int r = 0; r < rows; ++r) {
                    const double d = delta[r];
                    const double* wr = w + static_cast<size_t>(r) * cols;
                    for (int c = 0; c < cols; ++c) delta_prev[c] += wr[c] * d;
                }
                // ReLU gate: activation zero means this unit was clipped.
                for (int c = 0; c < cols; ++c)
                    if (act[l][c] <= 0.0) delta_prev[c] = 0.0;
                delta.swap(delta_prev);
            }
        }
    }
    if (!std::isfinite(total_loss)) throw NumericError("loss_and_grad: loss is not finite");
    return total_loss;
}

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state, const AdamConfig& cfg) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                      std::vector<double>& v) {
        for (size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            p[i] -= cfg.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.eps);
        }
    };
    for (size_t l = 0; l < model.weights.size(); ++l) {
        update(model.weights[l], grads.weights[l], state.m_w[l], state.v_w[l]);
        update(model.biases[l], grads.biases[l], state.m_b[l], state.v_b[l]);
    }
}

void save_model(const MlpModel& model, const std::string& path) {
    check_shapes(model);
    std::ofstream out(path);
    if (!out) throw InputError("cannot open for writing: " + path);
    out << "ARBMLP1\n";
    out << "dims " << model.dims.size();
    for (int d : model.dims) out << ' ' << d;
    out << '\n';
    out << "features lags " << model.feature_spec.n_rtp_lags << " dap "
        << (model.feature_spec.use_dap ? 1 : 0) << '\n';
    out << "seed " << model.seed << '\n';
    write_vector(out, "xmean", model.norm_x.mean);
    write_vector(out, "xstd", model.norm_x.std);
    write_vector(out, "ymean", model.norm_y.mean);
    write_vector(out, "ystd", model.norm_y.std);
    for (int l = 0; l < model.num_layers(); ++l) {
        write_vector(out, ("W" + std::to_string(l)).c_str(), model.weights[l]);
        write_vector(out, ("b" + std::to_string(l)).c_str(), model.biases[l]);
    }
    if (!out) throw InputError("write failed: " + path);
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open: " + path);
    std::string magic;
    if (!(in >> magic) || magic != "ARBMLP1")
        throw InputError("model file: bad magic in " + path);
    std::string tag;
    size_t n_dims = 0;
    if (!(in >> tag >> n_dims) || tag != "dims" || n_dims < 2 || n_dims > 64)
        throw InputError("model file: bad dims header");
    MlpModel m;
    m.dims.resize(n_dims);
    for (size_t i = 0; i < n_dims; ++i) {
        if (!(in >> m.dims[i]) || m.dims[i] < 1)
            throw InputError("model file: bad layer size");
    }
    std::string tag2;
    int dap_flag = -1;
    if (!(in >> tag >> tag2 >> m.feature_spec.n_rtp_lags) || tag != "features" || tag2 != "lags" ||
        m.feature_spec.n_rtp_lags < 1)
        throw InputError("model file: bad features line");
    if (!(in >> tag >> dap_flag) || tag != "dap" || (dap_flag != 0 && dap_flag != 1))
        throw InputError("model file: bad dap flag");
    m.feature_spec.use_dap = dap_flag == 1;
    if (m.feature_spec.length() != m.dims.front())
        throw InputError("model file: feature spec length differs from input layer");
    if (!(in >> tag >> m.seed) || tag != "seed") throw InputError("model file: bad seed line");

    const size_t d_in = static_cast<size_t>(m.dims.front());
    const size_t d_out = static_cast<size_t>(m.dims.back());
    m.norm_x.mean = read_vector(in, "xmean", d_in);
    m.norm_x.std = read_vector(in, "xstd", d_in);
    m.norm_y.mean = read_vector(in, "ymean", d_out);
    m.norm_y.std = read_vector(in, "ystd", d_out);
    for (size_t l = 0; l + 1 < n_dims; ++l) {
        const size_t rows = static_cast<size_t>(m.dims[l + 1]);
        const size_t cols = static_cast<size_t>(m.dims[l]);
        m.weights.push_back(read_vector(in, "W" + std::to_string(l), rows * cols));
        m.biases.push_back(read_vector(in, "b" + std::to_string(l), rows));
    }
    check_shapes(m);
    return m;
}

}  // namespace arb
