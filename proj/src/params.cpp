#include "rignn/params.hpp"

#include <cmath>
#include <stdexcept>

#include "rignn/serialize.hpp"

namespace rignn::model {
namespace {
constexpr char kCkptMagic[4] = {'R', 'I', 'G', 'C'};
constexpr std::uint32_t kCkptVersion = 1;
}  // namespace

Variant variant_from_string(const std::string& s) {
    if (s == "full") return Variant::full;
    if (s == "no-ril") return Variant::no_ril;
    if (s == "no-topic") return Variant::no_topic;
    if (s == "no-review") return Variant::no_review;
    throw std::invalid_argument("unknown variant: " + s);
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::no_ril: return "no-ril";
        case Variant::no_topic: return "no-topic";
        case Variant::no_review: return "no-review";
    }
    return "?";
}

void ModelConfig::validate() const {
    if (d == 0 || d_w == 0 || heads == 0 || d_head == 0)
        throw std::invalid_argument("model dims must be positive");
    if (k < 1 || k > 6) throw std::invalid_argument("k must be in [1, 6]");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0)
        throw std::invalid_argument("dropout must be in [0, 1)");
    if (n_max == 0) throw std::invalid_argument("n_max must be positive");
}

ParameterSet::ParameterSet(const ModelConfig& cfg, std::size_t num_items,
                           std::size_t vocab_size, Rng& rng) {
    cfg.validate();
    const double sd = 1.0 / std::sqrt(static_cast<double>(cfg.d));
    const double sw = 1.0 / std::sqrt(static_cast<double>(cfg.d_w));
    auto uniform = [&](std::vector<std::size_t> shape, double s) {
        Array a(std::move(shape));
        a.fill_uniform(rng, -s, s);
        return a;
    };

    add("item_emb", uniform({num_items, cfg.d}, sd));
    add("word_emb", uniform({std::max<std::size_t>(vocab_size, 1), cfg.d_w}, sw));
    add("H", uniform({cfg.d, 2 * cfg.d}, sd));
    add("W_z", uniform({cfg.d, 2 * cfg.d}, sd));
    add("W_r", uniform({cfg.d, 2 * cfg.d}, sd));
    add("W_o", uniform({cfg.d, 2 * cfg.d}, sd));
    add("U_z", uniform({cfg.d, cfg.d}, sd));
    add("U_r", uniform({cfg.d, cfg.d}, sd));
    add("U_o", uniform({cfg.d, cfg.d}, sd));
    add("b_1", uniform({1, 2 * cfg.d}, sd));
    for (std::size_t h = 0; h < cfg.heads; ++h) {
        const std::string tag = std::to_string(h);
        add("att_q_" + tag, uniform({cfg.d_w, cfg.d_head}, sw));
        add("att_k_" + tag, uniform({cfg.d_w, cfg.d_head}, sw));
        add("att_v_" + tag, uniform({cfg.d_w, cfg.d_head}, sw));
    }
    add("W_1", uniform({cfg.heads * cfg.d_head, cfg.d_w}, sw));
    for (std::size_t l = 1; l <= cfg.k; ++l)
        add("stack_proj_" + std::to_string(l), uniform({l * cfg.d, cfg.d}, sd));
    add("stack_proj_out", uniform({(cfg.k + 1) * cfg.d, cfg.d}, sd));
    add("P", uniform({cfg.n_max, cfg.d}, sd));
    add("W_2", uniform({cfg.d, 2 * cfg.d}, sd));
    add("b_2", uniform({1, cfg.d}, sd));
    add("W_3", uniform({cfg.d, cfg.d}, sd));
    add("W_4", uniform({cfg.d, cfg.d}, sd));
    add("b_3", uniform({1, cfg.d}, sd));
    add("q", uniform({1, cfg.d}, sd));
}

void ParameterSet::add(const std::string& name, Array a) {
    names_.push_back(name);
    grads_.emplace_back(a.shape);
    values_.push_back(std::move(a));
}

std::size_t ParameterSet::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw std::out_of_range("no parameter named " + name);
}

Array& ParameterSet::value(const std::string& name) { return values_[index_of(name)]; }
const Array& ParameterSet::value(const std::string& name) const {
    return values_[index_of(name)];
}
Array& ParameterSet::grad(const std::string& name) { return grads_[index_of(name)]; }
const Array& ParameterSet::grad(const std::string& name) const {
    return grads_[index_of(name)];
}

void ParameterSet::zero_grads() {
    for (auto& g : grads_) g.fill(0.0);
}

void ParameterSet::save(const std::string& path) const {
    io::Writer w(path);
    w.magic(kCkptMagic, kCkptVersion);
    w.u64(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        w.str(names_[i]);
        w.array(values_[i]);
    }
}

ParameterSet ParameterSet::load(const std::string& path) {
    io::Reader r(path);
    if (r.magic(kCkptMagic) != kCkptVersion)
        throw std::runtime_error("unsupported checkpoint version");
    ParameterSet ps;
    const std::size_t n = r.u64();
    for (std::size_t i = 0; i < n; ++i) {
        std::string name = r.str();
        ps.add(name, r.array());
    }
    return ps;
}

}  // namespace rignn::model
