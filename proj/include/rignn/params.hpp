#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rignn/array.hpp"
#include "rignn/rng.hpp"

namespace rignn::model {

enum class Variant { full, no_ril, no_topic, no_review };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

struct ModelConfig {
    std::size_t d = 100;        // item embedding width
    std::size_t d_w = 300;      // word embedding width
    std::size_t heads = 3;
    std::size_t d_head = 100;   // d_q = d_k = d_v
    std::size_t k = 2;          // stacked graph layers, alternating AIL/RIL
    std::size_t steps = 1;      // gated propagation steps per AIL layer
    double dropout = 0.2;
    std::size_t n_max = 50;     // position table size
    std::size_t max_review_tokens = 256;
    bool ril_uses_base = false; // neighbor states from base embeddings instead of layer input
    Variant variant = Variant::full;

    void validate() const;
};

// All trainable arrays plus gradient buffers, keyed by name in a stable
// order so checkpoints and Adam state line up across runs.
class ParameterSet {
public:
    ParameterSet() = default;
    // uniform(-1/sqrt(d), 1/sqrt(d)) init, word table scaled by its own width
    ParameterSet(const ModelConfig& cfg, std::size_t num_items,
                 std::size_t vocab_size, Rng& rng);

    std::size_t count() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    Array& value(const std::string& name);
    const Array& value(const std::string& name) const;
    Array& grad(const std::string& name);
    const Array& grad(const std::string& name) const;
    Array& value_at(std::size_t i) { return values_[i]; }
    const Array& value_at(std::size_t i) const { return values_[i]; }
    Array& grad_at(std::size_t i) { return grads_[i]; }
    const std::string& name_at(std::size_t i) const { return names_[i]; }

    void zero_grads();

    void save(const std::string& path) const;
    static ParameterSet load(const std::string& path);

private:
    std::size_t index_of(const std::string& name) const;
    void add(const std::string& name, Array a);

    std::vector<std::string> names_;
    std::vector<Array> values_;
    std::vector<Array> grads_;
};

}  // namespace rignn::model
