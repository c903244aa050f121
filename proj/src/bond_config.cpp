#include "perco/bond_config.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "perco/rng.hpp"

namespace perco {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability out of range [0,1]: " + std::to_string(p));
}

BondConfig::BondConfig(Torus torus, std::vector<std::uint64_t> words, double p, std::uint64_t seed)
    : torus_(std::move(torus)), words_(std::move(words)), p_(p), seed_(seed) {
    if (words_.size() != (torus_.edge_count() + 63) / 64) throw std::invalid_argument("bit vector length does not match edge count");
}

BondConfig BondConfig::sample(const Torus& torus, double p, std::uint64_t seed) {
    check_probability(p);
    const std::uint64_t n = torus.edge_count();
    std::vector<std::uint64_t> words((n + 63) / 64, 0);
    if (p >= 1.0) {
        for (auto& w : words) w = ~std::uint64_t{0};
        if (n % 64) words.back() = (std::uint64_t{1} << (n % 64)) - 1;
    } else if (p > 0.0) {
        for (std::uint64_t e = 0; e < n; ++e)
            if (bernoulli_at(seed, e, p)) words[e >> 6] |= std::uint64_t{1} << (e & 63);
    }
    return BondConfig(torus, std::move(words), p, seed);
}

BondConfig BondConfig::from_open_edges(const Torus& torus, std::span<const EdgeId> open) {
    std::vector<std::uint64_t> words((torus.edge_count() + 63) / 64, 0);
    BondConfig cfg(torus, std::move(words), std::nan(""), 0);
    for (EdgeId e : open) {
        torus.check_edge(e);
        cfg.set_open(e, true);
    }
    return cfg;
}

std::uint64_t BondConfig::open_count() const {
    std::uint64_t total = 0;
    for (auto w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
    return total;
}

std::vector<EdgeId> BondConfig::open_edges() const {
    std::vector<EdgeId> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        std::uint64_t w = words_[i];
        while (w) {
            out.push_back(i * 64 + static_cast<std::uint64_t>(std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

void BondConfig::set_open(EdgeId e, bool open) {
    const std::uint64_t bit = std::uint64_t{1} << (e & 63);
    if (open)
        words_[e >> 6] |= bit;
    else
        words_[e >> 6] &= ~bit;
}

void BondConfig::instrument(bool on) {
    instrumented_ = on;
    if (on)
        reads_.assign(torus_.edge_count(), 0);
    else
        reads_.clear();
}

void BondConfig::clear_read_log() {
    if (instrumented_) std::fill(reads_.begin(), reads_.end(), 0u);
}

}  // namespace perco
