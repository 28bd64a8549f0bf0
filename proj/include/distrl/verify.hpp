#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distrl/theory.hpp"

namespace distrl {

struct VerifyOptions {
    std::string suite = "all";   // all | lemma1 | lemma2 | theorem1
    std::uint64_t seed = 0;
    double slack_override = -1.0;  // >= 0 replaces the Monte-Carlo slack
    int lemma1_count = 100;
    int lemma1_m = 4000;
    int lemma2_count = 50;
    int theorem1_m = 4000;
};

std::vector<Certificate> run_lemma1_suite(std::uint64_t seed, int count, int m,
                                          double slack_override = -1.0);
std::vector<Certificate> run_lemma2_suite(std::uint64_t seed, int count);
// Latent chain encoder/decoder with two perturbed kernels, plus an
// identity-autoencoder instance that reduces to the one-step contraction.
std::vector<Certificate> run_theorem1_suite(std::uint64_t seed, int m,
                                            double slack_override = -1.0);

std::vector<Certificate> run_verify(const VerifyOptions& opts);

std::string certificates_json(const std::string& suite, std::uint64_t seed,
                              const std::vector<Certificate>& certs);

}  // namespace distrl
