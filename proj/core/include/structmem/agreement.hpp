#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace structmem {

struct PearsonResult {
    std::optional<double> r;
    std::optional<double> p_value;  // two-sided
};

struct PairwiseAgreement {
    std::string judge_a;
    std::string judge_b;
    std::optional<double> cohen_kappa;  // nullopt when marginals are degenerate
    std::optional<double> pearson_r;
    std::optional<double> p_value;
    std::string note;

    bool operator==(const PairwiseAgreement&) const = default;
};

struct AgreementReport {
    std::vector<PairwiseAgreement> pairs;
    std::optional<double> fleiss_kappa;
    std::size_t questions = 0;

    nlohmann::json to_json() const;
    static AgreementReport from_json(const nlohmann::json& j);
    bool operator==(const AgreementReport&) const = default;
};

/// (p_o - p_e) / (1 - p_e) on two aligned binary verdict vectors. Nullopt
/// when chance agreement is 1 (both marginals degenerate).
std::optional<double> cohen_kappa(std::span<const int> a, std::span<const int> b);

/// Fleiss' kappa over an n-subjects x k-categories count matrix with a
/// constant rater count per subject.
std::optional<double> fleiss_kappa(const std::vector<std::vector<int>>& counts);

/// Pearson correlation on binary vectors with a two-sided p-value from the
/// t distribution. r is nullopt when either vector has zero variance.
PearsonResult pearson_binary(std::span<const int> a, std::span<const int> b);

/// Pairwise Cohen's kappa and Pearson r for every judge pair, plus overall
/// Fleiss' kappa over the two verdict categories. Inputs are aligned
/// per-question binary verdicts (1 = correct), one vector per judge.
AgreementReport agreement_stats(
    const std::vector<std::pair<std::string, std::vector<int>>>& judge_verdicts);

}  // namespace structmem
