#include "structmem/agreement.hpp"

#include "structmem/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace structmem {

namespace {

nlohmann::json optional_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

std::optional<double> optional_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::optional<double> cohen_kappa(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size() || a.empty()) {
        throw Error("cohen_kappa requires equal-length non-empty verdict vectors");
    }
    const double n = static_cast<double>(a.size());
    double agree = 0.0, a_pos = 0.0, b_pos = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) agree += 1.0;
        if (a[i]) a_pos += 1.0;
        if (b[i]) b_pos += 1.0;
    }
    const double po = agree / n;
    const double pa = a_pos / n;
    const double pb = b_pos / n;
    const double pe = pa * pb + (1.0 - pa) * (1.0 - pb);
    if (pe == 1.0) return std::nullopt;  // degenerate marginals
    return (po - pe) / (1.0 - pe);
}

std::optional<double> fleiss_kappa(const std::vector<std::vector<int>>& counts) {
    if (counts.empty() || counts.front().empty()) {
        throw Error("fleiss_kappa requires a non-empty count matrix");
    }
    const std::size_t n = counts.size();
    const std::size_t k = counts.front().size();
    int raters = 0;
    for (int c : counts.front()) raters += c;
    if (raters < 2) throw Error("fleiss_kappa requires at least two raters");

    std::vector<double> category_totals(k, 0.0);
    double p_bar = 0.0;
    for (const auto& row : counts) {
        if (row.size() != k) throw Error("fleiss_kappa rows must have equal width");
        int row_sum = 0;
        double agreements = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            row_sum += row[j];
            agreements += static_cast<double>(row[j]) * row[j];
            category_totals[j] += row[j];
        }
        if (row_sum != raters) {
            throw Error("fleiss_kappa requires a constant rater count per subject");
        }
        p_bar += (agreements - raters) / (static_cast<double>(raters) * (raters - 1));
    }
    p_bar /= static_cast<double>(n);

    double pe = 0.0;
    const double total = static_cast<double>(n) * raters;
    for (std::size_t j = 0; j < k; ++j) {
        const double pj = category_totals[j] / total;
        pe += pj * pj;
    }
    if (pe == 1.0) return std::nullopt;
    return (p_bar - pe) / (1.0 - pe);
}

PearsonResult pearson_binary(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size() || a.empty()) {
        throw Error("pearson_binary requires equal-length non-empty vectors");
    }
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;

    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) return {};  // degenerate

    PearsonResult result;
    const double r = cov / std::sqrt(var_a * var_b);
    result.r = r;
    if (a.size() < 3) return result;
    if (std::abs(r) >= 1.0) {
        result.p_value = 0.0;
        return result;
    }
    const double df = n - 2.0;
    const double t = r * std::sqrt(df / (1.0 - r * r));
    const boost::math::students_t_distribution<double> dist(df);
    result.p_value = 2.0 * boost::math::cdf(dist, -std::abs(t));
    return result;
}

AgreementReport agreement_stats(
    const std::vector<std::pair<std::string, std::vector<int>>>& judge_verdicts) {
    if (judge_verdicts.size() < 2) {
        throw Error("agreement_stats requires at least two judges");
    }
    const std::size_t n = judge_verdicts.front().second.size();
    for (const auto& [name, verdicts] : judge_verdicts) {
        if (verdicts.size() != n) {
            throw Error("judge '" + name + "' scored a different question set");
        }
    }
    if (n == 0) throw Error("agreement_stats requires at least one question");

    AgreementReport report;
    report.questions = n;
    for (std::size_t i = 0; i < judge_verdicts.size(); ++i) {
        for (std::size_t j = i + 1; j < judge_verdicts.size(); ++j) {
            PairwiseAgreement pair;
            pair.judge_a = judge_verdicts[i].first;
            pair.judge_b = judge_verdicts[j].first;
            pair.cohen_kappa =
                cohen_kappa(judge_verdicts[i].second, judge_verdicts[j].second);
            if (!pair.cohen_kappa) pair.note = "degenerate marginals; kappa undefined";
            const auto pearson =
                pearson_binary(judge_verdicts[i].second, judge_verdicts[j].second);
            pair.pearson_r = pearson.r;
            pair.p_value = pearson.p_value;
            report.pairs.push_back(std::move(pair));
        }
    }

    std::vector<std::vector<int>> counts(n, std::vector<int>(2, 0));
    for (const auto& [name, verdicts] : judge_verdicts) {
        (void)name;
        for (std::size_t q = 0; q < n; ++q) {
            ++counts[q][verdicts[q] ? 1 : 0];
        }
    }
    report.fleiss_kappa = fleiss_kappa(counts);
    return report;
}

nlohmann::json AgreementReport::to_json() const {
    nlohmann::json pairs_json = nlohmann::json::array();
    for (const auto& p : pairs) {
        pairs_json.push_back({{"judge_a", p.judge_a},
                              {"judge_b", p.judge_b},
                              {"cohen_kappa", optional_to_json(p.cohen_kappa)},
                              {"pearson_r", optional_to_json(p.pearson_r)},
                              {"p_value", optional_to_json(p.p_value)},
                              {"note", p.note}});
    }
    return nlohmann::json{{"pairs", pairs_json},
                          {"fleiss_kappa", optional_to_json(fleiss_kappa)},
                          {"questions", questions}};
}

AgreementReport AgreementReport::from_json(const nlohmann::json& j) {
    AgreementReport report;
    for (const auto& p : j.at("pairs")) {
        PairwiseAgreement pair;
        pair.judge_a = p.at("judge_a").get<std::string>();
        pair.judge_b = p.at("judge_b").get<std::string>();
        pair.cohen_kappa = optional_from_json(p.at("cohen_kappa"));
        pair.pearson_r = optional_from_json(p.at("pearson_r"));
        pair.p_value = optional_from_json(p.at("p_value"));
        pair.note = p.value("note", std::string{});
        report.pairs.push_back(std::move(pair));
    }
    report.fleiss_kappa = optional_from_json(j.at("fleiss_kappa"));
    report.questions = j.at("questions").get<std::size_t>();
    return report;
}

}  // namespace structmem
