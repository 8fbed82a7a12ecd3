#include "sncf/synth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sncf/core/error.hpp"
#include "sncf/core/rng.hpp"
#include "sncf/simd/kernels.hpp"

namespace sncf {

namespace {

CategoryScore category(std::span<const SampleVerdict> pred, std::span<const SampleVerdict> truth, VerdictKind k) {
    CategoryScore s;
    std::size_t tp = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i].kind == k;
        const bool t = truth[i].kind == k;
        s.predicted += p;
        s.actual += t;
        tp += p && t;
    }
    s.precision = s.predicted ? static_cast<double>(tp) / static_cast<double>(s.predicted) : 0.0;
    s.recall = s.actual ? static_cast<double>(tp) / static_cast<double>(s.actual) : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

}  // namespace

DetectionScore score_detection(std::span<const SampleVerdict> predicted, const GroundTruth& truth) {
    if (predicted.size() != truth.verdicts.size()) {
        throw ConfigError("score_detection: " + std::to_string(predicted.size()) + " verdicts for " +
                          std::to_string(truth.verdicts.size()) + " samples");
    }
    DetectionScore s;
    s.clean = category(predicted, truth.verdicts, VerdictKind::Clean);
    s.id_noisy = category(predicted, truth.verdicts, VerdictKind::IdNoisy);
    s.ood = category(predicted, truth.verdicts, VerdictKind::Ood);

    std::map<int, std::map<int, std::size_t>> groups;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i].kind != VerdictKind::Ood || predicted[i].ood_group == kNoGroup) continue;
        const int mode = truth.verdicts[i].kind == VerdictKind::Ood ? truth.verdicts[i].ood_group : -2;
        ++groups[predicted[i].ood_group][mode];
    }
    double purity_sum = 0.0;
    for (const auto& [group, counts] : groups) {
        std::size_t total = 0, best = 0;
        for (const auto& [mode, count] : counts) {
            total += count;
            if (mode >= 0) best = std::max(best, count);
        }
        purity_sum += static_cast<double>(best) / static_cast<double>(total);
    }
    s.ood_groups = groups.size();
    s.ood_group_purity = groups.empty() ? 0.0 : purity_sum / static_cast<double>(groups.size());
    return s;
}

double linear_probe(const FeatureMatrix& features, std::span<const std::uint8_t> is_ood, std::uint64_t seed) {
    const std::size_t n = features.n();
    const std::size_t d = features.d();
    if (is_ood.size() != n) throw ConfigError("linear_probe: label count does not match feature rows");
    const auto positives = static_cast<std::size_t>(std::count_if(is_ood.begin(), is_ood.end(), [](std::uint8_t v) { return v != 0; }));
    if (positives == 0 || positives == n) throw ConfigError("linear_probe: both classes must be present");
    constexpr double lr = 0.1;
    constexpr int steps = 500;

    Rng rng(seed);
    std::vector<double> w(d);
    for (double& v : w) v = 0.01 * rng.normal();
    double bias = 0.0;

    const auto& k = simd::kernels();
    const double* x = features.values().data();
    std::vector<double> grad(d);
    for (int step = 0; step < steps; ++step) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = k.dot(w.data(), x + i * d, d) + bias;
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double r = p - static_cast<double>(is_ood[i] != 0);
            k.axpy(r, x + i * d, grad.data(), d);
            grad_b += r;
        }
        const double scale = lr / static_cast<double>(n);
        k.axpy(-scale, grad.data(), w.data(), d);
        bias -= scale * grad_b;
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = k.dot(w.data(), x + i * d, d) + bias;
        correct += (z > 0.0) == (is_ood[i] != 0);
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace sncf
