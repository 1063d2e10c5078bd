#include "quadsky/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace quadsky::eval {

namespace {

std::string digits_of(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (std::isdigit(c)) out.push_back(static_cast<char>(c));
    }
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace

std::optional<std::string> normalize_phone(std::string_view raw, std::string_view country_code) {
    std::string_view trimmed = raw;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
        trimmed.remove_prefix(1);
    }
    const bool plus_form = starts_with(trimmed, "+");
    std::string digits = digits_of(trimmed);
    if (digits.empty()) return std::nullopt;

    const std::string zz = std::string("00") + std::string(country_code);
    if (starts_with(digits, zz)) {
        digits.erase(0, zz.size());
    } else if (plus_form && starts_with(digits, country_code)) {
        digits.erase(0, country_code.size());
    }
    if (digits.empty()) return std::nullopt;
    return digits;
}

std::optional<std::string> normalize_website(std::string_view raw) {
    std::string s;
    s.reserve(raw.size());
    for (unsigned char c : raw) {
        if (!std::isspace(c)) s.push_back(static_cast<char>(std::tolower(c)));
    }
    if (const auto scheme = s.find("://"); scheme != std::string::npos) {
        s.erase(0, scheme + 3);
    }
    if (starts_with(s, "www.")) s.erase(0, 4);
    if (const auto cut = s.find_first_of("?#"); cut != std::string::npos) {
        s.erase(cut);
    }
    while (!s.empty() && s.back() == '/') s.pop_back();
    if (s.empty()) return std::nullopt;
    return s;
}

bool auto_label(const SpatialEntity& a, const SpatialEntity& b, std::string_view country_code) {
    if (a.phone && b.phone) {
        const auto pa = normalize_phone(*a.phone, country_code);
        const auto pb = normalize_phone(*b.phone, country_code);
        if (pa && pb && *pa == *pb) return true;
    }
    if (a.website && b.website) {
        const auto wa = normalize_website(*a.website);
        const auto wb = normalize_website(*b.website);
        if (wa && wb && *wa == *wb) return true;
    }
    return false;
}

void TruthOverrides::set(const EntityId& left, const EntityId& right, bool label) {
    if (left == right) throw std::invalid_argument("self-pair in label overrides");
    auto key = left < right ? std::make_pair(left, right) : std::make_pair(right, left);
    labels_[std::move(key)] = label;
}

std::optional<bool> TruthOverrides::lookup(const EntityId& left, const EntityId& right) const {
    auto key = left < right ? std::make_pair(left, right) : std::make_pair(right, left);
    auto it = labels_.find(key);
    if (it == labels_.end()) return std::nullopt;
    return it->second;
}

std::string Report::summary_line() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "tp=%zu fp=%zu fn=%zu tn=%zu precision=%.4f recall=%.4f f1=%.4f", tp, fp, fn,
                  tn, metrics.precision, metrics.recall, metrics.f1);
    return buf;
}

Report evaluate(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth,
                std::size_t unresolved_truth) {
    if (predicted.size() != truth.size()) {
        throw std::invalid_argument("prediction and truth sizes differ");
    }
    Report r;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] && truth[i]) ++r.tp;
        else if (predicted[i] && !truth[i]) ++r.fp;
        else if (!predicted[i] && truth[i]) ++r.fn;
        else ++r.tn;
    }
    r.unresolved_fn = unresolved_truth;
    r.fn += unresolved_truth;
    r.metrics = skyex::compute_metrics(r.tp, r.fp, r.fn);
    return r;
}

Report evaluate(const ClassificationResult& result, std::span<const std::uint8_t> truth,
                std::size_t unresolved_truth) {
    std::vector<std::uint8_t> predicted(truth.size(), 0);
    for (std::size_t idx : result.positives) predicted.at(idx) = 1;
    Report r = evaluate(predicted, truth, unresolved_truth);
    r.series = result.metric_series;
    return r;
}

}  // namespace quadsky::eval
