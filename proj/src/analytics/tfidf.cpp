#include "hallucheck/analytics.hpp"
#include "hallucheck/error.hpp"
#include "hallucheck/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace hallucheck {

namespace {

std::vector<std::string> tokens(const std::string& title)
{
    std::vector<std::string> out;
    std::istringstream in(normalize_title(title).text);
    std::string t;
    while (in >> t) {
        out.push_back(t);
    }
    return out;
}

struct Group {
    std::map<std::string, double> tf;
    std::vector<std::set<std::string>> docs;
};

Group tokenize_group(const std::vector<std::string>& titles)
{
    Group g;
    for (const std::string& title : titles) {
        std::set<std::string> doc;
        for (std::string& t : tokens(title)) {
            g.tf[t] += 1.0;
            doc.insert(std::move(t));
        }
        g.docs.push_back(std::move(doc));
    }
    return g;
}

std::map<std::string, double> weights(const Group& g, const std::map<std::string, double>& idf)
{
    std::map<std::string, double> w;
    double norm = 0.0;
    for (const auto& [term, tf] : g.tf) {
        double v = tf * idf.at(term);
        w[term] = v;
        norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (auto& [term, v] : w) {
            v /= norm;
        }
    }
    return w;
}

} // namespace

std::vector<TermWeightDiff> tfidf_diff(const std::vector<std::string>& titles_a, const std::vector<std::string>& titles_b,
                                       std::size_t top_k)
{
    if (titles_a.empty() || titles_b.empty()) {
        throw Error(ErrorCode::EmptyCorpus, "TF-IDF comparison needs titles in both groups");
    }
    Group a = tokenize_group(titles_a);
    Group b = tokenize_group(titles_b);

    std::map<std::string, std::size_t> df;
    for (const Group* g : {&a, &b}) {
        for (const auto& doc : g->docs) {
            for (const std::string& t : doc) {
                ++df[t];
            }
        }
    }
    auto n = static_cast<double>(titles_a.size() + titles_b.size());
    std::map<std::string, double> idf;
    for (const auto& [term, count] : df) {
        idf[term] = std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0;
    }

    auto wa = weights(a, idf);
    auto wb = weights(b, idf);
    std::vector<TermWeightDiff> out;
    for (const auto& [term, count] : df) {
        TermWeightDiff d;
        d.term = term;
        if (auto it = wa.find(term); it != wa.end()) {
            d.weight_a = it->second;
        }
        if (auto it = wb.find(term); it != wb.end()) {
            d.weight_b = it->second;
        }
        d.diff = d.weight_a - d.weight_b;
        out.push_back(std::move(d));
    }
    std::sort(out.begin(), out.end(), [](const TermWeightDiff& x, const TermWeightDiff& y) {
        double ax = std::abs(x.diff);
        double ay = std::abs(y.diff);
        if (ax != ay) {
            return ax > ay;
        }
        return x.term < y.term;
    });
    if (top_k > 0 && out.size() > top_k) {
        out.resize(top_k);
    }
    return out;
}

} // namespace hallucheck
