#include "pseudo/overlap.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pseudo/error.hpp"

namespace pseudo {

std::string overlap_normalize(std::string_view surface,
                              const std::vector<std::string>& strip_words) {
    std::string lower;
    lower.reserve(surface.size());
    for (char c : surface)
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    std::istringstream words(lower);
    std::string word;
    std::string out;
    while (words >> word) {
        if (std::find(strip_words.begin(), strip_words.end(), word) !=
            strip_words.end())
            continue;
        if (!out.empty())
            out += ' ';
        out += word;
    }
    return out;
}

OverlapResult gazetteer_overlap(const std::vector<std::string>& corpus,
                                const std::vector<GazetteerEntry>& db_list,
                                const std::vector<std::string>& strip_words) {
    if (corpus.empty())
        fail("gazetteer_overlap: corpus surface set is empty");
    if (db_list.empty())
        fail("gazetteer_overlap: gazetteer list is empty");

    std::vector<std::string> strip_lower;
    for (const std::string& w : strip_words) {
        std::string lower = w;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        strip_lower.push_back(std::move(lower));
    }

    std::set<std::string> corpus_set;
    for (const std::string& surface : corpus) {
        std::string norm = overlap_normalize(surface, strip_lower);
        if (!norm.empty())
            corpus_set.insert(std::move(norm));
    }
    std::set<std::string> db_set;
    for (const GazetteerEntry& e : db_list) {
        std::string norm = overlap_normalize(e.surface, strip_lower);
        if (!norm.empty())
            db_set.insert(std::move(norm));
    }

    OverlapResult result;
    result.corpus_size = corpus_set.size();
    for (const std::string& s : corpus_set) {
        if (db_set.count(s))
            result.shared_surfaces.push_back(s);
    }
    result.shared = result.shared_surfaces.size();
    result.fraction = result.corpus_size == 0
                          ? 0.0
                          : static_cast<double>(result.shared) /
                                static_cast<double>(result.corpus_size);
    return result;
}

std::string OverlapResult::to_json() const {
    nlohmann::json j = {{"shared", shared},
                        {"corpus_size", corpus_size},
                        {"fraction", fraction},
                        {"shared_surfaces", shared_surfaces}};
    return j.dump(2);
}

}  // namespace pseudo
