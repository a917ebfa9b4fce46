#include "pseudo/labels.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "pseudo/error.hpp"

namespace pseudo {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<TokenLabelSequence> load_sequences_jsonl(
    std::istream& in, const std::string& origin) {
    std::vector<TokenLabelSequence> seqs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        TokenLabelSequence seq;
        try {
            json j = json::parse(line);
            seq.doc_id = j.at("doc_id").get<std::string>();
            for (const json& t : j.at("tokens")) {
                LabeledToken tok;
                tok.text = t.at("t").get<std::string>();
                tok.gold = t.at("gold").get<std::string>();
                if (t.contains("pred"))
                    tok.pred = t.at("pred").get<std::string>();
                seq.tokens.push_back(std::move(tok));
            }
        } catch (const json::exception& e) {
            fail(origin, ":", line_no, ": bad sequence record: ", e.what());
        }
        bool first_has_pred = seq.has_preds();
        for (const LabeledToken& tok : seq.tokens) {
            if (tok.pred.has_value() != first_has_pred)
                fail(origin, ":", line_no, ": document '", seq.doc_id,
                     "' mixes tokens with and without predictions");
        }
        seqs.push_back(std::move(seq));
    }
    return seqs;
}

std::string sequence_to_json_line(const TokenLabelSequence& seq) {
    json tokens = json::array();
    for (const LabeledToken& tok : seq.tokens) {
        json t = {{"t", tok.text}, {"gold", tok.gold}};
        if (tok.pred)
            t["pred"] = *tok.pred;
        tokens.push_back(std::move(t));
    }
    json j = {{"doc_id", seq.doc_id}, {"tokens", tokens}};
    return j.dump();
}

LabelMap LabelMap::parse(std::string_view text, const std::string& origin) {
    LabelMap map;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = eol == std::string_view::npos
                                    ? text.substr(pos)
                                    : text.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#')
            continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos)
            fail(origin, ":", line_no, ": expected source<TAB>target");
        std::string source(trim(line.substr(0, tab)));
        std::string target(trim(line.substr(tab + 1)));
        if (source.empty() || target.empty())
            fail(origin, ":", line_no, ": empty label");
        if (map.entries_.count(source))
            fail(origin, ":", line_no, ": duplicate source label '", source,
                 "'");
        map.entries_.emplace(std::move(source), std::move(target));
    }
    auto o = map.entries_.find("O");
    if (o == map.entries_.end() || o->second != "O")
        fail(origin, ": label map must contain the O\tO passthrough row");
    return map;
}

LabelMap LabelMap::load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail("cannot open label map: ", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::string LabelMap::serialize() const {
    std::string out;
    for (const auto& [source, target] : entries_) {
        out += source;
        out += '\t';
        out += target;
        out += '\n';
    }
    return out;
}

const std::string& LabelMap::target_for(const std::string& source) const {
    auto it = entries_.find(source);
    if (it == entries_.end())
        fail("label '", source, "' is not covered by the label map");
    return it->second;
}

bool LabelMap::covers(const std::string& source) const {
    return entries_.count(source) != 0;
}

std::size_t LabelMap::source_label_count() const {
    return entries_.size() - entries_.count("O");
}

LabelMap default_label_map() {
    return LabelMap::parse(default_label_map_text(), "<default label map>");
}

void remap_sequences(std::vector<TokenLabelSequence>& seqs,
                     const LabelMap& map) {
    for (TokenLabelSequence& seq : seqs) {
        for (LabeledToken& tok : seq.tokens) {
            tok.gold = map.target_for(tok.gold);
            if (tok.pred)
                tok.pred = map.target_for(*tok.pred);
        }
    }
}

}  // namespace pseudo
