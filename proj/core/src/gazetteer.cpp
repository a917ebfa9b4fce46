#include "pseudo/gazetteer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "pseudo/error.hpp"

namespace pseudo {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        std::size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

double parse_weight(std::string_view s, const std::string& origin,
                    std::size_t line_no) {
    // std::from_chars<double> is incomplete on some libstdc++ versions.
    std::string buf(s);
    char* end = nullptr;
    double w = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || buf.empty())
        fail(origin, ":", line_no, ": bad weight '", s, "'");
    if (!(w > 0.0) || !std::isfinite(w))
        fail(origin, ":", line_no, ": weight must be > 0, got '", s, "'");
    return w;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail("cannot open ", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

AttrFilter AttrFilter::parse(std::string_view text) {
    AttrFilter f;
    if (trim(text).empty())
        return f;
    for (std::string_view part : split(text, ',')) {
        part = trim(part);
        if (part.empty())
            continue;
        std::size_t eq = part.find('=');
        if (eq == std::string_view::npos || eq == 0)
            fail("bad attribute filter '", part, "' (expected key=value)");
        f.add(std::string(trim(part.substr(0, eq))),
              std::string(trim(part.substr(eq + 1))));
    }
    return f;
}

void AttrFilter::add(std::string key, std::string value) {
    equals_.emplace_back(std::move(key), std::move(value));
    std::sort(equals_.begin(), equals_.end());
    key_.clear();
    for (const auto& [k, v] : equals_) {
        if (!key_.empty())
            key_ += ';';
        key_ += k;
        key_ += '=';
        key_ += v;
    }
}

bool AttrFilter::matches(const GazetteerEntry& e) const {
    for (const auto& [k, v] : equals_) {
        auto it = e.attrs.find(k);
        if (it == e.attrs.end() || it->second != v)
            return false;
    }
    return true;
}

std::vector<GazetteerEntry> PseudoDatabase::parse_list(
    std::string_view text, const std::string& origin) {
    std::vector<GazetteerEntry> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = eol == std::string_view::npos
                                    ? text.substr(pos)
                                    : text.substr(pos, eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (trim(line).empty() || line.front() == '#')
            continue;

        std::vector<std::string_view> fields = split(line, '\t');
        if (line_no == 1 && fields.size() >= 2 && fields[0] == "surface" &&
            fields[1] == "weight")
            continue;  // optional header
        if (fields.size() < 2)
            fail(origin, ":", line_no,
                 ": expected surface<TAB>weight[<TAB>attr=value ...]");

        GazetteerEntry e;
        e.surface.assign(trim(fields[0]));
        if (e.surface.empty())
            fail(origin, ":", line_no, ": empty surface");
        e.weight = parse_weight(trim(fields[1]), origin, line_no);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            std::string_view f = trim(fields[i]);
            if (f.empty())
                continue;
            std::size_t eq = f.find('=');
            if (eq == std::string_view::npos || eq == 0)
                fail(origin, ":", line_no, ": bad attribute '", f,
                     "' (expected key=value)");
            e.attrs[std::string(f.substr(0, eq))] =
                std::string(f.substr(eq + 1));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string PseudoDatabase::serialize_list(
    const std::vector<GazetteerEntry>& entries) {
    std::string out = "surface\tweight\n";
    std::ostringstream row;
    row.precision(17);  // doubles must round-trip
    for (const GazetteerEntry& e : entries) {
        row.str("");
        row << e.surface << '\t' << e.weight;
        for (const auto& [k, v] : e.attrs)
            row << '\t' << k << '=' << v;
        row << '\n';
        out += row.str();
    }
    return out;
}

void PseudoDatabase::add_list(const std::string& name,
                              std::vector<GazetteerEntry> entries) {
    if (lists_.count(name))
        fail("duplicate list '", name, "'");
    if (entries.empty())
        fail("list '", name, "' is empty");
    List list;
    list.cumulative.reserve(entries.size());
    for (const GazetteerEntry& e : entries) {
        if (e.surface.empty() || !(e.weight > 0.0))
            fail("list '", name, "': invalid entry '", e.surface, "'");
        list.total += e.weight;
        list.cumulative.push_back(list.total);
    }
    list.entries = std::move(entries);
    lists_.emplace(name, std::move(list));
}

PseudoDatabase PseudoDatabase::load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        fail("pseudo database directory not found: ", dir.string());
    PseudoDatabase db;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tsv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        auto entries = parse_list(read_file(path), path.string());
        if (entries.empty())
            fail(path.string(), ": list file has no entries");
        db.add_list(path.stem().string(), std::move(entries));
    }
    if (db.lists_.empty())
        fail("no .tsv list files in ", dir.string());
    return db;
}

bool PseudoDatabase::has_list(const std::string& name) const {
    return lists_.count(name) != 0;
}

const std::vector<GazetteerEntry>& PseudoDatabase::list(
    const std::string& name) const {
    return find_list(name).entries;
}

std::vector<std::string> PseudoDatabase::list_names() const {
    std::vector<std::string> names;
    names.reserve(lists_.size());
    for (const auto& [name, _] : lists_)
        names.push_back(name);
    return names;
}

std::map<std::string, std::size_t> PseudoDatabase::counts() const {
    std::map<std::string, std::size_t> out;
    for (const auto& [name, list] : lists_)
        out[name] = list.entries.size();
    return out;
}

const PseudoDatabase::List& PseudoDatabase::find_list(
    const std::string& name) const {
    auto it = lists_.find(name);
    if (it == lists_.end())
        fail("unknown list '", name, "'");
    return it->second;
}

const PseudoDatabase::FilteredIndex& PseudoDatabase::filtered_index(
    const std::string& list_name, const List& list,
    const AttrFilter& filter) const {
    std::string cache_key = list_name + '\x1f' + filter.key();
    {
        std::shared_lock lock(cache_->mutex);
        auto it = cache_->map.find(cache_key);
        if (it != cache_->map.end())
            return *it->second;
    }
    auto idx = std::make_unique<FilteredIndex>();
    for (std::uint32_t i = 0; i < list.entries.size(); ++i) {
        if (filter.matches(list.entries[i])) {
            idx->total += list.entries[i].weight;
            idx->indices.push_back(i);
            idx->cumulative.push_back(idx->total);
        }
    }
    std::unique_lock lock(cache_->mutex);
    auto [it, _] = cache_->map.emplace(cache_key, std::move(idx));
    return *it->second;
}

const GazetteerEntry& PseudoDatabase::sample(const std::string& list_name,
                                             RandomStream& rng) const {
    static const AttrFilter kNoFilter;
    return sample(list_name, kNoFilter, rng);
}

const GazetteerEntry& PseudoDatabase::sample(const std::string& list_name,
                                             const AttrFilter& filter,
                                             RandomStream& rng) const {
    const List& list = find_list(list_name);
    if (filter.empty()) {
        double u = rng.next_double() * list.total;
        auto it = std::upper_bound(list.cumulative.begin(),
                                   list.cumulative.end(), u);
        std::size_t i = it == list.cumulative.end()
                            ? list.entries.size() - 1
                            : static_cast<std::size_t>(
                                  it - list.cumulative.begin());
        return list.entries[i];
    }
    const FilteredIndex& idx = filtered_index(list_name, list, filter);
    if (idx.indices.empty())
        fail("list '", list_name, "': no entry matches filter '",
             filter.key(), "'");
    double u = rng.next_double() * idx.total;
    auto it =
        std::upper_bound(idx.cumulative.begin(), idx.cumulative.end(), u);
    std::size_t i =
        it == idx.cumulative.end()
            ? idx.indices.size() - 1
            : static_cast<std::size_t>(it - idx.cumulative.begin());
    return list.entries[idx.indices[i]];
}

IngestStats ingest_census_names(const std::filesystem::path& input_dir,
                                const std::filesystem::path& output_dir,
                                int year_lo, int year_hi) {
    if (!std::filesystem::is_directory(input_dir))
        fail("raw names directory not found: ", input_dir.string());
    if (year_lo > year_hi)
        fail("bad year range [", year_lo, ", ", year_hi, "]");

    IngestStats stats;
    stats.year_lo = year_lo;
    stats.year_hi = year_hi;

    // (surface, gender) -> summed count over the year range.
    std::map<std::pair<std::string, std::string>, double> weights;

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(input_dir)) {
        if (!entry.is_regular_file())
            continue;
        std::string name = entry.path().filename().string();
        if (name.starts_with("yob") && name.ends_with(".txt"))
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        fail("no yob<YEAR>.txt files in ", input_dir.string());

    for (const auto& path : files) {
        std::string name = path.filename().string();
        std::string_view year_text =
            std::string_view(name).substr(3, name.size() - 7);
        int year = 0;
        auto [p, ec] = std::from_chars(
            year_text.data(), year_text.data() + year_text.size(), year);
        if (ec != std::errc() || p != year_text.data() + year_text.size())
            fail(path.string(), ": cannot parse year from filename");
        ++stats.files_read;
        if (year < year_lo || year > year_hi)
            continue;

        std::string text = read_file(path);
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            std::string_view line =
                eol == std::string::npos
                    ? std::string_view(text).substr(pos)
                    : std::string_view(text).substr(pos, eol - pos);
            pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
            ++line_no;
            line = trim(line);
            if (line.empty())
                continue;
            std::vector<std::string_view> fields = split(line, ',');
            if (fields.size() != 3)
                fail(path.string(), ":", line_no,
                     ": expected name,gender,count");
            std::string_view gender = trim(fields[1]);
            if (gender != "F" && gender != "M")
                fail(path.string(), ":", line_no, ": bad gender '", gender,
                     "'");
            std::uint64_t count = 0;
            std::string_view count_text = trim(fields[2]);
            auto [cp, cec] =
                std::from_chars(count_text.data(),
                                count_text.data() + count_text.size(), count);
            if (cec != std::errc() ||
                cp != count_text.data() + count_text.size())
                fail(path.string(), ":", line_no, ": bad count '", count_text,
                     "'");
            ++stats.rows_read;
            if (count == 0)
                continue;
            weights[{std::string(trim(fields[0])), std::string(gender)}] +=
                static_cast<double>(count);
        }
    }

    std::vector<GazetteerEntry> entries;
    entries.reserve(weights.size());
    for (const auto& [key, weight] : weights) {
        GazetteerEntry e;
        e.surface = key.first;
        e.weight = weight;
        e.attrs["gender"] = key.second;
        entries.push_back(std::move(e));
    }
    stats.names_out = entries.size();

    std::filesystem::create_directories(output_dir);
    std::filesystem::path out_path = output_dir / "first_names.tsv";
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        fail("cannot write ", out_path.string());
    out << PseudoDatabase::serialize_list(entries);
    return stats;
}

}  // namespace pseudo
