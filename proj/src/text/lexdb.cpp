#include "mwv/text/lexdb.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "mwv/error.hpp"
#include "mwv/util.hpp"

namespace mwv::text {

namespace {

const std::vector<std::string> kEmpty;

std::string index_key(std::string_view lemma, char category) {
    std::string key(lemma);
    key += '\x1f';
    key += category;
    return key;
}

bool valid_category(char c) { return c == 'n' || c == 'v' || c == 'a' || c == 'r'; }

std::string clean_lemma(std::string_view raw) {
    std::string s = to_lower_ascii(trim(raw));
    std::replace(s.begin(), s.end(), '_', ' ');
    return s;
}

}  // namespace

void LexicalDatabase::add_synset(Synset synset) {
    if (synset.id.empty() || !valid_category(synset.category)) {
        throw Error(ErrorCode::ParseError, "invalid synset '" + synset.id + "'");
    }
    for (auto& l : synset.lemmas) {
        l = clean_lemma(l);
        auto& ids = lemma_index_[index_key(l, synset.category)];
        if (std::find(ids.begin(), ids.end(), synset.id) == ids.end()) ids.push_back(synset.id);
    }
    std::string id = synset.id;
    synsets_.insert_or_assign(std::move(id), std::move(synset));
}

void LexicalDatabase::add_hypernym(const std::string& child, const std::string& parent) {
    auto& ps = parents_[child];
    if (std::find(ps.begin(), ps.end(), parent) != ps.end()) return;
    ps.push_back(parent);
    neighbours_[child].push_back(parent);
    neighbours_[parent].push_back(child);
}

void LexicalDatabase::validate() const {
    for (const auto& [child, ps] : parents_) {
        if (!synsets_.count(child)) throw Error(ErrorCode::ParseError, "hypernym edge from unknown synset " + child);
        for (const auto& p : ps) {
            if (!synsets_.count(p)) throw Error(ErrorCode::ParseError, "hypernym edge to unknown synset " + p);
        }
    }
    // Iterative three-colour DFS over parent edges.
    enum class Mark { White, Grey, Black };
    std::unordered_map<std::string, Mark> mark;
    for (const auto& [id, _] : synsets_) {
        if (mark[id] != Mark::White) continue;
        std::vector<std::pair<std::string, std::size_t>> stack{{id, 0}};
        mark[id] = Mark::Grey;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            const auto& ps = hypernyms_of(node);
            if (next < ps.size()) {
                const std::string parent = ps[next++];
                const Mark m = mark[parent];
                if (m == Mark::Grey) throw Error(ErrorCode::ParseError, "hypernym cycle through " + parent);
                if (m == Mark::White) {
                    mark[parent] = Mark::Grey;
                    stack.emplace_back(parent, 0);
                }
            } else {
                mark[node] = Mark::Black;
                stack.pop_back();
            }
        }
    }
}

const Synset* LexicalDatabase::find(std::string_view id) const {
    auto it = synsets_.find(id);
    return it == synsets_.end() ? nullptr : &it->second;
}

const std::vector<std::string>& LexicalDatabase::synsets_for(std::string_view lemma, char category) const {
    auto it = lemma_index_.find(index_key(lemma, category));
    return it == lemma_index_.end() ? kEmpty : it->second;
}

const std::vector<std::string>& LexicalDatabase::hypernyms_of(std::string_view id) const {
    auto it = parents_.find(std::string(id));
    return it == parents_.end() ? kEmpty : it->second;
}

std::vector<std::string> LexicalDatabase::ids() const {
    std::vector<std::string> out;
    out.reserve(synsets_.size());
    for (const auto& [id, _] : synsets_) out.push_back(id);
    return out;
}

std::optional<std::size_t> LexicalDatabase::path_length(std::string_view a, std::string_view b) const {
    const Synset* sa = find(a);
    const Synset* sb = find(b);
    if (!sa) throw Error(ErrorCode::NotFound, "unknown synset " + std::string(a));
    if (!sb) throw Error(ErrorCode::NotFound, "unknown synset " + std::string(b));
    if (sa->category != sb->category) {
        throw Error(ErrorCode::CategoryMismatch, std::string(a) + " vs " + std::string(b));
    }
    if (a == b) return 0;

    std::unordered_map<std::string, std::size_t> dist{{std::string(a), 0}};
    std::deque<std::string> queue{std::string(a)};
    while (!queue.empty()) {
        const std::string node = std::move(queue.front());
        queue.pop_front();
        const std::size_t d = dist[node];
        auto it = neighbours_.find(node);
        if (it == neighbours_.end()) continue;
        for (const auto& next : it->second) {
            if (dist.count(next)) continue;
            if (next == b) return d + 1;
            dist.emplace(next, d + 1);
            queue.push_back(next);
        }
    }
    return std::nullopt;
}

std::optional<double> LexicalDatabase::path_similarity(std::string_view a, std::string_view b) const {
    const auto len = path_length(a, b);
    if (!len) return std::nullopt;
    return 1.0 / (1.0 + static_cast<double>(*len));
}

LexicalDatabase LexicalDatabase::load_tsv(std::istream& synsets, std::istream& hypernyms) {
    LexicalDatabase db;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(synsets, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line, '\t');
        if (cols.size() != 3 || cols[1].size() != 1 || !valid_category(cols[1][0])) {
            throw Error(ErrorCode::ParseError, "synsets.tsv line " + std::to_string(lineno));
        }
        Synset s{cols[0], cols[1][0], {}};
        for (const auto& l : split(cols[2], ',')) {
            if (!trim(l).empty()) s.lemmas.push_back(l);
        }
        db.add_synset(std::move(s));
    }
    lineno = 0;
    while (std::getline(hypernyms, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line, '\t');
        if (cols.size() != 2) throw Error(ErrorCode::ParseError, "hypernyms.tsv line " + std::to_string(lineno));
        db.add_hypernym(cols[0], cols[1]);
    }
    db.validate();
    return db;
}

LexicalDatabase LexicalDatabase::load_directory(const std::filesystem::path& dir) {
    std::ifstream syn(dir / "synsets.tsv");
    std::ifstream hyp(dir / "hypernyms.tsv");
    if (!syn || !hyp) throw Error(ErrorCode::IoError, "lexical database not found in " + dir.string());
    return load_tsv(syn, hyp);
}

LexicalDatabase LexicalDatabase::load_wordnet(const std::vector<std::filesystem::path>& data_files) {
    LexicalDatabase db;
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& path : data_files) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
        std::string line;
        while (std::getline(in, line)) {
            // License header lines begin with two spaces.
            if (line.empty() || line[0] == ' ') continue;
            const auto bar = line.find(" | ");
            std::istringstream fields(bar == std::string::npos ? line : line.substr(0, bar));
            std::string offset, lex_filenum, ss_type, w_cnt_hex;
            if (!(fields >> offset >> lex_filenum >> ss_type >> w_cnt_hex) || ss_type.size() != 1) {
                throw Error(ErrorCode::ParseError, "wordnet record in " + path.string());
            }
            const char category = ss_type[0] == 's' ? 'a' : ss_type[0];
            Synset s{offset + "-" + category, category, {}};
            const unsigned long w_cnt = std::stoul(w_cnt_hex, nullptr, 16);
            for (unsigned long i = 0; i < w_cnt; ++i) {
                std::string word, lex_id;
                if (!(fields >> word >> lex_id)) throw Error(ErrorCode::ParseError, "wordnet words in " + offset);
                // Adjective markers such as "(a)" trail the lemma.
                if (auto paren = word.find('('); paren != std::string::npos) word.erase(paren);
                s.lemmas.push_back(word);
            }
            std::size_t p_cnt = 0;
            if (!(fields >> p_cnt)) throw Error(ErrorCode::ParseError, "wordnet pointer count in " + offset);
            for (std::size_t i = 0; i < p_cnt; ++i) {
                std::string symbol, target, pos, source_target;
                if (!(fields >> symbol >> target >> pos >> source_target)) {
                    throw Error(ErrorCode::ParseError, "wordnet pointer in " + offset);
                }
                if (symbol == "@" || symbol == "@i") {
                    const char tcat = pos[0] == 's' ? 'a' : pos[0];
                    edges.emplace_back(s.id, target + "-" + tcat);
                }
            }
            db.add_synset(std::move(s));
        }
    }
    for (const auto& [child, parent] : edges) db.add_hypernym(child, parent);
    db.validate();
    return db;
}

}  // namespace mwv::text
