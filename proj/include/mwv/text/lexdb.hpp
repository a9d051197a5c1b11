#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mwv::text {

struct Synset {
    std::string id;
    char category = 'n';  // n, v, a, r
    std::vector<std::string> lemmas;
};

/// Synsets plus an acyclic hypernym graph and a (lemma, category) index.
///
/// Two on-disk layouts load:
///  - a directory with synsets.tsv ("id<TAB>category<TAB>lemma,lemma,...") and
///    hypernyms.tsv ("child-id<TAB>parent-id");
///  - WordNet 3.0 data.noun / data.verb / data.adj / data.adv files; ids become
///    "<offset>-<category>", '@' and '@i' pointers become hypernym edges and satellite
///    adjectives fold into 'a'.
class LexicalDatabase {
public:
    LexicalDatabase() = default;

    static LexicalDatabase load_tsv(std::istream& synsets, std::istream& hypernyms);
    static LexicalDatabase load_directory(const std::filesystem::path& dir);
    static LexicalDatabase load_wordnet(const std::vector<std::filesystem::path>& data_files);

    void add_synset(Synset synset);
    void add_hypernym(const std::string& child, const std::string& parent);
    // Throws ParseError on dangling edges or a hypernym cycle.
    void validate() const;

    const Synset* find(std::string_view id) const;
    const std::vector<std::string>& synsets_for(std::string_view lemma, char category) const;
    const std::vector<std::string>& hypernyms_of(std::string_view id) const;
    std::size_t size() const noexcept { return synsets_.size(); }
    std::vector<std::string> ids() const;

    /// 1 / (1 + L) with L the shortest path between a and b in the undirected hypernym graph;
    /// nullopt when no path exists. NotFound for unknown ids, CategoryMismatch across categories.
    std::optional<double> path_similarity(std::string_view a, std::string_view b) const;

    /// Shortest undirected hop count, nullopt when disconnected.
    std::optional<std::size_t> path_length(std::string_view a, std::string_view b) const;

private:
    std::map<std::string, Synset, std::less<>> synsets_;
    std::unordered_map<std::string, std::vector<std::string>> parents_;
    std::unordered_map<std::string, std::vector<std::string>> neighbours_;
    std::unordered_map<std::string, std::vector<std::string>> lemma_index_;
};

}  // namespace mwv::text
