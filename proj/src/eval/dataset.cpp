#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "mwv/csv.hpp"
#include "mwv/error.hpp"
#include "mwv/eval.hpp"
#include "mwv/util.hpp"

namespace mwv::eval {

namespace {

std::optional<Label> parse_dataset_label(std::string_view s) {
    const std::string v = to_lower_ascii(trim(s));
    if (v == "real") return Label::Real;
    if (v == "fake") return Label::Misleading;
    return std::nullopt;
}

std::string lower_name(const std::filesystem::path& p) { return to_lower_ascii(p.filename().string()); }

}  // namespace

std::vector<DatasetRecord> load_dataset(std::istream& in, char delimiter, const LoadOptions& options,
                                        std::string_view source) {
    // Plain TSV carries quotes as data; CSV uses RFC 4180 quoting.
    DelimitedReader reader(in, delimiter, delimiter != '\t');
    const std::string where(source);
    const auto header = reader.next();
    if (!header) throw Error(ErrorCode::BadHeader, where + ": empty file");
    std::optional<std::size_t> id_col;
    std::optional<std::size_t> text_col;
    std::optional<std::size_t> label_col;
    for (std::size_t i = 0; i < header->size(); ++i) {
        const std::string name = to_lower_ascii(trim((*header)[i]));
        if (name == "id" && !id_col) id_col = i;
        if ((name == "tweet" || name == "text") && !text_col) text_col = i;
        if (name == "label" && !label_col) label_col = i;
    }
    if (!id_col || !text_col || (options.require_label && !label_col)) {
        throw Error(ErrorCode::BadHeader, where + ": header needs id, tweet|text" +
                                              std::string(options.require_label ? " and label" : "") + " columns");
    }

    std::vector<DatasetRecord> out;
    std::unordered_set<std::string> ids;
    std::unordered_set<std::string> texts;
    while (auto rec = reader.next()) {
        const std::string line = std::to_string(reader.line());
        if (rec->size() != header->size()) {
            throw Error(ErrorCode::ParseError, where + " line " + line + ": expected " + std::to_string(header->size()) +
                                                   " fields, found " + std::to_string(rec->size()));
        }
        DatasetRecord r;
        r.id = trim((*rec)[*id_col]);
        r.text = (*rec)[*text_col];
        if (r.id.empty()) throw Error(ErrorCode::ParseError, where + " line " + line + ": empty id");
        if (trim(r.text).empty()) throw Error(ErrorCode::ParseError, where + " line " + line + ": empty text");
        if (label_col) {
            const std::string& raw = (*rec)[*label_col];
            const auto label = parse_dataset_label(raw);
            if (!label) throw Error(ErrorCode::BadLabel, where + " line " + line + ": '" + raw + "'");
            r.label = *label;
        }
        if (!ids.insert(r.id).second) throw Error(ErrorCode::DuplicateId, where + " line " + line + ": id '" + r.id + "'");
        if (options.dedup && !texts.insert(trim(r.text)).second) continue;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    const std::string ext = to_lower_ascii(path.extension().string());
    char delimiter = ',';
    if (ext == ".tsv" || ext == ".tab") {
        delimiter = '\t';
    } else if (ext != ".csv") {
        std::string first;
        std::getline(in, first);
        delimiter = first.find('\t') != std::string::npos ? '\t' : ',';
        in.clear();
        in.seekg(0);
    }
    return load_dataset(in, delimiter, options, path.string());
}

std::vector<Claim> to_claims(const std::vector<DatasetRecord>& records) {
    std::vector<Claim> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.id, r.text, r.label});
    return out;
}

std::map<std::string, Label> label_map(const std::vector<DatasetRecord>& records) {
    std::map<std::string, Label> out;
    for (const auto& r : records) out[r.id] = r.label;
    return out;
}

std::vector<std::string> qualified_ids(const SplitSet& splits) {
    std::vector<std::string> out;
    for (const auto& [name, recs] : {std::pair{"train", &splits.train}, std::pair{"validation", &splits.validation},
                                     std::pair{"test", &splits.test}}) {
        for (const auto& r : *recs) out.push_back(std::string(name) + "/" + r.id);
    }
    return out;
}

std::optional<SplitFiles> locate_split_files(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) return std::nullopt;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
        if (!e.is_regular_file()) continue;
        const std::string ext = to_lower_ascii(e.path().extension().string());
        if (ext == ".csv" || ext == ".tsv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    auto pick = [&](std::string_view key) -> std::optional<std::filesystem::path> {
        for (const auto& f : files) {
            if (lower_name(f).find(key) != std::string::npos) return f;
        }
        return std::nullopt;
    };
    const auto train = pick("train");
    const auto val = pick("val");
    const auto test = pick("test");
    if (!train || !val || !test) return std::nullopt;
    return SplitFiles{*train, *val, *test};
}

SplitSet load_splits(const SplitFiles& files, const LoadOptions& options) {
    return {load_dataset(files.train, options), load_dataset(files.validation, options), load_dataset(files.test, options)};
}

SplitCounts count_labels(const std::vector<DatasetRecord>& records) {
    SplitCounts c;
    c.total = records.size();
    for (const auto& r : records) (r.label == Label::Real ? c.real : c.fake) += 1;
    return c;
}

bool SplitCheck::all_match() const {
    return std::all_of(rows.begin(), rows.end(), [](const SplitCheckRow& r) { return r.matches; });
}

SplitCheck verify_split_counts(const SplitSet& splits, bool strict, const ExpectedSplits& expected) {
    SplitCheck check;
    const std::array<std::tuple<const char*, const std::vector<DatasetRecord>*, SplitCounts>, 3> parts{{
        {"train", &splits.train, expected.train},
        {"validation", &splits.validation, expected.validation},
        {"test", &splits.test, expected.test},
    }};
    for (const auto& [name, recs, exp] : parts) {
        SplitCheckRow row{name, exp, count_labels(*recs), false};
        row.matches = row.actual == row.expected;
        if (!row.matches) {
            std::ostringstream w;
            w << name << ": expected " << exp.total << " (" << exp.real << " real / " << exp.fake << " fake), found "
              << row.actual.total << " (" << row.actual.real << " real / " << row.actual.fake << " fake)";
            check.warnings.push_back(w.str());
        }
        check.rows.push_back(std::move(row));
    }
    std::set<std::string> seen;
    for (const auto& id : qualified_ids(splits)) {
        if (!seen.insert(id).second) check.warnings.push_back("duplicate qualified id " + id);
    }
    if (strict && !check.warnings.empty()) throw Error(ErrorCode::CountMismatch, check.warnings.front());
    return check;
}

std::string format_split_check(const SplitCheck& check) {
    std::ostringstream out;
    out << "split        expected(total/real/fake)   actual(total/real/fake)   status\n";
    for (const auto& r : check.rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-12s %6zu / %5zu / %5zu       %6zu / %5zu / %5zu     %s\n", r.split.c_str(),
                      r.expected.total, r.expected.real, r.expected.fake, r.actual.total, r.actual.real, r.actual.fake,
                      r.matches ? "ok" : "MISMATCH");
        out << line;
    }
    for (const auto& w : check.warnings) out << "warning: " << w << '\n';
    return out.str();
}

}  // namespace mwv::eval
