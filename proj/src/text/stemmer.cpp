#include "mwv/text/stemmer.hpp"

#include <algorithm>
#include <utility>

namespace mwv::text {

namespace {

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

class Porter {
public:
    explicit Porter(std::string_view w) : b_(w), k_(static_cast<int>(w.size()) - 1) {}

    std::string run() {
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

private:
    bool cons(int i) const {
        switch (b_[static_cast<std::size_t>(i)]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of VC sequences in b[0..j].
    int measure() const {
        int n = 0;
        int i = 0;
        for (;;) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i) {
            if (!cons(i)) return true;
        }
        return false;
    }

    bool double_consonant(int i) const {
        if (i < 1) return false;
        if (b_[static_cast<std::size_t>(i)] != b_[static_cast<std::size_t>(i - 1)]) return false;
        return cons(i);
    }

    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = b_[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    // On match sets j to the index before the suffix; j is left untouched otherwise.
    bool ends(std::string_view s) {
        const int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ + 1 - len), s.size()) != s) return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void replace_if_measured(std::string_view s) {
        if (measure() > 0) set_to(s);
    }

    // First matching suffix wins; its replacement applies only when m > 0.
    void apply_first(std::initializer_list<Rule> rules) {
        for (const auto& r : rules) {
            if (ends(r.suffix)) {
                replace_if_measured(r.replacement);
                return;
            }
        }
    }

    char at(int i) const { return b_[static_cast<std::size_t>(i)]; }

    void step1ab() {
        if (at(k_) == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (at(k_ - 1) != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (measure() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_consonant(k_)) {
                --k_;
                const char ch = at(k_);
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (measure() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    void step2() {
        switch (at(k_ - 1)) {
            case 'a': apply_first({{"ational", "ate"}, {"tional", "tion"}}); break;
            case 'c': apply_first({{"enci", "ence"}, {"anci", "ance"}}); break;
            case 'e': apply_first({{"izer", "ize"}}); break;
            case 'l':
                apply_first({{"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}});
                break;
            case 'o': apply_first({{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}}); break;
            case 's':
                apply_first({{"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}});
                break;
            case 't': apply_first({{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}}); break;
            case 'g': apply_first({{"logi", "log"}}); break;
            default: break;
        }
    }

    void step3() {
        switch (at(k_)) {
            case 'e': apply_first({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}}); break;
            case 'i': apply_first({{"iciti", "ic"}}); break;
            case 'l': apply_first({{"ical", "ic"}, {"ful", ""}}); break;
            case 's': apply_first({{"ness", ""}}); break;
            default: break;
        }
    }

    void step4() {
        bool matched = false;
        auto any_of = [&](std::initializer_list<std::string_view> suffixes) {
            for (auto s : suffixes) {
                if (ends(s)) return true;
            }
            return false;
        };
        switch (at(k_ - 1)) {
            case 'a': matched = any_of({"al"}); break;
            case 'c': matched = any_of({"ance", "ence"}); break;
            case 'e': matched = any_of({"er"}); break;
            case 'i': matched = any_of({"ic"}); break;
            case 'l': matched = any_of({"able", "ible"}); break;
            case 'n': matched = any_of({"ant", "ement", "ment", "ent"}); break;
            case 'o':
                if (ends("ion") && j_ >= 0 && (at(j_) == 's' || at(j_) == 't')) {
                    matched = true;
                } else {
                    matched = ends("ou");
                }
                break;
            case 's': matched = any_of({"ism"}); break;
            case 't': matched = any_of({"ate", "iti"}); break;
            case 'u': matched = any_of({"ous"}); break;
            case 'v': matched = any_of({"ive"}); break;
            case 'z': matched = any_of({"ize"}); break;
            default: break;
        }
        if (matched && measure() > 1) {
            k_ = j_;
            b_.resize(static_cast<std::size_t>(k_ + 1));
        }
    }

    void step5() {
        j_ = k_;
        if (at(k_) == 'e') {
            const int a = measure();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (at(k_) == 'l' && double_consonant(k_) && measure() > 1) --k_;
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    std::string b_;
    int k_;
    int j_ = 0;
};

}  // namespace

std::string porter_stem(std::string_view word) {
    if (word.size() <= 2) return std::string(word);
    if (!std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
        return std::string(word);
    }
    return Porter(word).run();
}

}  // namespace mwv::text
