#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fno {

/// Index word over the component alphabet 1..d. Repeated letters allowed.
using Word = std::vector<int>;

inline std::string word_to_string(const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(w[i]);
    }
    return s;
}

inline Word word_from_string(const std::string& s) {
    Word w;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t dot = s.find('.', pos);
        if (dot == std::string::npos) dot = s.size();
        w.push_back(std::stoi(s.substr(pos, dot - pos)));
        pos = dot + 1;
    }
    if (w.empty()) throw std::invalid_argument("word_from_string: empty word");
    return w;
}

namespace detail {
inline void shuffle_rec(const Word& a, std::size_t i, const Word& b, std::size_t j,
                        Word& cur, std::vector<Word>& out) {
    if (i == a.size() && j == b.size()) {
        out.push_back(cur);
        return;
    }
    if (i < a.size()) {
        cur.push_back(a[i]);
        shuffle_rec(a, i + 1, b, j, cur, out);
        cur.pop_back();
    }
    if (j < b.size()) {
        cur.push_back(b[j]);
        shuffle_rec(a, i, b, j + 1, cur, out);
        cur.pop_back();
    }
}
}  // namespace detail

/// All interleavings of w1 and w2 preserving each word's internal order,
/// with multiplicity; the list has binomial(|w1|+|w2|, |w1|) entries.
inline std::vector<Word> shuffles(const Word& w1, const Word& w2) {
    if (w1.empty() || w2.empty()) throw std::invalid_argument("shuffles: empty word");
    std::vector<Word> out;
    Word cur;
    cur.reserve(w1.size() + w2.size());
    detail::shuffle_rec(w1, 0, w2, 0, cur, out);
    return out;
}

}  // namespace fno
